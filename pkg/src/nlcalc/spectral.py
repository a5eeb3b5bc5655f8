"""Sine-transform spectra of scaled kernels, zero sets and bound certificates.

Everything here works with the real odd function ``i * alpha_hat_eps(xi)``,
written ``A(xi)`` below.  For the transform convention
``u_hat(xi) = int exp(-2 pi i xi t) u(t) dt`` and an odd kernel,

    A(xi) = 2 / (eps * alpha_(1)) * int_0^inf sin(2 pi eps xi s) alpha(s) ds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.special import spherical_jn

from .kernels import FlatnessCase, KernelError, KernelProfile, ScaledKernel, moment, scale
from .quadrature import integrate_from_zero, series_x_minus_sin

TWO_PI = 2.0 * math.pi
_CHUNK = 64


# ---------------------------------------------------------------------------
# closed forms on the unscaled frequency w = 2 pi eps xi, returning eps * A


def _exp_closed(omega):
    # 2/(2) * omega / (1 + omega^2)
    return omega / (1.0 + omega * omega)


def _sine_closed(omega):
    # -pi^2 sin(w) / (w^2 - pi^2), written through sinc to stay finite at w = pi
    x = omega / math.pi
    return math.pi * np.sinc(x - 1.0) / (x + 1.0)


def _indicator_closed(omega):
    return 3.0 * spherical_jn(1, omega)


_CLOSED = {
    "exponential": _exp_closed,
    "sine": _sine_closed,
    "indicator": _indicator_closed,
}


def _exp_defect(omega):
    # omega - omega/(1+omega^2) = omega^3/(1+omega^2)
    return omega**3 / (1.0 + omega * omega)


_CLOSED_DEFECT = {"exponential": _exp_defect}


def _half_line_integral(k: KernelProfile, weight: Callable, omegas: np.ndarray,
                        tol: float, extra_power: float = 1.0) -> np.ndarray:
    """``int_0^R weight(omega s) alpha(s) ds`` for a batch of omegas.

    ``weight(x) ~ x**extra_power`` at 0 governs the singular exponent used
    for the substitution head panel.  Panels are no longer than a quarter of
    the shortest sine period in the batch.
    """
    out = np.empty_like(omegas)
    radius = k.effective_radius(0)
    sing = k.singular_exponent
    exponent = None if sing is None else sing + extra_power
    order = np.argsort(omegas)
    for start in range(0, omegas.size, _CHUNK):
        idx = order[start:start + _CHUNK]
        om = omegas[idx]
        wmax = float(om.max())
        quarter = (math.pi / 2.0) / wmax if wmax > 0 else radius
        n_cuts = int(min(math.ceil(radius / quarter), 200_000))
        cuts = list(np.linspace(0.0, radius, n_cuts + 1)[1:-1]) + list(k.breakpoints)

        def f(s, om=om):
            return weight(om[:, None] * s[None, :]) * k.profile(s)[None, :]

        head = min(quarter, radius / 8.0)
        val = integrate_from_zero(f, radius, exponent, head=head, tol=tol,
                                  breakpoints=cuts, order=16,
                                  max_panels=max(200_000, 8 * n_cuts))
        out[idx] = val
    return out


@dataclass
class KernelSpectrum:
    """Evaluator of ``A(xi) = i alpha_hat_eps(xi)`` for one scaled kernel."""

    source: ScaledKernel
    form: str = "closed-form"
    tol: float = 1e-15
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def epsilon(self) -> float:
        return self.source.epsilon

    def _unit(self, omega: np.ndarray) -> np.ndarray:
        """``eps * A`` as a function of ``omega = 2 pi eps |xi| >= 0``."""
        k = self.source.base
        if self.form == "closed-form":
            return _CLOSED[k.name](omega)
        a1 = moment(k, 1)
        return 2.0 / a1 * _half_line_integral(k, np.sin, omega, self.tol)

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        scalar = xi.ndim == 0
        xi = np.atleast_1d(xi)
        eps = self.epsilon
        omega = TWO_PI * eps * np.abs(xi)
        val = np.zeros_like(omega)
        nz = omega > 0
        if nz.any():
            val[nz] = self._unit(omega[nz]) / eps
        val = np.sign(xi) * val
        return float(val[0]) if scalar else val

    def defect(self, xi):
        """``2 pi xi - A(xi)`` computed without cancellation near 0."""
        xi = np.asarray(xi, dtype=float)
        scalar = xi.ndim == 0
        xi = np.atleast_1d(xi)
        eps = self.epsilon
        k = self.source.base
        omega = TWO_PI * eps * np.abs(xi)
        out = np.zeros_like(omega)
        nz = omega > 0
        if nz.any():
            om = omega[nz]
            if self.form == "closed-form" and k.name in _CLOSED_DEFECT:
                d = _CLOSED_DEFECT[k.name](om)
            else:
                # omega - unit(omega), split so small frequencies use x - sin x
                d = np.empty_like(om)
                small = om * k.effective_radius(0) < 1.0
                if small.any():
                    a1 = moment(k, 1)
                    d[small] = 2.0 / a1 * _half_line_integral(
                        k, series_x_minus_sin, om[small], self.tol, extra_power=3.0)
                if (~small).any():
                    d[~small] = om[~small] - self._unit(om[~small])
            out[nz] = d / eps
        out = np.sign(xi) * out
        return float(out[0]) if scalar else out


def spectrum(s: ScaledKernel, prefer_closed: bool = True, tol: float = 1e-15) -> KernelSpectrum:
    form = "closed-form" if prefer_closed and s.base.name in _CLOSED else "quadrature"
    return KernelSpectrum(s, form, tol)


def transform(s: ScaledKernel, xi, prefer_closed: bool = True):
    """``i alpha_hat_eps(xi)`` (scalar or array)."""
    return spectrum(s, prefer_closed)(xi)


# ---------------------------------------------------------------------------
# zero sets


@dataclass
class ZeroSet:
    """Nonnegative zeros of the unscaled spectrum with multiplicities."""

    zeros: list[tuple[float, int]]
    window: float
    kernel: str = ""

    def signed(self) -> list[tuple[float, int]]:
        neg = [(-x, m) for x, m in reversed(self.zeros) if x > 0]
        return neg + list(self.zeros)

    def scaled(self, epsilon: float) -> list[tuple[float, int]]:
        return [(x / epsilon, m) for x, m in self.signed()]

    def nonzero(self) -> list[float]:
        return [x for x, _ in self.zeros if x > 0]

    def to_dict(self, epsilon: float | None = None) -> dict:
        d = {
            "kernel": self.kernel,
            "window": self.window,
            "zeros": [{"xi": x, "multiplicity": m} for x, m in self.zeros],
        }
        if epsilon is not None:
            d["epsilon"] = epsilon
            d["scaled_zeros"] = [{"xi": x, "multiplicity": m} for x, m in self.scaled(epsilon)]
        return d


def _derivative(f, x: float, order: int, h: float) -> float:
    """Central finite difference of the given order."""
    if order == 1:
        return (f(x + h) - f(x - h)) / (2 * h)
    if order == 2:
        return (f(x + h) - 2 * f(x) + f(x - h)) / h**2
    if order == 3:
        return (f(x + 2 * h) - 2 * f(x + h) + 2 * f(x - h) - f(x - 2 * h)) / (2 * h**3)
    if order == 4:
        return (f(x + 2 * h) - 4 * f(x + h) + 6 * f(x) - 4 * f(x - h) + f(x - 2 * h)) / h**4
    raise ValueError("multiplicity estimate supports orders up to 4")


def estimate_multiplicity(f, x: float, h: float, parity: int | None = None,
                          threshold: float = 1e-6) -> int:
    """Smallest order whose finite-difference derivative exceeds ``threshold``."""
    for m in range(1, 5):
        if parity is not None and m % 2 != parity % 2:
            continue
        step = h * (10.0 ** (m - 1) if m > 1 else 1.0)
        if abs(_derivative(f, x, m, min(step, 1e-2))) > threshold:
            return m
    return 4 if parity in (None, 0) else 3


def zeros_of(f: Callable[[np.ndarray], np.ndarray], window: float, resolution: int,
             xtol: float = 1e-13, touch_tol: float = 1e-10) -> list[tuple[float, int]]:
    """Roots of an odd function on [0, window], including 0.

    Sign changes between samples are refined with Brent's method; local minima
    of |f| that do not change sign are refined by bounded minimisation and
    kept when |f| falls below ``touch_tol`` (even multiplicity).
    """
    n = max(int(math.ceil(window * resolution)), 8)
    step = window / n
    grid = np.linspace(0.0, window + step, n + 2)
    vals = np.asarray(f(grid), dtype=float)
    scalar_f = lambda x: float(np.asarray(f(np.array([x])))[0])  # noqa: E731
    scale_ = max(float(np.max(np.abs(vals))), 1e-300)
    roots: list[tuple[float, int]] = [(0.0, estimate_multiplicity(scalar_f, 0.0, 1e-5, parity=1))]
    limit = window * (1 + 1e-12) + 1e-14

    exact = np.abs(vals) <= 1e-14 * scale_
    for i in range(1, grid.size - 1):
        fa, fb = vals[i], vals[i + 1]
        if exact[i]:
            if not exact[i - 1]:
                roots.append((float(grid[i]), 1 if vals[i - 1] * fb < 0 else -2))
            continue
        if exact[i + 1]:
            continue
        if fa * fb < 0:
            r = brentq(scalar_f, grid[i], grid[i + 1], xtol=xtol, rtol=4 * np.finfo(float).eps)
            roots.append((r, 1))
        elif (not exact[i - 1] and abs(fa) < abs(vals[i - 1]) and abs(fa) <= abs(fb)
              and vals[i - 1] * fa > 0 and fa * fb > 0):
            res = minimize_scalar(lambda x: abs(scalar_f(x)), bounds=(grid[i - 1], grid[i + 1]),
                                  method="bounded", options={"xatol": 1e-12})
            if abs(scalar_f(res.x)) <= touch_tol * scale_:
                roots.append((float(res.x), -2))

    out = [roots[0]]
    for r, tag in roots[1:]:
        if r <= 0 or r > limit:
            continue
        if out and abs(r - out[-1][0]) < 10 * xtol:
            continue
        h = max(step * 1e-3, 1e-6)
        if tag == -2:
            m = estimate_multiplicity(scalar_f, r, h, parity=0)
        else:
            m = estimate_multiplicity(scalar_f, r, h, parity=1)
        out.append((float(r), m))
    out.sort()
    return out


def find_zeros(k: KernelProfile, window: float, resolution: int = 64,
               prefer_closed: bool = True) -> ZeroSet:
    """Zeros of the unscaled kernel transform on [0, window]."""
    if resolution < 1:
        raise ValueError("resolution must be positive")
    spec = spectrum(scale(k, 1.0), prefer_closed)
    return ZeroSet(zeros_of(spec, float(window), int(resolution)), float(window), k.name)


def find_scaled_zeros(s: ScaledKernel, window: float, resolution: float = 64,
                      prefer_closed: bool = True) -> list[tuple[float, int]]:
    """Zeros of ``A`` for the scaled kernel itself, located directly."""
    spec = spectrum(s, prefer_closed)
    return zeros_of(spec, float(window), float(resolution))


# ---------------------------------------------------------------------------
# bound certificates


@dataclass
class BoundCertificate:
    kind: str
    kernel: str
    epsilon: float
    C_alpha: float
    C_prime_alpha: float | None
    positivity_margin: float | None
    checks: list[tuple[float, float, float, float, bool]]

    @property
    def ok(self) -> bool:
        return all(c[4] for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "kernel": self.kernel,
            "epsilon": self.epsilon,
            "C_alpha": self.C_alpha,
            "C_prime_alpha": self.C_prime_alpha,
            "positivity_margin": self.positivity_margin,
            "ok": self.ok,
            "checks": [
                {"xi": x, "lower": lo, "value": v, "upper": up, "ok": ok}
                for x, lo, v, up, ok in self.checks
            ],
        }


def near_field_constant(k: KernelProfile) -> float:
    """``C_alpha = 4 pi^3 alpha_(3) / (3 alpha_(1))``."""
    return 4.0 * math.pi**3 * moment(k, 3) / (3.0 * moment(k, 1))


def far_field_constant(k: KernelProfile) -> float:
    """``C'_alpha`` from the two-point integral of the flatness gauge."""
    flat = k.flatness
    if flat is None:
        raise KernelError("far-field constant needs a flatness record")
    kk, kp, km = flat.k_alpha, flat.K_plus, flat.K_minus
    if flat.case is FlatnessCase.FINITE_LIMIT:
        def f(s):
            return np.sin(np.pi * s) * (kp * (s + 1.0) ** kk - km * s**kk)
        integral = integrate_from_zero(f, 1.0, None if float(kk).is_integer() else 1.0 + kk,
                                       tol=1e-15)
    else:
        def f(s):
            return np.sin(np.pi * s) * (km * s**kk - kp * (s + 1.0) ** kk)
        integral = integrate_from_zero(f, 1.0, 1.0 + kk, tol=1e-15)
    return float(integral) / (2.0**kk * moment(k, 1))


def positivity_margin_value(c_alpha: float, b_alpha: float) -> float:
    return TWO_PI * b_alpha - c_alpha / (4.0 * b_alpha)


def positivity_margin(k: KernelProfile) -> float:
    """``2 pi b_alpha - C_alpha / (4 b_alpha)``; positive certifies the near-field term."""
    if k.flatness is None:
        raise KernelError("positivity margin needs a flatness record")
    return positivity_margin_value(near_field_constant(k), k.flatness.b_alpha)


def _within(lower, value, upper, rtol):
    slack = rtol * max(abs(lower), abs(value), abs(upper), 1e-300)
    return lower - slack <= value <= upper + slack


def near_field_certificate(s: ScaledKernel, xis: Sequence[float], rtol: float = 1e-10,
                           prefer_closed: bool = True) -> BoundCertificate:
    """Check ``2 pi|xi| - C eps^2 |xi|^3 <= A(|xi|) <= 2 pi |xi|`` at each xi."""
    c = near_field_constant(s.base)
    eps = s.epsilon
    xa = np.abs(np.asarray(xis, dtype=float))
    vals = np.atleast_1d(spectrum(s, prefer_closed)(xa))
    checks = []
    for x, v in zip(np.asarray(xis, dtype=float), vals):
        ax = abs(x)
        upper = TWO_PI * ax
        lower = upper - c * eps**2 * ax**3
        checks.append((float(x), float(lower), float(v), float(upper), _within(lower, v, upper, rtol)))
    margin = positivity_margin(s.base) if s.base.flatness else None
    return BoundCertificate("near-field", s.base.name, eps, c, None, margin, checks)


def far_field_threshold(s: ScaledKernel) -> float:
    """Smallest |xi| covered by the far-field estimate, ``1/(2 eps b_alpha)``."""
    if s.base.flatness is None:
        raise KernelError("far-field estimate needs a flatness record")
    return 1.0 / (2.0 * s.epsilon * s.base.flatness.b_alpha)


def far_field_certificate(s: ScaledKernel, xis: Sequence[float], rtol: float = 1e-10,
                          prefer_closed: bool = True) -> BoundCertificate:
    """Check ``A(|xi|) >= C' eps^(-2-k) |xi|^(-1-k)`` for ``|xi| >= 1/(2 eps b)``."""
    flat = s.base.flatness
    if flat is None:
        raise KernelError("far-field certificate needs a flatness record")
    thr = far_field_threshold(s)
    xis = np.asarray(xis, dtype=float)
    if np.any(np.abs(xis) < thr * (1 - 1e-12)):
        raise ValueError(f"far-field certificate needs |xi| >= {thr:g}")
    cp = far_field_constant(s.base)
    kk, eps = flat.k_alpha, s.epsilon
    vals = np.atleast_1d(spectrum(s, prefer_closed)(np.abs(xis)))
    checks = []
    for x, v in zip(xis, vals):
        lower = cp * eps ** (-2.0 - kk) * abs(x) ** (-1.0 - kk)
        checks.append((float(x), float(lower), float(v), math.inf, _within(lower, v, math.inf, rtol)
                       if math.isfinite(v) else False))
    return BoundCertificate("far-field", s.base.name, eps, near_field_constant(s.base), cp,
                            positivity_margin(s.base), checks)


def beta_correction(s: ScaledKernel, xi, prefer_closed: bool = True):
    """``beta_hat_eps(xi) = 2 pi / A(xi) - 1/xi`` via ``(2 pi xi - A)/(xi A)``."""
    spec = spectrum(s, prefer_closed)
    xi_arr = np.asarray(xi, dtype=float)
    if np.any(xi_arr == 0):
        raise ValueError("beta correction is evaluated at nonzero xi (its limit at 0 is 0)")
    a = np.asarray(spec(xi_arr))
    if np.any(a == 0):
        raise ValueError("beta correction evaluated at a zero of the spectrum")
    out = np.asarray(spec.defect(xi_arr)) / (xi_arr * a)
    return float(out) if out.ndim == 0 else out


__all__ = [
    "KernelSpectrum",
    "ZeroSet",
    "BoundCertificate",
    "spectrum",
    "transform",
    "find_zeros",
    "find_scaled_zeros",
    "zeros_of",
    "estimate_multiplicity",
    "near_field_constant",
    "far_field_constant",
    "far_field_threshold",
    "near_field_certificate",
    "far_field_certificate",
    "beta_correction",
    "positivity_margin",
    "positivity_margin_value",
]
