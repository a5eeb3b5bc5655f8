"""Application of the nonlocal derivative to sampled and callable functions.

``D u(t) = int alpha_eps(s) u(t + s) ds`` is evaluated on the half line as

    D u(t) = int_0^inf alpha_eps(s) [u(t + s) - u(t - s)] ds,

which annihilates constants exactly and needs only ``alpha`` on s > 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .kernels import ScaledKernel, moment
from .quadrature import adaptive_gauss_legendre, integrate_from_zero


class BoundaryError(ValueError):
    """Output point whose kernel window leaves the sampled domain."""


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples ``values[i] = u(a + i h)`` with ``h = (b - a) / N``, N a power of two."""

    a: float
    b: float
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        n = v.size
        if v.ndim != 1 or n < 2 or n & (n - 1):
            raise ValueError(f"need a power-of-two number of samples >= 2, got {v.shape}")
        if not self.b > self.a:
            raise ValueError("domain must satisfy a < b")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid values must be finite")

    @classmethod
    def sample(cls, f: Callable[[np.ndarray], np.ndarray], a: float, b: float, n: int) -> "GridFunction":
        t = a + (b - a) / n * np.arange(n)
        return cls(a, b, np.asarray(f(t), dtype=float) * np.ones(n))

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n

    @property
    def t(self) -> np.ndarray:
        return self.a + self.h * np.arange(self.n)

    def same_grid(self, other: "GridFunction") -> bool:
        return self.n == other.n and math.isclose(self.a, other.a) and math.isclose(self.b, other.b)

    def interpolant(self) -> CubicSpline:
        return CubicSpline(self.t, self.values)


@dataclass(frozen=True)
class QuadratureConfig:
    tolerance: float = 1e-13
    panel_budget: int = 200_000
    truncation: float | None = None  # unscaled kernel radius for non-compact kernels

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("quadrature tolerance must be positive")


def _window(s: ScaledKernel, q: QuadratureConfig) -> float:
    if q.truncation is not None:
        return s.epsilon * q.truncation
    if math.isfinite(s.base.support_radius):
        return s.support_radius
    # linear growth of u is the worst case the callers feed in
    return s.epsilon * s.base.effective_radius(1)


# fraction of eps below which a singular kernel is integrated by Taylor expansion
_SINGULAR_CUTOFF = 1e-3


def _near_moment(s: ScaledKernel, delta: float, m: int) -> float:
    """``int_0^delta x**m alpha_eps(x) dx`` for a kernel singular at 0."""
    k = s.base
    tau = delta / s.epsilon
    val = integrate_from_zero(lambda y: y**m * k.profile(y), tau, m + k.singular_exponent,
                              head=tau, tol=1e-18)
    return float(val) * s.epsilon ** (m - 1) / moment(k, 1)


def _slope(func, t: np.ndarray, h: float) -> np.ndarray:
    return (-func(t + 2 * h) + 8 * func(t + h) - 8 * func(t - h) + func(t - 2 * h)) / (12 * h)


def _third(func, t: np.ndarray, h: float) -> np.ndarray:
    return (func(t + 2 * h) - 2 * func(t + h) + 2 * func(t - h) - func(t - 2 * h)) / (2 * h**3)


def apply(s: ScaledKernel, u, points: Sequence[float] | np.ndarray,
          q: QuadratureConfig | None = None) -> np.ndarray:
    """Evaluate ``D_{alpha,eps} u`` at ``points``.

    ``u`` is a :class:`GridFunction` (cubic-spline interpolated, points whose
    kernel window leaves the sampled range are rejected) or a vectorised
    callable.  A callable may expose ``kinks``: abscissae where it is not
    smooth, used as quadrature breakpoints.
    """
    q = q or QuadratureConfig()
    pts = np.atleast_1d(np.asarray(points, dtype=float))
    radius = _window(s, q)
    if isinstance(u, GridFunction):
        t = u.t
        lo, hi = t[0] + radius, t[-1] - radius
        bad = (pts < lo - 1e-12) | (pts > hi + 1e-12)
        if bad.any():
            raise BoundaryError(
                f"kernel window {radius:g} leaves [{t[0]:g}, {t[-1]:g}] at t={pts[bad][0]:g}")
        func = u.interpolant()
        kinks: tuple = ()
    else:
        func = u
        kinks = tuple(getattr(u, "kinks", ()))

    kernel_bps = [s.epsilon * b for b in s.base.breakpoints if s.epsilon * b < radius]
    singular = s.base.singular_exponent is not None
    if singular:
        # u(t+x) - u(t-x) loses its digits as x -> 0 while alpha_eps blows up,
        # so [0, delta] is replaced by its Taylor terms in u' and u'''
        delta = _SINGULAR_CUTOFF * min(s.epsilon, radius)
        kernel_bps += list(delta * 2.0 ** np.arange(1, 40))
        m1 = 2.0 * _near_moment(s, delta, 1)
        m3 = _near_moment(s, delta, 3) / 3.0
        if isinstance(u, GridFunction):
            d1, d3 = func.derivative(1), func.derivative(3)
        else:
            d1 = lambda tt: _slope(func, tt, delta)  # noqa: E731
            d3 = lambda tt: _third(func, tt, 0.05 * s.epsilon)  # noqa: E731

    def integrate(tt: np.ndarray, extra_bps) -> np.ndarray:
        def f(x):
            diff = func(tt[:, None] + x[None, :]) - func(tt[:, None] - x[None, :])
            return s(x)[None, :] * diff

        bps = list(kernel_bps) + list(extra_bps)
        if not singular:
            return integrate_from_zero(f, radius, None, tol=q.tolerance, breakpoints=bps,
                                       max_panels=q.panel_budget)
        far = adaptive_gauss_legendre(f, delta, radius, q.tolerance, bps,
                                      max_panels=q.panel_budget)
        return far + m1 * d1(tt) + m3 * d3(tt)

    if not kinks:
        out = np.empty_like(pts)
        for start in range(0, pts.size, 256):
            chunk = pts[start:start + 256]
            out[start:start + 256] = np.atleast_1d(integrate(chunk, ()))
        return out

    out = np.empty_like(pts)
    for i, t0 in enumerate(pts):
        bps = [abs(t0 - c) for c in kinks if 0 < abs(t0 - c) < radius]
        out[i] = float(np.atleast_1d(integrate(np.array([t0]), bps))[0])
    return out


def apply_grid(s: ScaledKernel, u: GridFunction, q: QuadratureConfig | None = None):
    """Apply on every sample whose kernel window stays inside the data.

    Returns ``(mask, values)`` where ``values`` holds results for ``u.t[mask]``.
    """
    q = q or QuadratureConfig()
    radius = _window(s, q)
    t = u.t
    mask = (t >= t[0] + radius - 1e-12) & (t <= t[-1] - radius + 1e-12)
    return mask, apply(s, u, t[mask], q)


def taylor_bound(s: ScaledKernel, sup_u2: float) -> float:
    """``eps |alpha|_(2) / (2 |alpha_(1)|) * sup|u''|``: sup-norm bound on ``D u - u'``."""
    if sup_u2 < 0:
        raise ValueError("sup|u''| must be nonnegative")
    return s.epsilon * moment(s.base, 2, absolute=True) / (2.0 * abs(moment(s.base, 1))) * sup_u2


def weak_pairing(f: GridFunction, psi: GridFunction) -> float:
    """Trapezoid approximation of ``int f psi`` on a shared grid."""
    if not f.same_grid(psi):
        raise ValueError("weak pairing needs both functions on the same grid")
    prod = f.values * psi.values
    return float(f.h * (prod.sum() - 0.5 * (prod[0] + prod[-1])))


def annihilation_residual(s: ScaledKernel, n: int, points: Sequence[float] | None = None,
                          q: QuadratureConfig | None = None) -> float:
    """``sup |D g_n|`` for ``g_n(t) = exp(i n pi t / eps)`` over a test grid.

    The real and imaginary parts are applied separately and the larger sup
    is returned.
    """
    if s.base.name != "sine":
        raise ValueError("annihilation residual is defined for the sine kernel")
    w = n * math.pi / s.epsilon
    pts = np.linspace(-1.0, 1.0, 101) if points is None else np.asarray(points, dtype=float)
    re = apply(s, lambda t: np.cos(w * t), pts, q)
    im = apply(s, lambda t: np.sin(w * t), pts, q)
    return float(max(np.max(np.abs(re)), np.max(np.abs(im))))
