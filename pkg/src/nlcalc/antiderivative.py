"""Nonlocal antidifferentiation: solve ``D_{alpha,eps} u = F`` spectrally.

Fourier convention: ``F_hat(xi) = int F(t) exp(-2 pi i xi t) dt``.  On the grid
``t_j = -T + j h`` (``h = 2T/N``) this is approximated by
``h * sum_j F_j exp(-2 pi i xi_k t_j)`` on ``xi_k = k / (2T)``; the inverse
carries ``1/(2T)``.  Both the ``h`` and the ``exp(2 pi i xi_k T)`` phase cancel
between the forward and inverse pass, so the multiplier is applied directly
to ``numpy.fft.rfft`` bins.

The symbol of the operator is ``i A(xi)`` with ``A`` from
:mod:`nlcalc.spectral`, so the particular solution has multiplier
``1 / (i A) = -i / A``.  Near ``xi = 0`` this is split as
``1/(2 pi i xi) + beta_hat / (2 pi i)``.  The ``1/(2 pi i xi)`` part on the
zero-frequency content of F (a Gaussian carrying the mass of F) is applied in
closed form as the odd antiderivative ``(m/2) erf(t / (sigma sqrt 2))``; the
rest of F has zero mean and is divided bin by bin.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import erf

from .derivative import GridFunction, QuadratureConfig, _window, apply
from .kernels import KernelError, KernelProfile, ScaledKernel
from .spectral import TWO_PI, estimate_multiplicity, find_zeros, spectrum


class PeriodizationWarning(UserWarning):
    """F does not decay at the edge of the periodized domain."""


class SolverError(ValueError):
    pass


CONSTANT_POLICIES = ("zero-mean", "fixed-value")


@dataclass(frozen=True)
class SolverConfig:
    half_width: float = 40.0
    n: int = 2**14
    null_threshold: float = 1e-8
    constant_policy: str = "zero-mean"
    constant_value: float = 0.0  # grid mean of the particular solution under fixed-value
    strict: bool = False  # raise instead of warning when F does not decay at the edge
    boundary_tol: float = 1e-3
    bracket_sign_changes: bool = True
    residual_samples: int = 129
    prefer_closed: bool = True

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")
        if self.n < 4 or self.n & (self.n - 1):
            raise ValueError("n must be a power of two >= 4")
        if not 0.0 < self.null_threshold < 1.0:
            raise ValueError("null_threshold must lie in (0, 1)")
        if self.constant_policy not in CONSTANT_POLICIES:
            raise ValueError(f"constant_policy must be one of {CONSTANT_POLICIES}")

    @property
    def h(self) -> float:
        return 2.0 * self.half_width / self.n

    def grid(self) -> np.ndarray:
        return -self.half_width + self.h * np.arange(self.n)

    def sample(self, f: Callable[[np.ndarray], np.ndarray]) -> GridFunction:
        return GridFunction.sample(f, -self.half_width, self.half_width, self.n)

    def to_dict(self) -> dict:
        return {
            "half_width": self.half_width,
            "n": self.n,
            "null_threshold": self.null_threshold,
            "constant_policy": self.constant_policy,
            "constant_value": self.constant_value,
            "strict": self.strict,
            "boundary_tol": self.boundary_tol,
            "bracket_sign_changes": self.bracket_sign_changes,
            "residual_samples": self.residual_samples,
            "prefer_closed": self.prefer_closed,
        }


@dataclass
class AntiderivativeResult:
    particular: GridFunction
    null_modes: list[tuple[float, int]]
    residual: float
    kernel: str = ""
    epsilon: float = math.nan
    config: SolverConfig = field(default_factory=SolverConfig)

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel,
            "epsilon": self.epsilon,
            "config": self.config.to_dict(),
            "null_modes": [{"xi": x, "k": k} for x, k in self.null_modes],
            "residual": self.residual,
        }


def _check_grid(F: GridFunction, cfg: SolverConfig) -> None:
    T = cfg.half_width
    if F.n != cfg.n or not math.isclose(F.a, -T) or not math.isclose(F.b, T):
        raise SolverError(
            f"F must be sampled on [-{T:g}, {T:g}) with {cfg.n} points, "
            f"got [{F.a:g}, {F.b:g}) with {F.n}")


def _check_boundary(F: GridFunction, cfg: SolverConfig) -> None:
    peak = float(np.max(np.abs(F.values)))
    edge = max(abs(F.values[0]), abs(F.values[-1]))
    if peak > 0 and edge > cfg.boundary_tol * peak:
        msg = (f"F is {edge / peak:.2e} of its peak at the domain edge; "
               "the periodized solve is not valid")
        if cfg.strict:
            raise SolverError(msg)
        warnings.warn(msg, PeriodizationWarning, stacklevel=3)


def _null_bins(a: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    """Indices k >= 1 of bins where division is suppressed."""
    mag = np.abs(a)
    null = mag <= cfg.null_threshold * mag[1:].max()
    null[0] = False
    if cfg.bracket_sign_changes:
        # a zero falling between two bins: drop the smaller neighbour
        idx = np.nonzero(np.sign(a[1:-1]) * np.sign(a[2:]) < 0)[0] + 1
        for i in idx:
            null[i if mag[i] <= mag[i + 1] else i + 1] = True
    return np.nonzero(null)[0]


def _residual(s: ScaledKernel, v: GridFunction, F: GridFunction, cfg: SolverConfig,
              q: QuadratureConfig | None) -> float:
    t = v.t
    T = cfg.half_width
    radius = _window(s, q or QuadratureConfig())
    inner = np.nonzero((np.abs(t) <= 0.8 * T) & (t >= t[0] + radius) & (t <= t[-1] - radius))[0]
    if inner.size == 0:
        return math.nan
    pick = inner[np.unique(np.linspace(0, inner.size - 1, min(cfg.residual_samples, inner.size))
                           .round().astype(int))]
    dv = apply(s, v, t[pick], q)
    return float(np.max(np.abs(dv - F.values[pick])))


def solve(s: ScaledKernel, F: GridFunction, cfg: SolverConfig | None = None,
          q: QuadratureConfig | None = None, residual: bool = True) -> AntiderivativeResult:
    """Particular solution of ``D_{alpha,eps} u = F`` on the periodized grid."""
    cfg = cfg or SolverConfig(half_width=(F.b - F.a) / 2.0, n=F.n)
    _check_grid(F, cfg)
    _check_boundary(F, cfg)
    spec = spectrum(s, cfg.prefer_closed)
    T, n, h = cfg.half_width, cfg.n, cfg.h
    t = cfg.grid()
    xi = np.arange(n // 2 + 1) / (2.0 * T)

    a = np.zeros_like(xi)
    a[1:] = spec(xi[1:])
    if not np.any(np.abs(a[1:]) > 0):
        raise SolverError("kernel spectrum vanishes on every frequency bin")

    # mass of F carried by a Gaussian whose classical antiderivative is known
    mass = h * float(F.values.sum())
    sigma = T / 10.0
    gauss = np.exp(-0.5 * (t / sigma) ** 2) / (sigma * math.sqrt(2.0 * math.pi))
    rest = F.values - mass * gauss

    inv = np.zeros_like(xi)  # 1 / A on the bins
    beta = np.zeros_like(xi)  # beta_hat = 2 pi / A - 1 / xi
    near = np.zeros(xi.size, dtype=bool)
    near[1:] = TWO_PI * s.epsilon * xi[1:] * s.base.effective_radius(0) < 1.0
    far = ~near
    far[0] = False
    inv[far] = 1.0 / a[far]
    if near.any():
        beta[near] = spec.defect(xi[near]) / (xi[near] * a[near])
        inv[near] = 1.0 / (TWO_PI * xi[near]) + beta[near] / TWO_PI
    beta[far] = TWO_PI * inv[far] - 1.0 / xi[far]

    null = _null_bins(a, cfg)
    inv[null] = 0.0
    beta[null] = 0.0
    inv[-1] = 0.0  # n is even, so the last bin is Nyquist and has no odd partner
    beta[-1] = 0.0

    v_hat = -1j * inv * np.fft.rfft(rest)
    v = np.fft.irfft(v_hat, n)
    if mass != 0.0:
        g_hat = np.fft.rfft(mass * gauss)
        v = v + np.fft.irfft(-1j * beta / TWO_PI * g_hat, n)
        v = v + 0.5 * mass * erf(t / (sigma * math.sqrt(2.0)))

    v = v - v.mean()
    if cfg.constant_policy == "fixed-value":
        v = v + cfg.constant_value

    modes: list[tuple[float, int]] = [(0.0, 0)]
    for i in null:
        x = float(xi[i])
        mult = max(1, estimate_multiplicity(spec, x, 1e-3 / (2.0 * T)))
        for deg in range(mult):
            modes.extend([(-x, deg), (x, deg)])
    modes.sort()

    particular = GridFunction(F.a, F.b, v)
    res = _residual(s, particular, F, cfg, q) if residual else math.nan
    return AntiderivativeResult(particular, modes, res, s.base.name, s.epsilon, cfg)


def homogeneous_basis(k: KernelProfile, epsilon: float, window: float,
                      resolution: int = 64) -> list[tuple[float, int]]:
    """``(xi, degree)`` pairs of the modes ``t**degree exp(2 pi i xi t)`` with ``|xi| < window``."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    zs = find_zeros(k, epsilon * window, resolution)
    limit = window * (1.0 - 1e-9)
    out = []
    for x, m in zs.scaled(epsilon):
        if abs(x) < limit:
            out.extend((x, deg) for deg in range(max(m, 1)))
    # A vanishes to first order at 0 but only the constant is a null mode there
    out = [(x, d) for x, d in out if x != 0.0] + [(0.0, 0)]
    return sorted(out)


def exp_arctan(epsilon: float, t):
    """Antiderivative of ``1/(1+t^2)`` for the exponential kernel."""
    t = np.asarray(t, dtype=float)
    return np.arctan(t) + 2.0 * epsilon**2 * t / (1.0 + t * t) ** 2


REFERENCES: dict[str, Callable] = {"exp-arctan": exp_arctan}


def closed_form_reference(name: str, epsilon: float, t):
    try:
        ref = REFERENCES[name]
    except KeyError:
        raise ValueError(f"unknown reference {name!r}; expected one of {', '.join(REFERENCES)}") from None
    out = ref(epsilon, t)
    return float(out) if np.ndim(out) == 0 else out


def exponential_identity(antiderivative: Callable, derivative: Callable, epsilon: float) -> Callable:
    """``v_eps = int F - eps^2 F'`` for the exponential kernel, from ``int F`` and ``F'``."""

    def v(t):
        t = np.asarray(t, dtype=float)
        return antiderivative(t) - epsilon**2 * derivative(t)

    return v


def smoothness_shift(k: KernelProfile) -> float:
    """Order ``1 + k_alpha`` of the large-|xi| growth of the solve multiplier.

    Positive values roughen (the solution is as smooth as F differentiated
    that many times), negative values smooth.
    """
    if k.flatness is None:
        raise KernelError(f"kernel {k.name!r} has no flatness record")
    return 1.0 + k.flatness.k_alpha


__all__ = [
    "SolverConfig",
    "AntiderivativeResult",
    "SolverError",
    "PeriodizationWarning",
    "solve",
    "homogeneous_basis",
    "closed_form_reference",
    "exponential_identity",
    "smoothness_shift",
]
