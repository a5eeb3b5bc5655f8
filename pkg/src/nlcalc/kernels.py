"""Anti-symmetric kernel profiles, their moments, scaling and admissibility checks."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .quadrature import integrate_from_zero, truncation_radius


class DecayClass(str, enum.Enum):
    COMPACT = "compact"
    EXPONENTIAL = "exponential-type"


class FlatnessCase(str, enum.Enum):
    FINITE_LIMIT = "finite-limit"
    SINGULAR = "singular"


class KernelError(ValueError):
    pass


@dataclass(frozen=True)
class Flatness:
    """Power-gauge of the profile near ``s = 0+``.

    ``finite-limit``: ``-K_minus s^k <= alpha(s) - alpha(0+) <= -K_plus s^k`` on
    (0, b_alpha) with ``k > 0``.  ``singular``: ``K_minus s^k <= alpha(s) <=
    K_plus s^k`` with ``-2 < k < 0``.
    """

    k_alpha: float
    b_alpha: float
    K_plus: float
    K_minus: float
    case: FlatnessCase

    def __post_init__(self):
        object.__setattr__(self, "case", FlatnessCase(self.case))
        if not (self.b_alpha > 0 and self.K_plus > 0 and self.K_minus > 0):
            raise KernelError("b_alpha, K_plus and K_minus must be positive")
        if self.case is FlatnessCase.FINITE_LIMIT:
            if not self.k_alpha > 0:
                raise KernelError("finite-limit flatness needs k_alpha > 0")
            if self.K_minus < self.K_plus:
                raise KernelError("finite-limit flatness needs K_minus >= K_plus")
        else:
            if not -2.0 < self.k_alpha < 0.0:
                raise KernelError("singular flatness needs -2 < k_alpha < 0")
            if self.K_minus > self.K_plus:
                raise KernelError("singular flatness needs K_minus <= K_plus")

    def to_dict(self) -> dict:
        return {
            "k_alpha": self.k_alpha,
            "b_alpha": self.b_alpha,
            "K_plus": self.K_plus,
            "K_minus": self.K_minus,
            "case": self.case.value,
        }


@dataclass(frozen=True, eq=False)
class KernelProfile:
    """Unscaled kernel ``alpha`` with its metadata.

    ``profile`` must be vectorised and odd.  Moments are memoised in
    ``moment_cache``; concurrent fills are idempotent so no lock is taken.
    """

    name: str
    profile: Callable[[np.ndarray], np.ndarray]
    support_radius: float
    decay_class: DecayClass
    flatness: Flatness | None = None
    params: dict = field(default_factory=dict)
    breakpoints: tuple[float, ...] = ()
    moment_cache: dict = field(default_factory=dict, repr=False)

    def __call__(self, s):
        return self.profile(np.asarray(s, dtype=float))

    @property
    def singular_exponent(self) -> float | None:
        """Leading power of ``alpha`` at 0+ when it blows up, else None."""
        f = self.flatness
        if f is not None and f.case is FlatnessCase.SINGULAR:
            return f.k_alpha
        return None

    @property
    def a_alpha(self) -> float:
        if math.isfinite(self.support_radius):
            return self.support_radius
        return 1.0

    def effective_radius(self, weight_power: int = 0) -> float:
        """Integration cut-off for ``|s^j alpha(s)|`` (support or 1e-16 truncation)."""
        if math.isfinite(self.support_radius):
            return self.support_radius
        key = ("radius", weight_power)
        if key not in self.moment_cache:
            g = lambda s: s**weight_power * self.profile(s)  # noqa: E731
            r = truncation_radius(g)
            s = np.linspace(0.5 * r, r, 1025)
            peak = float(np.max(np.abs(g(np.linspace(0.0, r, 4097)[1:]))))
            above = np.flatnonzero(np.abs(g(s)) >= 1e-16 * peak)
            cut = float(s[min(above[-1] + 1, s.size - 1)]) if above.size else float(s[0])
            self.moment_cache[key] = cut
        return self.moment_cache[key]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "params": dict(self.params),
            "support_radius": self.support_radius if math.isfinite(self.support_radius) else "infinite",
            "decay_class": self.decay_class.value,
            "flatness": self.flatness.to_dict() if self.flatness else None,
        }


# ---------------------------------------------------------------------------
# catalogue


def _indicator(s):
    return np.where(np.abs(s) < 1.0, s, 0.0)


def _exponential(s):
    return np.sign(s) * np.exp(-np.abs(s))


def _sine(s):
    return np.where(np.abs(s) < 1.0, np.sin(np.pi * s), 0.0)


def _power(k: float):
    def alpha(s):
        a = np.abs(s)
        inside = (a > 0.0) & (a < 1.0)
        out = np.zeros_like(a)
        out[inside] = a[inside] ** k
        return np.sign(s) * out

    return alpha


def _flat(s):
    a = np.abs(s)
    inside = (a > 0.0) & (a < 1.0)
    out = np.zeros_like(a)
    with np.errstate(divide="ignore", over="ignore"):
        out[inside] = 1.0 - np.exp(-a[inside] ** -2.0)
    return np.sign(s) * out


CATALOGUE = ("indicator", "exponential", "sine", "power", "flat")


def builtin_kernel(name: str, k_alpha: float | None = None) -> KernelProfile:
    """Catalogue kernels.

    ``power`` needs ``k_alpha`` in (-2, 0) U (0, inf) and is
    ``sgn(s)|s|^k 1_(0,1)(|s|)``.  ``flat`` is the non-admissible example
    ``sgn(s)(1 - exp(-s^-2)) 1_(0,1)(|s|)`` and carries no flatness record.
    """
    if name == "indicator":
        return KernelProfile("indicator", _indicator, 1.0, DecayClass.COMPACT,
                             breakpoints=(1.0,))
    if name == "exponential":
        # 1 - e^{-s} lies between (1 - e^{-1}) s and s on (0, 1)
        flat = Flatness(1.0, 1.0, 1.0 - math.exp(-1.0), 1.0, FlatnessCase.FINITE_LIMIT)
        return KernelProfile("exponential", _exponential, math.inf, DecayClass.EXPONENTIAL, flat)
    if name == "sine":
        return KernelProfile("sine", _sine, 1.0, DecayClass.COMPACT, breakpoints=(1.0,))
    if name == "power":
        if k_alpha is None:
            raise KernelError("power kernel needs k_alpha")
        k = float(k_alpha)
        if not (-2.0 < k < 0.0 or k > 0.0) or not math.isfinite(k):
            raise KernelError(f"k_alpha={k} outside (-2, 0) U (0, inf)")
        case = FlatnessCase.SINGULAR if k < 0 else FlatnessCase.FINITE_LIMIT
        flat = Flatness(k, 1.0, 1.0, 1.0, case)
        return KernelProfile("power", _power(k), 1.0, DecayClass.COMPACT, flat,
                             params={"k_alpha": k}, breakpoints=(1.0,))
    if name == "flat":
        return KernelProfile("flat", _flat, 1.0, DecayClass.COMPACT, breakpoints=(1.0,))
    raise KernelError(f"unknown kernel {name!r}; expected one of {', '.join(CATALOGUE)}")


def tabulated_kernel(s_values, values, support_radius: float | None = None,
                     flatness: Flatness | None = None, name: str = "tabulated") -> KernelProfile:
    """Kernel from samples of alpha on s > 0, extended oddly.

    Between samples a monotone cubic (PCHIP) interpolant is used; below the
    first sample the first value is held; beyond ``support_radius`` (default:
    last sample) the profile vanishes.
    """
    from scipy.interpolate import PchipInterpolator

    s_values = np.asarray(s_values, dtype=float)
    values = np.asarray(values, dtype=float)
    order = np.argsort(s_values)
    s_values, values = s_values[order], values[order]
    if s_values[0] <= 0 or s_values.size < 2:
        raise KernelError("tabulated kernel needs at least two samples at s > 0")
    radius = float(s_values[-1] if support_radius is None else support_radius)
    interp = PchipInterpolator(s_values, values, extrapolate=False)
    first, last = s_values[0], s_values[-1]

    def alpha(s):
        a = np.abs(s)
        out = interp(np.clip(a, first, last))
        out = np.where(a < first, values[0], out)
        out = np.where((a > last) | (a >= radius), 0.0, out)
        out = np.where(a == 0.0, 0.0, out)
        return np.sign(s) * out

    decay = DecayClass.COMPACT if math.isfinite(radius) else DecayClass.EXPONENTIAL
    return KernelProfile(name, alpha, radius, decay, flatness,
                         breakpoints=(radius,) if math.isfinite(radius) else ())


def load_tabulated_kernel(path: str | Path, support_radius: float | None = None,
                          flatness: Flatness | None = None) -> KernelProfile:
    """Read a ``s,value`` CSV (header optional)."""
    s_vals, vals = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                s_vals.append(float(row[0]))
                vals.append(float(row[1]))
            except ValueError:
                continue  # header line
    return tabulated_kernel(s_vals, vals, support_radius, flatness, name=Path(path).stem)


# ---------------------------------------------------------------------------
# moments and scaling


def moment(k: KernelProfile, j: int, absolute: bool = False, tol: float = 1e-15) -> float:
    """``alpha_(j) = int s^j alpha`` or ``|alpha|_(j) = int |s|^j |alpha|``.

    Only the half line is integrated: odd ``j`` doubles the (0, inf) part,
    even ``j`` is exactly zero for the signed moment.
    """
    j = int(j)
    if j < 0:
        raise KernelError("moment order must be nonnegative")
    sing = k.singular_exponent
    if sing is not None and j + sing <= -1.0:
        raise KernelError(f"moment j={j} diverges for k_alpha={sing}")
    key = (j, bool(absolute))
    if key in k.moment_cache:
        return k.moment_cache[key]
    if not absolute and j % 2 == 0:
        value = 0.0
    else:
        radius = k.effective_radius(j)
        if absolute:
            f = lambda s: s**j * np.abs(k.profile(s))  # noqa: E731
        else:
            f = lambda s: s**j * k.profile(s)  # noqa: E731
        exponent = None if sing is None else j + sing
        half = integrate_from_zero(f, radius, exponent, tol=tol * max(1.0, radius),
                                   breakpoints=k.breakpoints, order=20)
        value = 2.0 * float(half)
    k.moment_cache[key] = value
    return value


@dataclass(frozen=True, eq=False)
class ScaledKernel:
    """``alpha_eps(s) = sigma * alpha(s / eps)`` with ``sigma = 1/(eps^2 alpha_(1))``."""

    base: KernelProfile
    epsilon: float

    @property
    def dipole(self) -> float:
        return moment(self.base, 1)

    @property
    def sigma(self) -> float:
        return 1.0 / (self.epsilon**2 * self.dipole)

    @property
    def support_radius(self) -> float:
        return self.epsilon * self.base.support_radius

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        return self.sigma * self.base.profile(s / self.epsilon)

    def rescale(self, factor: float) -> "ScaledKernel":
        return ScaledKernel(self.base, self.epsilon * factor)


def scale(k: KernelProfile, epsilon: float) -> ScaledKernel:
    if not (epsilon > 0 and math.isfinite(epsilon)):
        raise KernelError("epsilon must be positive and finite")
    a1 = moment(k, 1)
    if a1 == 0.0 or not math.isfinite(a1):
        raise KernelError(f"dipole moment {a1} is zero or not finite")
    return ScaledKernel(k, float(epsilon))


# ---------------------------------------------------------------------------
# admissibility


@dataclass(frozen=True)
class CheckConfig:
    samples: int = 4096
    j_max: int = 12
    tol: float = 1e-12
    sandwich_rtol: float = 1e-9


@dataclass
class AdmissibilityReport:
    kernel: str
    antisymmetry_ok: bool
    antisymmetry_violation: float
    dipole_ok: bool
    dipole: float
    analytic_class_ok: bool
    analytic_ratios: list[float]
    analytic_constant: float
    positivity_ok: bool
    positivity_detail: str
    flatness_ok: bool
    flatness_detail: dict

    @property
    def admissible(self) -> bool:
        return all(self.flags.values())

    @property
    def flags(self) -> dict[str, bool]:
        return {
            "antisymmetry": self.antisymmetry_ok,
            "dipole": self.dipole_ok,
            "analytic_class": self.analytic_class_ok,
            "positivity": self.positivity_ok,
            "flatness": self.flatness_ok,
        }

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel,
            "admissible": self.admissible,
            "antisymmetry_ok": self.antisymmetry_ok,
            "antisymmetry_violation": self.antisymmetry_violation,
            "dipole_ok": self.dipole_ok,
            "dipole": self.dipole,
            "analytic_class_ok": self.analytic_class_ok,
            "analytic_ratios": self.analytic_ratios,
            "analytic_constant": self.analytic_constant,
            "positivity_ok": self.positivity_ok,
            "positivity_detail": self.positivity_detail,
            "flatness_ok": self.flatness_ok,
            "flatness_detail": self.flatness_detail,
        }


def _sample_radius(k: KernelProfile) -> float:
    if math.isfinite(k.support_radius):
        return k.support_radius
    return min(k.effective_radius(0), 64.0)


def _half_grid(k: KernelProfile, n: int) -> np.ndarray:
    r = _sample_radius(k)
    uniform = np.linspace(0.0, r, n + 1)[1:]
    near_zero = r * np.logspace(-8, -2, 64)
    return np.unique(np.concatenate([near_zero, uniform]))


def _check_antisymmetry(k, cfg):
    s = _half_grid(k, cfg.samples // 2)
    plus, minus = k(s), k(-s)
    scale_ = max(float(np.max(np.abs(plus))), np.finfo(float).tiny)
    violation = float(np.max(np.abs(plus + minus))) / scale_
    return violation <= cfg.tol, violation


def _check_positivity(k, cfg):
    s = _half_grid(k, cfg.samples)
    beta = k(s)
    if np.any(beta < 0):
        return False, "beta takes negative values"
    peak = float(np.max(beta))
    rises = np.diff(beta) > cfg.tol * peak
    if rises.any():
        where = float(s[1:][rises][0])
        return False, f"beta increases near s={where:.6g}"
    a = k.a_alpha
    inner = s < a
    steps = np.diff(beta[inner])
    if steps.size == 0 or np.mean(steps < 0) < 0.99:
        return False, f"beta not strictly decreasing on (0, {a:g})"
    return True, f"beta nonnegative, decreasing, strictly decreasing on (0, {a:g})"


def _limit_at_zero(k: KernelProfile, b: float) -> float:
    return float(k(np.array([b * 1e-12]))[0])


def infer_flatness(k: KernelProfile, b: float | None = None) -> Flatness | None:
    """Fit a power gauge to the profile near 0+, or None if none exists.

    The exponent is the log-log slope of ``alpha0+ - alpha`` (finite limit)
    or ``alpha`` (blow-up) on (1e-6 b, b); a gauge is accepted only if the
    fitted constants stay within a factor 4 of each other and satisfy the
    two-point condition on (0, 1).
    """
    b = k.a_alpha if b is None else b
    s = b * np.logspace(-6, 0, 200)[:-1]
    vals = k(s)
    a0 = _limit_at_zero(k, b)
    big = abs(a0) > 1e6 * max(1.0, abs(float(vals[-1])))
    if big:
        g, case = vals, FlatnessCase.SINGULAR
    else:
        g, case = a0 - vals, FlatnessCase.FINITE_LIMIT
    if np.any(g <= 0) or not np.all(np.isfinite(g)):
        return None
    slope = float(np.polyfit(np.log(s), np.log(g), 1)[0])
    if case is FlatnessCase.SINGULAR and not -2.0 < slope < 0.0:
        return None
    if case is FlatnessCase.FINITE_LIMIT and not slope > 0.0:
        return None
    ratio = g / s**slope
    lo_c, hi_c = float(ratio.min()), float(ratio.max())
    if hi_c > 4.0 * lo_c:
        return None
    if case is FlatnessCase.SINGULAR:
        flat = Flatness(slope, b, hi_c, lo_c, case)
    else:
        flat = Flatness(slope, b, lo_c, hi_c, case)
    return flat


def _k_inequality(flat: Flatness, n: int = 2000) -> float:
    s = np.linspace(0.0, 1.0, n + 1)[1:]
    k = flat.k_alpha
    if flat.case is FlatnessCase.FINITE_LIMIT:
        vals = flat.K_plus * (s + 1.0) ** k - flat.K_minus * s**k
    else:
        vals = flat.K_minus * s**k - flat.K_plus * (s + 1.0) ** k
    return float(vals.min())


def _check_flatness(k: KernelProfile, cfg: CheckConfig):
    detail: dict = {}
    flat = k.flatness
    if flat is None:
        flat = infer_flatness(k)
        detail["inferred"] = True
        if flat is None:
            detail["reason"] = "no power gauge fits the profile near 0+"
            return False, detail
    detail["record"] = flat.to_dict()
    if flat.b_alpha > k.a_alpha * (1 + 1e-12):
        detail["reason"] = "b_alpha exceeds a_alpha"
        return False, detail
    s = flat.b_alpha * np.logspace(-6, 0, cfg.samples // 8)[:-1]
    vals = k(s)
    kk = flat.k_alpha
    if flat.case is FlatnessCase.FINITE_LIMIT:
        g = _limit_at_zero(k, flat.b_alpha) - vals
    else:
        g = vals
    lower, upper = (flat.K_plus * s**kk, flat.K_minus * s**kk)
    if flat.case is FlatnessCase.SINGULAR:
        lower, upper = flat.K_minus * s**kk, flat.K_plus * s**kk
    slack = cfg.sandwich_rtol * np.abs(upper)
    sandwich = bool(np.all(g >= lower - slack) and np.all(g <= upper + slack))
    kmin = _k_inequality(flat)
    detail["sandwich_ok"] = sandwich
    detail["k_inequality_min"] = kmin
    return sandwich and kmin >= -cfg.tol, detail


def check_admissibility(k: KernelProfile, config: CheckConfig | None = None) -> AdmissibilityReport:
    """Evaluate every admissibility flag; failures are reported, never raised."""
    cfg = config or CheckConfig()
    anti_ok, violation = _check_antisymmetry(k, cfg)

    try:
        a1 = moment(k, 1)
    except Exception:  # noqa: BLE001 - a divergent moment is a failed flag
        a1 = math.nan
    dipole_ok = math.isfinite(a1) and abs(a1) > cfg.tol

    # surrogate for int |s^j alpha| <= A j!: A from j = 1, tail must not exceed it
    ratios = []
    for j in range(1, cfg.j_max + 1):
        try:
            ratios.append(moment(k, j, absolute=True) / math.factorial(j))
        except Exception:  # noqa: BLE001
            ratios.append(math.inf)
    a_fit = ratios[0]
    analytic_ok = (
        all(math.isfinite(r) for r in ratios)
        and ratios[-1] <= a_fit * (1 + 1e-8)
        and ratios[-1] <= ratios[-2] * (1 + 1e-8)
    )

    pos_ok, pos_detail = _check_positivity(k, cfg)
    flat_ok, flat_detail = _check_flatness(k, cfg)
    return AdmissibilityReport(
        kernel=k.name,
        antisymmetry_ok=anti_ok,
        antisymmetry_violation=violation,
        dipole_ok=dipole_ok,
        dipole=a1,
        analytic_class_ok=analytic_ok,
        analytic_ratios=ratios,
        analytic_constant=a_fit,
        positivity_ok=pos_ok,
        positivity_detail=pos_detail,
        flatness_ok=flat_ok,
        flatness_detail=flat_detail,
    )
