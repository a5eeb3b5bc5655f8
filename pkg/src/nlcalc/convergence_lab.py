"""epsilon-sweeps checking that the nonlocal calculus converges to the classical one."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from . import functions as fn
from .antiderivative import SolverConfig, solve
from .derivative import GridFunction, QuadratureConfig, apply, taylor_bound, weak_pairing
from .kernels import KernelProfile, scale
from .spectral import find_scaled_zeros, find_zeros

FLOOR_LIMITED = "floor-limited"


def dyadic(k_min: int, k_max: int) -> list[float]:
    """``[2**-k_min, ..., 2**-k_max]``."""
    return [2.0**-k for k in range(k_min, k_max + 1)]


def max_threads() -> int:
    try:
        return max(1, int(os.environ.get("NLCALC_THREADS", "1")))
    except ValueError:
        return 1


def _map_eps(task: Callable[[float], dict], epsilons: Sequence[float]) -> list[dict]:
    """Run ``task`` for every epsilon, returning results in epsilon order."""
    workers = min(max_threads(), len(epsilons))
    if workers <= 1:
        return [task(e) for e in epsilons]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, epsilons))


def _validate_epsilons(epsilons: Sequence[float]) -> list[float]:
    eps = [float(e) for e in epsilons]
    if not eps:
        raise ValueError("need at least one epsilon")
    if any(not e > 0 for e in eps):
        raise ValueError("epsilons must be positive")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("epsilons must be strictly decreasing")
    return eps


def fitted_order(epsilons: Sequence[float], errors: Sequence[float],
                 floor: float = 1e-13) -> float | None:
    """Least-squares slope of log(error) against log(eps).

    Returns None (floor-limited) with fewer than four points or when the
    smallest error is within 100x of ``floor``.
    """
    errs = np.asarray(errors, dtype=float)
    if errs.size < 4 or errs.min() <= 100.0 * floor:
        return None
    slope, _ = np.polyfit(np.log(np.asarray(epsilons, dtype=float)), np.log(errs), 1)
    return float(slope)


@dataclass
class SweepReport:
    kernel: str
    experiment: str
    epsilons: list[float]
    errors: list[dict[str, float]]
    fitted_order: float | None = None
    order_norm: str = "sup"
    bound_checks: list[bool] | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        _validate_epsilons(self.epsilons)
        if len(self.errors) != len(self.epsilons):
            raise ValueError("one error record per epsilon")
        for rec in self.errors:
            for name, v in rec.items():
                if v < 0 or math.isnan(v):
                    raise ValueError(f"error {name!r} must be nonnegative, got {v}")

    def series(self, norm: str) -> list[float]:
        return [rec[norm] for rec in self.errors]

    @property
    def order_status(self) -> str:
        return FLOOR_LIMITED if self.fitted_order is None else "fitted"

    @property
    def bounds_hold(self) -> bool | None:
        return None if self.bound_checks is None else all(self.bound_checks)

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel,
            "experiment": self.experiment,
            "epsilons": self.epsilons,
            "errors": self.errors,
            "fitted_order": self.fitted_order,
            "order_norm": self.order_norm,
            "order_status": self.order_status,
            "bound_checks": self.bound_checks,
            "extra": self.extra,
        }


def _region_points(region, n_points: int) -> tuple[list[np.ndarray], np.ndarray]:
    """Sample each interval of ``region`` (one (a, b) pair or a list of them)."""
    if len(region) == 2 and np.isscalar(region[0]):
        region = [region]
    parts = [np.linspace(float(a), float(b), n_points) for a, b in region]
    return parts, np.concatenate(parts)


def _trapz(y: np.ndarray, x: np.ndarray) -> float:
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(x)))


def derivative_sweep(k: KernelProfile, u: Callable, u_prime: Callable, epsilons: Sequence[float],
                     region=(-5.0, 5.0), n_points: int = 801, sup_u2: float | None = None,
                     q: QuadratureConfig | None = None, experiment: str = "derivative") -> SweepReport:
    """Sup and L2 errors of ``D_{alpha,eps} u - u'`` on ``region``.

    ``region`` is an interval or a list of intervals.  When ``sup_u2`` (a bound
    on ``|u''|``) is known, every epsilon is checked against the Taylor bound.
    """
    eps_list = _validate_epsilons(epsilons)
    q = q or QuadratureConfig()
    parts, pts = _region_points(region, n_points)
    exact = u_prime(pts)
    if sup_u2 is None:
        sup_u2 = getattr(u, "d2f_sup", None)

    def task(eps: float) -> dict:
        s = scale(k, eps)
        err = np.abs(apply(s, u, pts, q) - exact)
        l2sq, start = 0.0, 0
        for p in parts:
            l2sq += _trapz(err[start:start + p.size] ** 2, p)
            start += p.size
        rec = {"sup": float(err.max()), "L2": math.sqrt(l2sq)}
        if sup_u2 is not None:
            rec["taylor_bound"] = taylor_bound(s, sup_u2)
        return rec

    errors = _map_eps(task, eps_list)
    checks = None
    if sup_u2 is not None:
        # quadrature error is not part of the analytic bound; allow it as slack
        checks = [rec["sup"] <= rec["taylor_bound"] + 10.0 * q.tolerance for rec in errors]
    order = fitted_order(eps_list, [r["sup"] for r in errors], q.tolerance)
    return SweepReport(k.name, experiment, eps_list, errors, order, "sup", checks,
                       {"region": [list(map(float, (p[0], p[-1]))) for p in parts],
                        "n_points": n_points})


def _bump_grids(t: np.ndarray, a: float, b: float,
                test_functions: Mapping[str, Callable]) -> dict[str, GridFunction]:
    return {name: GridFunction(a, b, psi(t)) for name, psi in test_functions.items()}


def antiderivative_sweep(k: KernelProfile, F: Callable, v_ref: Callable, epsilons: Sequence[float],
                         p_norms: Sequence[float] = (2.0,), test_functions: Mapping | None = None,
                         cfg: SolverConfig | None = None, inner: float = 0.8,
                         q: QuadratureConfig | None = None,
                         experiment: str = "antiderivative") -> SweepReport:
    """Strong and weak errors of the nonlocal antiderivative against ``v_ref``.

    The difference ``v_eps - v`` is restricted to ``|t| <= inner * T`` and has
    its mean removed there (the solutions share an arbitrary constant).
    """
    eps_list = _validate_epsilons(epsilons)
    cfg = cfg or SolverConfig(half_width=16.0, n=2**12)
    tests = dict(fn.BUMPS if test_functions is None else test_functions)
    Fg = cfg.sample(F)
    t = Fg.t
    ref = np.asarray(v_ref(t), dtype=float)
    mask = np.abs(t) <= inner * cfg.half_width
    bumps = _bump_grids(t, Fg.a, Fg.b, tests)

    def task(eps: float) -> dict:
        res = solve(scale(k, eps), Fg, cfg, q, residual=False)
        diff = res.particular.values - ref
        diff = diff - diff[mask].mean()
        d = np.where(mask, diff, 0.0)
        rec = {}
        for p in p_norms:
            p = float(p)
            if math.isinf(p):
                rec["Linf"] = float(np.abs(d).max())
            else:
                rec[f"L{p:g}"] = float((np.sum(np.abs(d) ** p) * Fg.h) ** (1.0 / p))
        dg = GridFunction(Fg.a, Fg.b, d)
        for name, psi in bumps.items():
            rec[f"weak:{name}"] = abs(weak_pairing(dg, psi))
        return rec

    errors = _map_eps(task, eps_list)
    first = f"L{float(p_norms[0]):g}" if not math.isinf(float(p_norms[0])) else "Linf"
    order = fitted_order(eps_list, [r[first] for r in errors], 1e-13)
    return SweepReport(k.name, experiment, eps_list, errors, order, first, None,
                       {"solver": cfg.to_dict(), "inner": inner, "test_functions": sorted(tests)})


def zero_scaling_sweep(k: KernelProfile, epsilons: Sequence[float], window: float = 2.5,
                       count: int = 3, resolution: int = 64) -> SweepReport:
    """``|eps * xi_{j,eps} - xi_j|`` for the first ``count`` nonzero positive zeros.

    ``window`` bounds the unscaled zeros searched; the scaled search window is
    ``window / eps`` with the same number of samples.
    """
    eps_list = _validate_epsilons(epsilons)
    ref = find_zeros(k, window, resolution).nonzero()[:count]

    def task(eps: float) -> dict:
        zs = [x for x, _ in find_scaled_zeros(scale(k, eps), window / eps, resolution * eps)
              if x > 0][:count]
        rec = {"zero_0": 0.0}
        for j, (x, xbar) in enumerate(zip(zs, ref), start=1):
            rec[f"zero_{j}"] = abs(eps * x - xbar)
        rec["found"] = float(len(zs))
        return rec

    errors = _map_eps(task, eps_list)
    return SweepReport(k.name, "zero-scaling", eps_list, errors, None, "zero_1", None,
                       {"unscaled_zeros": ref, "window": window})


def mode_pairing_sweep(k: KernelProfile, epsilons: Sequence[float], j: int = 1,
                       test_functions: Mapping | None = None, half_width: float = 4.0,
                       n: int = 2**14, window: float = 4.0) -> SweepReport:
    """``|(exp(2 pi i xi_{j,eps} t), psi)|`` for the j-th nonzero homogeneous mode.

    The complex pairing is assembled from the cosine and sine pairings.
    """
    eps_list = _validate_epsilons(epsilons)
    zs = find_zeros(k, window).nonzero()
    if len(zs) < j:
        raise ValueError(f"kernel {k.name!r} has fewer than {j} nonzero zeros below {window:g}")
    xbar = zs[j - 1]
    tests = dict(fn.BUMPS if test_functions is None else test_functions)
    a, b = -half_width, half_width
    t = a + (b - a) / n * np.arange(n)
    bumps = _bump_grids(t, a, b, tests)

    def task(eps: float) -> dict:
        w = 2.0 * math.pi * xbar / eps
        c, s = GridFunction(a, b, np.cos(w * t)), GridFunction(a, b, np.sin(w * t))
        return {f"weak:{name}": math.hypot(weak_pairing(c, psi), weak_pairing(s, psi))
                for name, psi in bumps.items()}

    errors = _map_eps(task, eps_list)
    return SweepReport(k.name, "mode-pairing", eps_list, errors, None, "weak", None,
                       {"mode": j, "unscaled_zero": xbar})


def figure_gradcon(epsilons: Sequence[float] = (1.0, 0.5, 0.25), t=None,
                   q: QuadratureConfig | None = None) -> dict[str, np.ndarray]:
    """Curves of ``D_{alpha,eps}|t|^(1/2)`` for the indicator kernel, plus the classical slope.

    Returns ordered columns: ``t``, ``classical`` and one ``eps=<value>``
    column per epsilon.
    """
    from .kernels import builtin_kernel

    eps_list = _validate_epsilons(epsilons)
    t = np.linspace(-3.0, 3.0, 601) if t is None else np.asarray(t, dtype=float)
    u = fn.get("sqrt-abs")
    k = builtin_kernel("indicator")
    cols = _map_eps(lambda e: {"v": apply(scale(k, e), u, t, q)}, eps_list)
    data = {"t": t, "classical": u.df(t)}
    for e, c in zip(eps_list, cols):
        data[f"eps={e:g}"] = c["v"]
    return data


__all__ = [
    "SweepReport",
    "dyadic",
    "fitted_order",
    "derivative_sweep",
    "antiderivative_sweep",
    "zero_scaling_sweep",
    "mode_pairing_sweep",
    "figure_gradcon",
    "FLOOR_LIMITED",
]
