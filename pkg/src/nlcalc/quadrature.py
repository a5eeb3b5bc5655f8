"""Adaptive composite Gauss-Legendre quadrature.

Integrands are vectorised: ``f(s)`` receives a 1-D array of nodes and returns
an array whose last axis matches ``s``.  Leading axes are carried through, so a
single call can integrate a whole batch (many output points, many
frequencies) over a shared set of panels.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Iterable

import numpy as np

DEFAULT_ORDER = 16


class QuadratureError(RuntimeError):
    """Raised when the panel budget is exhausted before convergence."""


@lru_cache(maxsize=None)
def gauss_legendre_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _panel_sums(f, lo: np.ndarray, hi: np.ndarray, order: int, with_abs: bool = False):
    x, w = gauss_legendre_rule(order)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = mid[:, None] + half[:, None] * x[None, :]
    vals = np.asarray(f(nodes.ravel()), dtype=float)
    vals = vals.reshape(vals.shape[:-1] + nodes.shape)
    total = (vals * w).sum(axis=-1) * half
    if with_abs:
        return total, (np.abs(vals) * w).sum(axis=-1) * half
    return total


def gauss_legendre(f, a: float, b: float, order: int = DEFAULT_ORDER,
                   panels: int = 1) -> np.ndarray:
    """Fixed composite rule with ``panels`` equal panels."""
    edges = np.linspace(a, b, panels + 1)
    return _panel_sums(f, edges[:-1], edges[1:], order).sum(axis=-1)


def adaptive_gauss_legendre(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = 1e-13,
    breakpoints: Iterable[float] = (),
    order: int = DEFAULT_ORDER,
    max_panels: int = 200_000,
) -> np.ndarray | float:
    """Integrate ``f`` over [a, b] by dyadic panel refinement.

    Panels start at the breakpoints (restricted to (a, b)) and are halved
    until the two-half estimate agrees with the parent estimate to within
    the panel's share of ``tol``.  For batched integrands the worst entry
    governs refinement.
    """
    if b == a:
        return 0.0
    if b < a:
        return -adaptive_gauss_legendre(f, b, a, tol, breakpoints, order, max_panels)
    length = b - a
    cuts = sorted({float(p) for p in breakpoints if a < p < b})
    edges = np.array([a, *cuts, b], dtype=float)
    lo, hi = edges[:-1], edges[1:]
    est = _panel_sums(f, lo, hi, order)
    prev_err = np.full(lo.size, np.inf)
    total = np.zeros(est.shape[:-1])
    used = lo.size
    eps = np.finfo(float).eps

    while lo.size:
        mid = 0.5 * (lo + hi)
        both, mag = _panel_sums(f, np.concatenate([lo, mid]), np.concatenate([mid, hi]), order,
                                with_abs=True)
        left, right = both[..., : lo.size], both[..., lo.size:]
        fine = left + right
        err = np.abs(fine - est)
        scale = mag[..., : lo.size] + mag[..., lo.size:]
        if err.ndim > 1:
            err = err.reshape(-1, lo.size).max(axis=0)
            scale = scale.reshape(-1, lo.size).max(axis=0)
        width = hi - lo
        # the max_panels floor keeps the summed error below tol whatever the widths
        ok = (err <= tol * np.maximum(width / length, 1.0 / max_panels)) | (err <= 64 * eps * scale)
        # stagnating estimates near roundoff level are noise, not truncation error
        ok |= (err >= 0.5 * prev_err) & (err <= 1e4 * eps * scale)
        # panels at roundoff width cannot be refined further
        ok |= width <= 1e-15 * max(abs(a), abs(b), length)
        total = total + fine[..., ok].sum(axis=-1)
        bad = ~ok
        if not bad.any():
            break
        used += 2 * int(bad.sum())
        if used > max_panels:
            raise QuadratureError(
                f"panel budget {max_panels} exhausted on [{a}, {b}] "
                f"(worst error {err[bad].max():.3e}, tol {tol:.1e})"
            )
        lo = np.concatenate([lo[bad], mid[bad]])
        hi = np.concatenate([mid[bad], hi[bad]])
        est = np.concatenate([left[..., bad], right[..., bad]], axis=-1)
        prev_err = np.concatenate([err[bad], err[bad]])

    return total if total.ndim else float(total)


def power_substituted(f: Callable[[np.ndarray], np.ndarray], head: float,
                      exponent: float) -> Callable[[np.ndarray], np.ndarray]:
    """Return g on [0, 1] with ``int_0^1 g = int_0^head f`` for ``f ~ s**exponent``.

    Uses ``s = head * w**p`` with ``p = 1/(1 + exponent)`` so the algebraic
    endpoint behaviour is absorbed into the Jacobian.
    """
    if exponent <= -1.0:
        raise ValueError("integrand is not integrable at 0")
    p = 1.0 / (1.0 + exponent)

    def g(w):
        s = head * w**p
        return f(s) * (head * p * w ** (p - 1.0))

    return g


def integrate_from_zero(
    f: Callable[[np.ndarray], np.ndarray],
    upper: float,
    singular_exponent: float | None = None,
    head: float | None = None,
    tol: float = 1e-13,
    breakpoints: Iterable[float] = (),
    order: int = DEFAULT_ORDER,
    max_panels: int = 200_000,
):
    """Integrate over [0, upper], handling ``f ~ s**singular_exponent`` at 0.

    When the exponent is non-integer the first ``head`` of the interval is
    mapped through :func:`power_substituted`; the remainder is integrated by
    plain adaptive refinement.
    """
    bps = [p for p in breakpoints if 0.0 < p < upper]
    if singular_exponent is None or float(singular_exponent).is_integer():
        return adaptive_gauss_legendre(f, 0.0, upper, tol, bps, order, max_panels)
    if head is None:
        head = min([upper / 8.0, *bps])
    head = min(head, upper, *bps) if bps else min(head, upper)
    g = power_substituted(f, head, singular_exponent)
    first = adaptive_gauss_legendre(g, 0.0, 1.0, tol * head / upper, (), order, max_panels)
    if head >= upper:
        return first
    rest = adaptive_gauss_legendre(f, head, upper, tol, bps, order, max_panels)
    return first + rest


def truncation_radius(g: Callable[[np.ndarray], np.ndarray], rel: float = 1e-16,
                      start: float = 1.0, limit: float = 1e6) -> float:
    """Smallest dyadic R beyond which sampled |g| stays below ``rel * peak``.

    ``g`` is assumed to decay monotonically in the tail; it is sampled on
    [R, 2R] at each doubling step.
    """
    samples = np.linspace(0.0, 1.0, 257)[1:]
    peak = float(np.max(np.abs(g(start * samples))))
    r = start
    while r < limit:
        tail = np.abs(g(r + r * samples))
        peak = max(peak, float(tail.max()))
        if tail.max() < rel * peak and tail[0] < rel * peak:
            return r
        r *= 2.0
    raise QuadratureError(f"integrand does not decay below {rel:g} * peak before {limit:g}")


def series_x_minus_sin(x: np.ndarray) -> np.ndarray:
    """x - sin(x) without cancellation for small |x|."""
    x = np.asarray(x, dtype=float)
    out = x - np.sin(x)
    small = np.abs(x) < 0.5
    if small.any():
        xs = x[small]
        x2 = xs * xs
        term = xs * x2 / 6.0
        acc = term.copy()
        for k in range(1, 12):
            term = -term * x2 / ((2 * k + 2) * (2 * k + 3))
            acc += term
        out[small] = acc
    return out


def cumulative_trapezoid_pv(values: np.ndarray, h: float) -> np.ndarray:
    """Odd-symmetrised running integral: (int_a^t - int_t^b) / 2."""
    c = np.concatenate([[0.0], np.cumsum(0.5 * h * (values[1:] + values[:-1]))])
    return c - 0.5 * c[-1]


__all__ = [
    "QuadratureError",
    "gauss_legendre_rule",
    "gauss_legendre",
    "adaptive_gauss_legendre",
    "power_substituted",
    "integrate_from_zero",
    "truncation_radius",
    "series_x_minus_sin",
    "cumulative_trapezoid_pv",
]
