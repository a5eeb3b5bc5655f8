"""Named test functions with their derivatives, antiderivatives and kinks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import erf


@dataclass(frozen=True)
class TestFunction:
    name: str
    f: Callable[[np.ndarray], np.ndarray]
    df: Callable[[np.ndarray], np.ndarray] | None = None
    d2f_sup: float | None = None
    antiderivative: Callable[[np.ndarray], np.ndarray] | None = None
    kinks: tuple[float, ...] = ()

    __test__ = False  # not a pytest class

    def __call__(self, t):
        return self.f(np.asarray(t, dtype=float))


def _sqrt_abs_prime(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    nz = t != 0
    out[nz] = 0.5 * np.sign(t[nz]) / np.sqrt(np.abs(t[nz]))
    return out


def _const(c):
    return lambda t: np.full_like(np.asarray(t, dtype=float), c)


CATALOGUE: dict[str, TestFunction] = {
    "zero": TestFunction("zero", _const(0.0), _const(0.0), 0.0, _const(0.0)),
    "constant": TestFunction("constant", _const(1.0), _const(0.0), 0.0, lambda t: np.asarray(t, float)),
    "linear": TestFunction("linear", lambda t: np.asarray(t, float), _const(1.0), 0.0,
                           lambda t: 0.5 * np.asarray(t, float) ** 2),
    "gaussian": TestFunction(
        "gaussian",
        lambda t: np.exp(-np.asarray(t, float) ** 2),
        lambda t: -2 * np.asarray(t, float) * np.exp(-np.asarray(t, float) ** 2),
        2.0,
        lambda t: 0.5 * np.sqrt(np.pi) * erf(np.asarray(t, float)),
    ),
    "runge": TestFunction(
        "runge",
        lambda t: 1.0 / (1.0 + np.asarray(t, float) ** 2),
        lambda t: -2 * np.asarray(t, float) / (1.0 + np.asarray(t, float) ** 2) ** 2,
        2.0,
        lambda t: np.arctan(np.asarray(t, float)),
    ),
    "sqrt-abs": TestFunction("sqrt-abs", lambda t: np.sqrt(np.abs(np.asarray(t, float))),
                             _sqrt_abs_prime, None, None, kinks=(0.0,)),
}


def get(name: str) -> TestFunction:
    try:
        return CATALOGUE[name]
    except KeyError:
        raise ValueError(f"unknown function {name!r}; expected one of {', '.join(CATALOGUE)}") from None


def plateau(t, center: float = 0.0, radius: float = 1.0):
    """C-infinity bump ``exp(-1/(1 - x^2))`` on ``|x| < 1``, ``x = (t - c)/r``."""
    x = (np.asarray(t, dtype=float) - center) / radius
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - x[inside] ** 2))
    return out


# polynomial-times-plateau test functions for weak pairings
BUMPS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "bump": lambda t: plateau(t, 0.0, 1.0),
    "odd-bump": lambda t: np.asarray(t, float) * plateau(t, 0.0, 2.0),
    "shifted-bump": lambda t: (np.asarray(t, float) ** 2 - 0.5) * plateau(t, 0.5, 1.5),
}
