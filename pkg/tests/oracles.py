"""Independent high-precision reference values (mpmath), used to freeze test constants.

Nothing here imports nlcalc: every quantity is computed from its defining
integral or an analytic formula.
"""

from __future__ import annotations

import mpmath as mp

mp.mp.dps = 30


def alpha(name: str, s, k=None):
    s = mp.mpf(s)
    a = abs(s)
    sg = mp.sign(s)
    if name == "indicator":
        return s if a < 1 else mp.mpf(0)
    if name == "exponential":
        return sg * mp.e ** (-a)
    if name == "sine":
        return mp.sin(mp.pi * s) if a < 1 else mp.mpf(0)
    if name == "power":
        return sg * a ** k if 0 < a < 1 else mp.mpf(0)
    raise ValueError(name)


def _upper(name):
    return mp.inf if name == "exponential" else 1


def moment(name, j, absolute=False, k=None):
    f = (lambda s: s**j * abs(alpha(name, s, k))) if absolute else (lambda s: s**j * alpha(name, s, k))
    half = mp.quad(f, [0, _upper(name)])
    if absolute or j % 2 == 1:
        return 2 * half
    return mp.mpf(0)


def spectrum(name, eps, xi, k=None):
    """A(xi) = (2/(eps a1)) int_0^R sin(2 pi eps xi s) alpha(s) ds, by direct quadrature."""
    eps, xi = mp.mpf(eps), mp.mpf(xi)
    a1 = moment(name, 1, k=k)
    w = 2 * mp.pi * eps * xi
    if name == "exponential":
        val = mp.quadosc(lambda s: mp.sin(w * s) * alpha(name, s), [0, mp.inf], omega=w)
    else:
        n = max(4, int(w / mp.pi) + 2)
        val = mp.quad(lambda s: mp.sin(w * s) * alpha(name, s, k), mp.linspace(0, 1, n))
    return 2 / (eps * a1) * val


def apply(name, eps, u, t, k=None, kinks=()):
    """D u(t) = int_0^R alpha_eps(s)[u(t+s) - u(t-s)] ds."""
    eps, t = mp.mpf(eps), mp.mpf(t)
    a1 = moment(name, 1, k=k)
    sigma = 1 / (eps**2 * a1)
    radius = eps * _upper(name) if name != "exponential" else mp.inf
    pts = sorted({mp.mpf(0), *(abs(t - c) for c in kinks if 0 < abs(t - c) < radius), radius})
    return mp.quad(lambda s: sigma * alpha(name, s / eps, k) * (u(t + s) - u(t - s)), pts)


def far_field_constant_power(k):
    """[1/(2^k a1)] int_0^1 sin(pi s)[s^k - (s+1)^k] ds for the power kernel (K+ = K- = 1)."""
    k = mp.mpf(k)
    a1 = moment("power", 1, k=k)
    integral = mp.quad(lambda s: mp.sin(mp.pi * s) * (s**k - (s + 1) ** k), [0, 1])
    return integral / (2**k * a1)


def argmax_runge_defect():
    """max of t/(1+t^2)^2: attained at t = 1/sqrt(3)."""
    t = mp.findroot(lambda t: mp.diff(lambda x: x / (1 + x**2) ** 2, t), 0.5)
    return t, t / (1 + t**2) ** 2


def gaussian_self_pairing():
    return mp.quad(lambda t: mp.e ** (-2 * t**2), [-8, 8])


if __name__ == "__main__":
    print("moments")
    for args in [("indicator", 1), ("indicator", 3), ("indicator", 2, True), ("exponential", 1),
                 ("exponential", 3), ("exponential", 2, True), ("sine", 1)]:
        print(args, moment(*args))
    print("power a1", moment("power", 1, k=-1.5), "a3", moment("power", 3, k=-1.5))
    print("A exp eps=0.1 xi=1", spectrum("exponential", 0.1, 1))
    print("A exp eps=1 xi=0.37", spectrum("exponential", 1, 0.37))
    for xi in (0.3, 1.7, 12.5):
        print("A power eps=1", xi, spectrum("power", 1, xi, k=-1.5))
    print("A power eps=0.1 xi=7.3", spectrum("power", 0.1, 7.3, k=-1.5))
    print("A sine eps=1 xi=0.75", spectrum("sine", 1, 0.75))
    print("A indicator eps=0.5 xi=2.2", spectrum("indicator", 0.5, 2.2))
    print("C' power -1.5", far_field_constant_power(-1.5))
    print("C' power -0.5", far_field_constant_power(-0.5))
    g = lambda x: mp.e ** (-x**2)
    print("D power eps=0.3 gaussian t=0.7", apply("power", 0.3, g, 0.7, k=-1.5))
    print("D exponential eps=0.2 gaussian t=0.4", apply("exponential", 0.2, g, 0.4))
    print("D indicator eps=0.5 sqrt t=1", apply("indicator", 0.5, lambda x: mp.sqrt(abs(x)), 1, kinks=(0,)))
    print("D indicator eps=1 sqrt t=0.3", apply("indicator", 1, lambda x: mp.sqrt(abs(x)), 0.3, kinks=(0,)))
    print("runge", argmax_runge_defect(), 3 * mp.sqrt(3) / 16)
    print("pairing", gaussian_self_pairing(), mp.sqrt(mp.pi / 2))
    print("k*", (24 - 2 * mp.pi**2) / (mp.pi**2 - 6))
