import math
import warnings

import numpy as np
import pytest

from nlcalc import antiderivative as ad
from nlcalc import functions as fn
from nlcalc.antiderivative import (PeriodizationWarning, SolverConfig, SolverError, closed_form_reference,
                                   exponential_identity, homogeneous_basis, smoothness_shift, solve)
from nlcalc.derivative import GridFunction
from nlcalc.kernels import KernelError, builtin_kernel, scale

CFG = SolverConfig(half_width=40.0, n=2**14)


def _spread(d):
    return float(d.max() - d.min())


def test_closed_form_reference_examples():
    assert closed_form_reference("exp-arctan", 0.0, 1.0) == pytest.approx(math.pi / 4, rel=1e-15)
    assert closed_form_reference("exp-arctan", 0.5, 1.0) == pytest.approx(math.pi / 4 + 0.125, rel=1e-15)
    with pytest.raises(ValueError):
        closed_form_reference("sine-something", 0.1, 1.0)


def test_general_identity_agrees_with_named_case():
    runge = fn.get("runge")
    t = np.linspace(-5, 5, 101)
    v = exponential_identity(runge.antiderivative, runge.df, 0.3)
    assert np.allclose(v(t), closed_form_reference("exp-arctan", 0.3, t), rtol=0, atol=1e-15)
    # -eps^2 F' = 2 eps^2 t / (1+t^2)^2
    assert np.allclose(-0.09 * runge.df(t), 2 * 0.09 * t / (1 + t * t) ** 2, atol=1e-16)


def test_exponential_kernel_reproduces_arctan():
    s = scale(builtin_kernel("exponential"), 0.1)
    F = CFG.sample(fn.get("runge"))
    res = solve(s, F, CFG)
    t = F.t
    m = np.abs(t) <= 10
    d = res.particular.values - closed_form_reference("exp-arctan", 0.1, t)
    assert _spread(d[m]) <= 1e-4 * np.abs(closed_form_reference("exp-arctan", 0.1, t[m])).max()
    assert _spread(d[m]) <= 1e-8
    assert res.null_modes == [(0.0, 0)]


def test_exponential_identity_for_gaussian():
    eps = 0.2
    s = scale(builtin_kernel("exponential"), eps)
    cfg = SolverConfig(half_width=16.0, n=2**12)
    g = fn.get("gaussian")
    res = solve(s, cfg.sample(g), cfg)
    exact = exponential_identity(g.antiderivative, g.df, eps)(res.particular.t)
    assert _spread(res.particular.values - exact) <= 1e-10


def test_round_trip_residual():
    cfg = SolverConfig(half_width=16.0, n=2**12)
    F = cfg.sample(lambda t: np.exp(-t * t) * np.cos(3 * t))
    res = solve(scale(builtin_kernel("exponential"), 0.1), F, cfg)
    assert res.residual <= 1e-6 * np.abs(F.values).max()


def test_zero_forcing_gives_constant():
    F = GridFunction(-8.0, 8.0, np.zeros(256))
    s = scale(builtin_kernel("sine"), 0.5)
    res = solve(s, F, SolverConfig(8.0, 256))
    assert np.all(res.particular.values == 0.0)
    assert (0.0, 0) in res.null_modes
    fixed = solve(s, F, SolverConfig(8.0, 256, constant_policy="fixed-value", constant_value=2.5))
    assert np.all(fixed.particular.values == 2.5)


def test_constant_policies_differ_by_a_constant():
    cfg = SolverConfig(16.0, 2**12)
    F = cfg.sample(fn.get("gaussian"))
    s = scale(builtin_kernel("indicator"), 0.3)
    a = solve(s, F, cfg, residual=False).particular.values
    b = solve(s, F, SolverConfig(16.0, 2**12, constant_policy="fixed-value", constant_value=-1.25),
              residual=False).particular.values
    assert _spread(a - b) <= 1e-10
    assert b.mean() == pytest.approx(-1.25, abs=1e-12)
    assert abs(a.mean()) <= 1e-12


def test_sine_null_modes_in_window():
    s = scale(builtin_kernel("sine"), 0.25)
    res = solve(s, CFG.sample(fn.get("gaussian")), CFG)
    xis = {x for x, _ in res.null_modes}
    for x in (4.0, 6.0, 8.0, -4.0, -6.0, -8.0, 0.0):
        assert x in xis
    assert res.residual <= 1e-8


@pytest.mark.parametrize("eps", [0.25, 0.3])
def test_null_mode_completeness(eps):
    k = builtin_kernel("sine")
    res = solve(scale(k, eps), CFG.sample(fn.get("gaussian")), CFG, residual=False)
    nyquist = CFG.n / (4 * CFG.half_width)
    bin_width = 1 / (2 * CFG.half_width)
    basis = [x for x, _ in homogeneous_basis(k, eps, nyquist)]
    found = sorted({x for x, _ in res.null_modes})
    assert all(min(abs(x - y) for y in found) <= bin_width for x in basis)
    assert all(min(abs(x - y) for y in basis) <= bin_width for x in found)


def test_homogeneous_basis_examples():
    assert homogeneous_basis(builtin_kernel("exponential"), 0.1, 50.0) == [(0.0, 0)]
    sine = homogeneous_basis(builtin_kernel("sine"), 0.25, 10.0)
    assert [x for x, _ in sine] == pytest.approx([-8, -6, -4, 0, 4, 6, 8], abs=1e-10)
    assert all(d == 0 for _, d in sine)
    assert homogeneous_basis(builtin_kernel("sine"), 0.25, 3.9) == [(0.0, 0)]


def test_smoothness_shift():
    assert smoothness_shift(builtin_kernel("power", k_alpha=1.0)) == 2.0
    assert smoothness_shift(builtin_kernel("power", k_alpha=-1.0)) == 0.0
    assert smoothness_shift(builtin_kernel("power", k_alpha=-1.5)) == -0.5
    with pytest.raises(KernelError):
        smoothness_shift(builtin_kernel("indicator"))


def test_boundary_policy():
    cfg = SolverConfig(4.0, 256)
    F = cfg.sample(fn.get("runge"))
    s = scale(builtin_kernel("exponential"), 0.1)
    with pytest.warns(PeriodizationWarning):
        solve(s, F, cfg, residual=False)
    with pytest.raises(SolverError):
        solve(s, F, SolverConfig(4.0, 256, strict=True), residual=False)


def test_grid_must_match_config():
    F = GridFunction.sample(fn.get("gaussian"), -8.0, 8.0, 256)
    with pytest.raises(SolverError):
        solve(scale(builtin_kernel("exponential"), 0.1), F, SolverConfig(16.0, 256))


def test_degenerate_spectrum(monkeypatch):
    class Null:
        def __call__(self, xi):
            return np.zeros_like(np.asarray(xi, dtype=float))

    monkeypatch.setattr(ad, "spectrum", lambda s, prefer_closed=True: Null())
    F = GridFunction.sample(fn.get("gaussian"), -8.0, 8.0, 256)
    with pytest.raises(SolverError):
        solve(scale(builtin_kernel("exponential"), 0.1), F, SolverConfig(8.0, 256))


@pytest.mark.parametrize("kw", [dict(half_width=0.0), dict(n=100), dict(null_threshold=1.0),
                                dict(constant_policy="median")])
def test_solver_config_validation(kw):
    with pytest.raises(ValueError):
        SolverConfig(**kw)


def test_singular_kernel_solution_is_close_to_erf():
    cfg = SolverConfig(16.0, 2**12)
    g = fn.get("gaussian")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        res = solve(scale(builtin_kernel("power", k_alpha=-1.5), 1 / 32), cfg.sample(g), cfg)
    d = res.particular.values - g.antiderivative(res.particular.t)
    assert _spread(d) < 1e-3
    assert res.residual < 1e-8


def test_result_serialization():
    cfg = SolverConfig(8.0, 256)
    res = solve(scale(builtin_kernel("sine"), 1.0), cfg.sample(fn.get("gaussian")), cfg, residual=False)
    d = res.to_dict()
    assert d["kernel"] == "sine" and d["epsilon"] == 1.0
    assert {"xi": 0.0, "k": 0} in d["null_modes"]
    assert d["config"]["n"] == 256
