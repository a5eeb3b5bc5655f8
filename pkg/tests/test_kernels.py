import math

import numpy as np
import pytest
from scipy.integrate import quad

from nlcalc.kernels import (CheckConfig, DecayClass, Flatness, FlatnessCase, KernelError, builtin_kernel,
                            check_admissibility, infer_flatness, load_tabulated_kernel, moment, scale,
                            tabulated_kernel)

import reference_values as ref


def test_builtin_profiles():
    ind = builtin_kernel("indicator")
    assert ind(0.5) == 0.5 and ind.support_radius == 1.0
    assert builtin_kernel("exponential")(-1.0) == pytest.approx(-math.exp(-1.0), rel=1e-15)
    assert builtin_kernel("sine")(0.5) == pytest.approx(1.0)
    assert builtin_kernel("sine")(1.5) == 0.0
    p = builtin_kernel("power", k_alpha=-1.5)
    assert p.flatness.case is FlatnessCase.SINGULAR
    assert p.flatness.K_plus == p.flatness.K_minus == 1.0
    assert p(0.25) == pytest.approx(8.0) and p(-0.25) == pytest.approx(-8.0)
    assert builtin_kernel("exponential").decay_class is DecayClass.EXPONENTIAL


@pytest.mark.parametrize("k_alpha", [-2.5, -2.0, 0.0, math.inf, None])
def test_power_parameter_range(k_alpha):
    with pytest.raises(KernelError):
        builtin_kernel("power", k_alpha=k_alpha)


def test_unknown_kernel():
    with pytest.raises(KernelError):
        builtin_kernel("gaussian")


@pytest.mark.parametrize("key", sorted(ref.MOMENTS))
def test_moments_against_oracle(key):
    name, j, absolute = key
    assert moment(builtin_kernel(name), j, absolute) == pytest.approx(ref.MOMENTS[key], rel=1e-13)


def test_power_moments():
    p = builtin_kernel("power", k_alpha=-1.5)
    assert moment(p, 1) == pytest.approx(ref.POWER_MINUS_1_5_A1, rel=1e-13)
    assert moment(p, 3) == pytest.approx(ref.POWER_MINUS_1_5_A3, rel=1e-13)


@pytest.mark.parametrize("name", ["indicator", "exponential", "sine"])
@pytest.mark.parametrize("j", [0, 2, 4])
def test_even_signed_moments_vanish_exactly(name, j):
    assert moment(builtin_kernel(name), j) == 0.0


def test_divergent_moment_raises():
    with pytest.raises(KernelError):
        moment(builtin_kernel("power", k_alpha=-1.5), 0, absolute=True)


def test_scale_examples():
    assert scale(builtin_kernel("exponential"), 0.1).sigma == pytest.approx(50.0, rel=1e-14)
    assert scale(builtin_kernel("indicator"), 1.0).sigma == pytest.approx(1.5, rel=1e-14)
    s = scale(builtin_kernel("exponential"), 0.1)
    x = np.array([-0.3, 0.05, 0.2])
    assert np.allclose(s(x), np.sign(x) * np.exp(-np.abs(x) / 0.1) / (2 * 0.01), rtol=1e-14)


@pytest.mark.parametrize("name", ["indicator", "exponential", "sine"])
@pytest.mark.parametrize("eps", [1.0, 0.3, 0.01])
def test_scaled_kernel_is_normalized(name, eps):
    s = scale(builtin_kernel(name), eps)
    upper = eps * (40.0 if name == "exponential" else 1.0)
    half, _ = quad(lambda x: x * s(x), 0.0, upper, epsabs=0, epsrel=1e-13, limit=200)
    assert 2 * half == pytest.approx(1.0, rel=1e-12)


def test_rescale_matches_direct_scale():
    k = builtin_kernel("sine")
    a, b = scale(k, 0.5).rescale(0.25 / 0.5), scale(k, 0.25)
    x = np.linspace(-0.3, 0.3, 41)
    assert np.allclose(a(x), b(x), rtol=1e-14, atol=0)


def test_scale_rejects_bad_epsilon():
    with pytest.raises((KernelError, ValueError)):
        scale(builtin_kernel("indicator"), 0.0)


def test_flatness_record_invariants():
    with pytest.raises(KernelError):
        Flatness(1.0, 1.0, 2.0, 1.0, FlatnessCase.FINITE_LIMIT)  # needs K_minus >= K_plus
    with pytest.raises(KernelError):
        Flatness(-0.5, 1.0, 1.0, 2.0, FlatnessCase.SINGULAR)  # needs K_minus <= K_plus
    with pytest.raises(KernelError):
        Flatness(-0.5, 1.0, 1.0, 1.0, FlatnessCase.FINITE_LIMIT)


def test_exponential_fully_admissible():
    rep = check_admissibility(builtin_kernel("exponential"))
    assert rep.admissible
    assert rep.dipole == pytest.approx(2.0)


def test_indicator_fails_only_positivity_and_flatness():
    rep = check_admissibility(builtin_kernel("indicator"))
    assert rep.antisymmetry_ok and rep.dipole_ok and rep.analytic_class_ok
    assert not rep.positivity_ok
    assert not rep.flatness_ok


def test_flat_kernel_is_not_flatness_admissible():
    rep = check_admissibility(builtin_kernel("flat"))
    assert not rep.flatness_ok
    assert infer_flatness(builtin_kernel("flat")) is None


def test_singular_power_kernel_passes_every_flag():
    rep = check_admissibility(builtin_kernel("power", k_alpha=-1.5))
    assert rep.admissible, rep.to_dict()


def test_report_is_deterministic():
    k = builtin_kernel("sine")
    assert check_admissibility(k).to_dict() == check_admissibility(k).to_dict()


def test_analytic_surrogate_ratios():
    rep = check_admissibility(builtin_kernel("exponential"), CheckConfig(j_max=6))
    # int |s|^j e^{-|s|} = 2 j!, so every ratio equals A = 2
    assert np.allclose(rep.analytic_ratios, 2.0, rtol=1e-12)
    assert rep.analytic_class_ok and rep.analytic_constant == pytest.approx(2.0)


def test_tabulated_kernel_reproduces_indicator(tmp_path):
    s = np.linspace(0.01, 1.0, 100)
    path = tmp_path / "ind.csv"
    path.write_text("s,value\n" + "\n".join(f"{float(a)!r},{float(a)!r}" for a in s) + "\n")
    k = load_tabulated_kernel(path, support_radius=1.0)
    assert k(0.5) == pytest.approx(0.5, rel=1e-12)
    assert k(-0.5) == pytest.approx(-0.5, rel=1e-12)
    assert k(1.5) == 0.0
    assert moment(k, 1) == pytest.approx(2 / 3, rel=1e-3)


def test_tabulated_kernel_needs_two_samples():
    with pytest.raises(KernelError):
        tabulated_kernel([0.5], [1.0])
