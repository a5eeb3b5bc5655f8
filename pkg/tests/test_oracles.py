"""The frozen reference values agree with a live recomputation by the oracle."""

import mpmath as mp
import pytest

import reference_values as ref
import oracles


@pytest.mark.parametrize("key", sorted(ref.MOMENTS))
def test_moments(key):
    name, j, absolute = key
    assert float(oracles.moment(name, j, absolute)) == pytest.approx(ref.MOMENTS[key], rel=1e-15)


def test_power_moments():
    assert float(oracles.moment("power", 1, k=-1.5)) == pytest.approx(ref.POWER_MINUS_1_5_A1, rel=1e-14)
    assert float(oracles.moment("power", 3, k=-1.5)) == pytest.approx(ref.POWER_MINUS_1_5_A3, rel=1e-14)


@pytest.mark.parametrize("key", list(ref.SPECTRA), ids=str)
def test_spectra(key):
    name, k, eps, xi = key
    assert float(oracles.spectrum(name, eps, xi, k=k)) == pytest.approx(ref.SPECTRA[key], rel=1e-14)


@pytest.mark.parametrize("k", sorted(ref.FAR_FIELD_CONSTANT))
def test_far_field_constant(k):
    assert float(oracles.far_field_constant_power(k)) == pytest.approx(ref.FAR_FIELD_CONSTANT[k], rel=1e-14)


@pytest.mark.parametrize("key", list(ref.APPLY), ids=str)
def test_apply(key):
    name, k, eps, func, t = key
    u = {"gaussian": lambda x: mp.e ** (-x**2), "sqrt-abs": lambda x: mp.sqrt(abs(x))}[func]
    kinks = (0,) if func == "sqrt-abs" else ()
    assert float(oracles.apply(name, eps, u, t, k=k, kinks=kinks)) == pytest.approx(ref.APPLY[key], rel=1e-14)


def test_runge_defect_and_pairing():
    t, m = oracles.argmax_runge_defect()
    assert float(t) == pytest.approx(ref.RUNGE_DEFECT_ARGMAX, rel=1e-14)
    assert float(m) == pytest.approx(ref.RUNGE_DEFECT_MAX, rel=1e-14)
    assert float(oracles.gaussian_self_pairing()) == pytest.approx(ref.GAUSSIAN_SELF_PAIRING, rel=1e-14)


def test_positivity_threshold():
    # alpha_3/alpha_1 = (k+2)/(k+4) for the power kernel; margin 2 pi - (pi^3/3)(k+2)/(k+4)
    k = mp.mpf(ref.POSITIVITY_THRESHOLD_K)
    a1 = oracles.moment("power", 1, k=k)
    a3 = oracles.moment("power", 3, k=k)
    c = 4 * mp.pi**3 * a3 / (3 * a1)
    assert abs(float(2 * mp.pi - c / 4)) < 1e-12
