import math

import numpy as np
import pytest

from anyonmem.bath import (
    BathError,
    ExplicitRatesBath,
    SpinBosonBath,
    UnsupportedEnergyError,
    balanced_explicit_bath,
    rate,
)


def test_validation():
    with pytest.raises(BathError):
        SpinBosonBath(n=0, T=0.3)
    with pytest.raises(BathError):
        SpinBosonBath(n=1, T=-1.0)
    with pytest.raises(BathError):
        SpinBosonBath(n=1, T=0.3, kappa=0.0)
    with pytest.raises(BathError):
        ExplicitRatesBath(gamma0=-1.0, gamma_minus=0.1, T=0.3)


def test_ohmic_zero_frequency_limit():
    b = SpinBosonBath(n=1, T=0.3)
    assert b.rate(0.0) == pytest.approx(2 * 0.3)
    # series limit cross-checked numerically near zero
    assert b.rate(1e-8) == pytest.approx(2 * 0.3, rel=1e-7)
    assert b.rate(-1e-8) == pytest.approx(2 * 0.3, rel=1e-7)


def test_super_ohmic_gap():
    for n in (2, 3):
        b = SpinBosonBath(n=n, T=0.3)
        assert b.rate(0.0) == 0.0
        # near zero the rate vanishes like omega^(n-1) * T
        assert b.rate(1e-12) < 2 * 0.3 * 1e-11


@pytest.mark.parametrize("n", [1, 2, 3])
def test_detailed_balance(n):
    b = SpinBosonBath(n=n, T=0.437)
    for w in np.linspace(-10.0, 10.0, 401):
        if w == 0:
            continue
        lhs = b.rate(w) * math.exp(-w / b.T)
        rhs = b.rate(-w)
        assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), abs(rhs))


def test_annihilation_creation_ratio():
    b = SpinBosonBath(n=2, T=0.3)
    assert b.rate(2.0) / b.rate(-2.0) == pytest.approx(math.exp(2.0 / 0.3), rel=1e-12)


def test_monotone_in_energy_without_cutoff():
    b = SpinBosonBath(n=1, T=0.5)
    assert math.isinf(b.omega_c)  # large-cutoff limit is the default
    w = np.linspace(0.01, 10, 200)
    r = b.rate_array(w)
    assert (np.diff(r) > 0).all()


def test_finite_cutoff_suppresses_high_energies():
    b_inf = SpinBosonBath(n=1, T=0.5)
    b_cut = SpinBosonBath(n=1, T=0.5, omega_c=2.0)
    assert b_cut.rate(4.0) == pytest.approx(b_inf.rate(4.0) * math.exp(-2.0))
    # detailed balance survives the symmetric cutoff factor
    for w in (0.5, 3.0, 7.0):
        assert b_cut.rate(w) * math.exp(-w / 0.5) == pytest.approx(
            b_cut.rate(-w), rel=1e-12)


def test_rate_array_matches_scalar():
    for b in (SpinBosonBath(n=1, T=0.3), SpinBosonBath(n=2, T=0.7)):
        ws = np.linspace(-12, 12, 97)
        assert np.allclose(b.rate_array(ws), [b.rate(w) for w in ws],
                           rtol=1e-14, atol=0)


def test_explicit_rates_mapping():
    b = ExplicitRatesBath(gamma0=0.4, gamma_minus=0.01, T=0.3, J=1.0)
    assert rate(b, 0.0) == 0.4
    assert rate(b, -2.0) == 0.01
    assert rate(b, 2.0) == pytest.approx(0.01 * math.exp(2 / 0.3))
    with pytest.raises(UnsupportedEnergyError):
        b.rate(1.0)
    with pytest.raises(UnsupportedEnergyError):
        b.rate(-2.2)


def test_balanced_convention():
    b = balanced_explicit_bath(T=0.3)
    assert b.gamma0 == 1.0
    assert b.gamma_plus == pytest.approx(1.0)
    assert b.gamma_minus == pytest.approx(math.exp(-2 / 0.3))


def test_zero_creation_allowed_for_single_pair_runs():
    b = ExplicitRatesBath(gamma0=1.0, gamma_minus=0.0, T=0.3)
    assert b.rate(-2.0) == 0.0
    assert b.rate(2.0) == 0.0
