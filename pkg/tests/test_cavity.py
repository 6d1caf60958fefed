import math

import numpy as np
import pytest

from anyonmem.cavity import (
    CavityParameterError,
    CavitySpec,
    bogoliubov_frequencies,
    effective_parameters,
    honeycomb_gap,
    plaquette_coupling,
)


def spec(**kw):
    base = dict(omega1=2.0, omega2=1.0, g=0.05)
    base.update(kw)
    return CavitySpec(**base)


def test_no_coupling():
    o1, o2, theta = bogoliubov_frequencies(spec(g=0.0), 5)
    assert (o1, o2, theta) == (2.0, 1.0, 0.0)


def test_resonant_splitting():
    o1, o2, theta = bogoliubov_frequencies(spec(omega1=1.5, omega2=1.5), 3)
    assert o1 == pytest.approx(1.5 + 0.05 * 3)
    assert o2 == pytest.approx(1.5 - 0.05 * 3)
    assert theta == pytest.approx(math.pi / 4)


@pytest.mark.parametrize("w1,w2,g,N", [
    (2.0, 1.0, 0.05, 4), (1.3, 0.7, 0.2, 7), (5.0, 4.9, 0.01, 100),
])
def test_matches_numeric_eigensolver(w1, w2, g, N):
    s = spec(omega1=w1, omega2=w2, g=g)
    o1, o2, theta = bogoliubov_frequencies(s, N)
    evals = np.linalg.eigvalsh(np.array([[w1, g * N], [g * N, w2]]))
    assert o2 == pytest.approx(evals[0], rel=1e-12)
    assert o1 == pytest.approx(evals[1], rel=1e-12)
    # trace and determinant preservation
    assert o1 + o2 == pytest.approx(w1 + w2, rel=1e-12)
    assert o1 * o2 == pytest.approx(w1 * w2 - (g * N) ** 2, rel=1e-12)
    assert -math.pi / 4 < theta <= math.pi / 4


def test_effective_parameters():
    s = spec(nb1=0.0)
    j_eff, a_eff = effective_parameters(s)
    assert a_eff == 0.0
    assert j_eff == pytest.approx(honeycomb_gap(1.0, 1.0, 1.0))
    s = spec(nb1=20.0)
    j_eff, a_eff = effective_parameters(s)
    j0 = honeycomb_gap(1.0, 1.0, 1.0)
    assert a_eff / (j_eff - j0) == pytest.approx(2.0, rel=1e-12)
    assert a_eff > 0


def test_effective_parameters_guard_rails():
    with pytest.raises(CavityParameterError):
        effective_parameters(spec(omega1=1.0, omega2=1.0, nb1=5.0))
    with pytest.raises(CavityParameterError):
        effective_parameters(spec(nb1=5.0, nb2=1.0))


def test_second_order_coefficient_from_frequency_expansion():
    # expanding the upper dressed frequency in g reproduces the second-order
    # shift coefficient (gN)^2 / (omega1 - omega2), with a residual that is
    # exactly fourth order in g
    w1, w2, N = 2.0, 1.0, 3
    coeff = N * N / (w1 - w2)
    half = 0.5 * (w1 - w2)
    quartic = N**4 / (8 * half**3)
    gs = np.array([1e-3, 2e-3, 4e-3])
    res = []
    for g in gs:
        o1, _, _ = bogoliubov_frequencies(spec(omega1=w1, omega2=w2, g=g), N)
        shift = o1 - w1
        assert shift == pytest.approx(coeff * g * g, rel=3 * (N * g) ** 2)
        res.append(abs(shift - coeff * g * g))
        assert res[-1] == pytest.approx(quartic * g**4, rel=1e-3)
    assert res[1] / res[0] == pytest.approx(16, rel=0.01)
    assert res[2] / res[1] == pytest.approx(16, rel=0.01)


def test_honeycomb_formulas():
    assert honeycomb_gap(1.0, 1.0, 1.0) == pytest.approx(1 / 8)
    assert plaquette_coupling(1.0, 1.0, 1.0, 0.0, 0.3) == 0.0
    assert plaquette_coupling(1.0, 1.0, 2.0, 0.1, 0.1) == pytest.approx(
        0.01 / 16)
    with pytest.raises(CavityParameterError):
        honeycomb_gap(1.0, 1.0, 0.0)


def test_effective_A_feeds_energy_module():
    from anyonmem.energy import InteractionSpec

    s = spec(nb1=10.0)
    j_eff, a_eff = effective_parameters(s)
    inter = InteractionSpec(J=j_eff, A=a_eff, alpha=0.0)
    assert inter.constant_interaction and inter.A > 0
