"""Cavity-mediated constant anyon interaction: closed-form calculators.

Two photon modes coupled to the total anyon number through a two-photon
term g N (a1+ a2 + a1 a2+) diagonalize exactly by a Bogoliubov rotation;
expanding the dressed frequencies to second order in g gives an effective
constant repulsion between anyons. With only the higher-frequency mode
populated, the identifications are

    J_eff = J0 + g^2 / (omega1 - omega2) <b1+ b1>,
    A_eff = 2 g^2 / (omega1 - omega2) <b1+ b1>,

where J0 is the perturbative plaquette gap of the honeycomb-lattice
construction and g the plaquette-photon coupling from spin-electric
modulation of two exchange links. Repulsion (A_eff > 0) requires pumping
the mode with the higher frequency, a non-equilibrium steady state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class CavityParameterError(ValueError):
    """Raised for cavity parameters outside the perturbative construction."""


@dataclass(frozen=True)
class CavitySpec:
    """Two-mode cavity coupled to the anyon number.

    omega1 > omega2 is the populated-mode convention; nb1/nb2 are the
    steady-state occupations of the dressed modes. The honeycomb exchange
    couplings (Jx, Jy, Jz) and spin-electric couplings (delta_x, delta_y)
    determine J0 and g; the perturbative treatment assumes delta_k << J_k.
    """

    omega1: float
    omega2: float
    g: float
    nb1: float = 0.0
    nb2: float = 0.0
    Jx: float = 1.0
    Jy: float = 1.0
    Jz: float = 1.0
    delta_x: float = 0.0
    delta_y: float = 0.0

    def __post_init__(self):
        if self.nb1 < 0 or self.nb2 < 0:
            raise CavityParameterError("mode occupations must be >= 0")
        if self.Jz <= 0:
            raise CavityParameterError("Jz must be > 0")

    @property
    def perturbative(self) -> bool:
        """True when delta_k << J_k (the neglected terms are small)."""
        return (abs(self.delta_x) < 0.1 * abs(self.Jx)
                and abs(self.delta_y) < 0.1 * abs(self.Jy))


def bogoliubov_frequencies(spec: CavitySpec, N: int) -> tuple[float, float, float]:
    """Dressed mode frequencies and mixing angle at anyon number N.

    Omega_{1,2} = (w1+w2)/2 +- sqrt((w1-w2)^2/4 + (gN)^2), the exact
    eigenvalues of [[w1, gN], [gN, w2]]; tan(2 theta) = 2 g N / (w1 - w2),
    with theta = pi/4 exactly at resonance (w1 = w2, N > 0).
    """
    if N < 0:
        raise CavityParameterError("anyon number must be >= 0")
    w1, w2, gN = spec.omega1, spec.omega2, spec.g * N
    mean = 0.5 * (w1 + w2)
    half = 0.5 * (w1 - w2)
    root = math.hypot(half, gN)
    if gN == 0.0:
        theta = 0.0
    elif w1 == w2:
        theta = math.pi / 4.0
    else:
        theta = 0.5 * math.atan2(2.0 * gN, w1 - w2)
    return mean + root, mean - root, theta


def effective_parameters(spec: CavitySpec) -> tuple[float, float]:
    """Effective (J, A) of the photon-dressed anyon gas.

    Valid off resonance with only the first (higher-frequency) mode
    populated; A_eff / (J_eff - J0) = 2 identically. A_eff > 0, i.e.
    repulsion, requires nb1 > 0 and omega1 > omega2.
    """
    if spec.omega1 == spec.omega2:
        raise CavityParameterError(
            "resonant modes (omega1 = omega2): second-order coefficients "
            "diverge; detune the cavity or treat the degenerate case exactly"
        )
    if spec.nb2 != 0.0:
        raise CavityParameterError(
            "effective parameters assume <b2+ b2> = 0 (populated-mode "
            f"convention); got nb2 = {spec.nb2}"
        )
    j0 = honeycomb_gap(spec.Jx, spec.Jy, spec.Jz)
    shift = spec.g**2 / (spec.omega1 - spec.omega2) * spec.nb1
    return j0 + shift, 2.0 * shift


def honeycomb_gap(Jx: float, Jy: float, Jz: float) -> float:
    """Perturbative plaquette excitation energy J0 = Jx^2 Jy^2 / (8 Jz^3)."""
    if Jz <= 0:
        raise CavityParameterError(f"Jz must be > 0, got {Jz}")
    return Jx**2 * Jy**2 / (8.0 * Jz**3)


def plaquette_coupling(Jx: float, Jy: float, Jz: float,
                       delta_x: float, delta_y: float) -> float:
    """Plaquette-photon coupling g = Jx Jy delta_x delta_y / (2 Jz^3)."""
    if Jz <= 0:
        raise CavityParameterError(f"Jz must be > 0, got {Jz}")
    return Jx * Jy * delta_x * delta_y / (2.0 * Jz**3)
