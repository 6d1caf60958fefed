"""Thermal transition rates gamma(omega) for spin flips.

``SpinBosonBath`` implements the spin-boson rate law

    gamma(omega) = 2 kappa_n |omega^n / (1 - e^{-beta omega})| e^{-|omega|/omega_c}

with the omega -> 0 limit taken analytically: 2 kappa_1 T for an Ohmic bath
(n = 1) and 0 for super-Ohmic baths (n >= 2). The cutoff omega_c defaults
to infinity; positive omega means the flip releases energy into the bath.

``ExplicitRatesBath`` is the benchmark bath for the non-interacting model
only: it fixes gamma(0) and gamma(-2J) directly and derives the pair
annihilation rate gamma(+2J) = gamma(-2J) e^{2J/T} from detailed balance.
It rejects any other energy difference, which can only arise when A != 0.

Rates are in units of kappa_n = 1, which fixes the simulation time unit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class BathError(ValueError):
    """Raised for bath parameters outside the supported model."""


class UnsupportedEnergyError(ValueError):
    """An explicit-rate bath was queried at an energy it does not define."""


@dataclass(frozen=True)
class SpinBosonBath:
    """Ohmic (n = 1) or super-Ohmic (n >= 2) spin-boson bath."""

    n: int
    T: float
    kappa: float = 1.0
    omega_c: float = math.inf

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise BathError(f"Ohmicity exponent n must be an integer >= 1, got {self.n}")
        if not self.T > 0:
            raise BathError(f"temperature must be > 0, got {self.T}")
        if not self.kappa > 0:
            raise BathError(f"kappa must be > 0, got {self.kappa}")
        if not self.omega_c > 0:
            raise BathError(f"omega_c must be > 0 (or inf), got {self.omega_c}")

    @property
    def beta(self) -> float:
        return 1.0 / self.T

    @property
    def super_ohmic(self) -> bool:
        return self.n >= 2

    def rate(self, omega: float) -> float:
        """Evaluate gamma(omega) with numerically stable Bose factors."""
        beta = self.beta
        n = int(self.n)
        if omega == 0.0:
            return 2.0 * self.kappa * self.T if n == 1 else 0.0
        cutoff = 1.0 if math.isinf(self.omega_c) else math.exp(-abs(omega) / self.omega_c)
        if omega > 0:
            bose = -math.expm1(-beta * omega)  # 1 - e^{-beta omega}
            return 2.0 * self.kappa * omega**n / bose * cutoff
        u = -omega
        x = beta * u
        if x > 700.0:
            return 2.0 * self.kappa * u**n * math.exp(-x) * cutoff
        return 2.0 * self.kappa * u**n / math.expm1(x) * cutoff

    def rate_array(self, omega: np.ndarray) -> np.ndarray:
        """Vectorized gamma over an array of energy differences."""
        omega = np.asarray(omega, dtype=float)
        beta = self.beta
        n = int(self.n)
        out = np.empty_like(omega)
        zero = omega == 0.0
        pos = omega > 0.0
        neg = omega < 0.0
        out[zero] = 2.0 * self.kappa * self.T if n == 1 else 0.0
        if pos.any():
            w = omega[pos]
            out[pos] = 2.0 * self.kappa * w**n / (-np.expm1(-beta * w))
        if neg.any():
            u = -omega[neg]
            x = beta * u
            big = x > 700.0
            vals = np.empty_like(u)
            vals[~big] = 2.0 * self.kappa * u[~big] ** n / np.expm1(x[~big])
            vals[big] = 2.0 * self.kappa * u[big] ** n * np.exp(-x[big])
            out[neg] = vals
        if not math.isinf(self.omega_c):
            out *= np.exp(-np.abs(omega) / self.omega_c)
        return out


@dataclass(frozen=True)
class ExplicitRatesBath:
    """Benchmark bath defined by gamma(0) and gamma(-2J) directly.

    Only valid with constant energies {0, +-2J}, i.e. the non-interacting
    model (A = 0). gamma_minus = 0 disables pair creation and annihilation
    entirely, which is how single-pair experiments freeze the anyon number.
    """

    gamma0: float
    gamma_minus: float
    T: float
    J: float = 1.0

    def __post_init__(self):
        if self.gamma0 < 0:
            raise BathError(f"gamma0 must be >= 0, got {self.gamma0}")
        if self.gamma_minus < 0:
            raise BathError(f"gamma_minus must be >= 0, got {self.gamma_minus}")
        if not self.T > 0:
            raise BathError(f"temperature must be > 0, got {self.T}")
        if not self.J > 0:
            raise BathError(f"J must be > 0, got {self.J}")

    @property
    def beta(self) -> float:
        return 1.0 / self.T

    @property
    def gamma_plus(self) -> float:
        """Annihilation rate from detailed balance: gamma(-2J) e^{2J beta}."""
        return self.gamma_minus * math.exp(2.0 * self.J * self.beta)

    def rate(self, omega: float) -> float:
        tol = 1e-9 * self.J
        if abs(omega) <= tol:
            return self.gamma0
        if abs(omega + 2.0 * self.J) <= tol:
            return self.gamma_minus
        if abs(omega - 2.0 * self.J) <= tol:
            return self.gamma_plus
        raise UnsupportedEnergyError(
            f"explicit-rate bath only defines omega in {{0, +-2J}} with "
            f"J = {self.J}; got omega = {omega} (this bath is only valid "
            "for the non-interacting model)"
        )

    def rate_array(self, omega: np.ndarray) -> np.ndarray:
        return np.array([self.rate(w) for w in np.asarray(omega, dtype=float)])


Bath = SpinBosonBath | ExplicitRatesBath


def rate(bath: Bath, omega: float) -> float:
    """gamma(omega) for either bath kind."""
    return bath.rate(omega)


def balanced_explicit_bath(T: float, J: float = 1.0, gamma0: float = 1.0) -> ExplicitRatesBath:
    """Explicit-rate bath with the benchmark convention gamma(0) = gamma(2J).

    The hop rate gamma0 sets the time unit; the creation rate follows from
    detailed balance, gamma(-2J) = gamma0 e^{-2J/T}.
    """
    return ExplicitRatesBath(
        gamma0=gamma0,
        gamma_minus=gamma0 * math.exp(-2.0 * J / T),
        T=T,
        J=J,
    )
