"""Closed-form lifetime and diffusion predictions.

An isolated anyon diffuses with constant D = gamma(0) when direct hopping
is allowed (Ohmic bath); in a super-Ohmic bath, where gamma(0) = 0,
next-neighbor motion proceeds through creation and immediate decay of an
adjacent pair, giving D = 4 gamma(-2J) in the continuum limit (the rate
per individual indirect channel is gamma(-2J)/2). Errors accumulate at
about D per anyon, and the memory fails once the flipped-spin fraction
reaches a threshold f_c, which yields the non-interacting lifetime

    tau ~ 2 f_c (e^{beta J} + 1) / max{gamma(0), 4 gamma(-2J)}.

With repulsive long-range interactions, J is replaced by the
self-consistent mean-field gap and 1/(e^{beta J}+1) by the mean-field
density, so the lifetime grows polynomially with L. Single-pair decay
curves (bare and corrected) follow from the continuum random walk of one
anyon pair and depend on time only through gamma(0) t / L^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy.integrate import quad

from .bath import Bath, SpinBosonBath
from .energy import InteractionSpec
from .equilibrium import (
    MeanFieldSolution,
    _solve_density,
    mean_field_expansion,
    solve_mean_field,
)


@dataclass(frozen=True)
class DiffusionConstants:
    """Direct and indirect single-anyon diffusion constants."""

    direct: float            # gamma(0)
    indirect: float          # 4 gamma(-2 gap)
    indirect_channel_rate: float  # gamma(-2 gap) / 2, per individual channel
    gap: float

    @property
    def value(self) -> float:
        return max(self.direct, self.indirect)


def diffusion_constant(bath: Bath, gap: float) -> DiffusionConstants:
    """D = max{gamma(0), 4 gamma(-2 gap)}; gap = J (or a mean-field gap)."""
    if not gap > 0:
        raise ValueError("excitation gap must be > 0")
    g0 = bath.rate(0.0)
    gm = bath.rate(-2.0 * gap)
    return DiffusionConstants(direct=g0, indirect=4.0 * gm,
                              indirect_channel_rate=0.5 * gm, gap=gap)


@dataclass(frozen=True)
class LifetimePrediction:
    """Memory lifetime estimate and the inputs that produced it."""

    tau: float
    regime: str              # non-interacting | ohmic-interacting | super-ohmic-interacting
    f_c: float
    L: int | None = None
    tau_asymptotic: float | None = None
    mean_field: MeanFieldSolution | None = None
    inputs: dict = field(default_factory=dict)


def _check_fc(f_c: float) -> None:
    if not 0 < f_c < 0.5:
        raise ValueError(f"threshold fraction must lie in (0, 0.5), got {f_c}")


def lifetime_noninteracting(bath: Bath, J: float, f_c: float) -> LifetimePrediction:
    """tau = 2 f_c (e^{beta J} + 1) / max{gamma(0), 4 gamma(-2J)}.

    Size-independent by construction: the equilibrium density
    1/(e^{beta J} + 1) replaces N/L^2.
    """
    _check_fc(f_c)
    if not J > 0:
        raise ValueError("J must be > 0")
    D = diffusion_constant(bath, J)
    tau = 2.0 * f_c * (math.exp(bath.beta * J) + 1.0) / D.value
    return LifetimePrediction(
        tau=tau, regime="non-interacting", f_c=f_c,
        inputs={"J": J, "T": 1.0 / bath.beta, "D": D.value},
    )


@dataclass(frozen=True)
class PairCreationRate:
    """Mean-field pair creation rate, asymptotic and exact."""

    asymptotic: float
    exact: float
    in_regime: bool
    epsilon_mf: float


def pair_creation_rate_mf(bath: SpinBosonBath, L_alpha: float,
                          J: float = 1.0) -> PairCreationRate:
    """gamma(-2 eps_mf) ~ kappa_n T^n (2 ln L_alpha)^(n+2) / (2 L_alpha^2).

    The exact value evaluates the bath at the self-consistent gap; the
    asymptotic form holds in the same regime as the density expansion.
    """
    if not isinstance(bath, SpinBosonBath):
        raise TypeError("mean-field pair creation requires a spin-boson bath")
    if L_alpha <= 1.0:
        raise ValueError("L_alpha must exceed 1 for the asymptotic form")
    T = 1.0 / bath.beta
    n = int(bath.n)
    asym = bath.kappa * T**n * (2.0 * math.log(L_alpha)) ** (n + 2) \
        / (2.0 * L_alpha**2)
    nmf = _solve_density(bath.beta * J, L_alpha)
    eps = J + nmf * T * L_alpha
    exact = bath.rate(-2.0 * eps)
    in_regime = mean_field_expansion(L_alpha, bath.beta * J).in_regime
    return PairCreationRate(asymptotic=asym, exact=exact,
                            in_regime=in_regime, epsilon_mf=eps)


def lifetime_interacting(L: int, spec: InteractionSpec, bath: SpinBosonBath,
                         T: float, f_c: float) -> LifetimePrediction:
    """tau = (2 f_c / n_mf) / max{gamma(0), 4 gamma(-2 eps_mf)}.

    Uses the exact self-consistent (n_mf, eps_mf); the large-size power
    laws (L_alpha / ln L_alpha Ohmic, L_alpha^3 / ln^(n+3) super-Ohmic
    up to constants) are returned alongside as tau_asymptotic.
    """
    _check_fc(f_c)
    if not isinstance(bath, SpinBosonBath):
        raise TypeError("interacting lifetimes require a spin-boson bath")
    if abs(bath.T - T) > 1e-12 * max(T, bath.T):
        raise ValueError(
            f"temperature mismatch: bath.T = {bath.T}, T = {T}")
    mf = solve_mean_field(L, spec, T)
    D = diffusion_constant(bath, mf.epsilon_mf)
    tau = 2.0 * f_c / mf.n_mf / D.value

    n = int(bath.n)
    La = mf.L_alpha
    if La > 1.0:
        ln_la = math.log(La)
        if n == 1:
            tau_asym = f_c * La / (bath.kappa * T * ln_la)
            regime = "ohmic-interacting"
        else:
            tau_asym = 2.0 * f_c * La**3 \
                / (bath.kappa * T**n * (2.0 * ln_la) ** (n + 3))
            regime = "super-ohmic-interacting"
    else:
        tau_asym = float("nan")
        regime = "ohmic-interacting" if n == 1 else "super-ohmic-interacting"
    return LifetimePrediction(
        tau=tau, regime=regime, f_c=f_c, L=int(L), tau_asymptotic=tau_asym,
        mean_field=mf,
        inputs={"J": spec.J, "A": spec.A, "alpha": spec.alpha, "T": T,
                "n": n, "kappa": bath.kappa, "D": D.value},
    )


def critical_radius(spec: InteractionSpec, T: float) -> float:
    """Pair separation beyond which repulsive energy steps drop below T.

    r_c = (alpha A beta)^(1/(alpha+1)); zero at alpha = 0 where the force
    between anyons vanishes identically. Independent of system size.
    """
    if not T > 0:
        raise ValueError("temperature must be > 0")
    x = spec.alpha * spec.A / T
    return x ** (1.0 / (spec.alpha + 1.0))


# -- single-pair decay (continuum random walk of one anyon pair) ---------

_TERM_CUT = 1e-12


def _pair_f(z0: float, q: float) -> float:
    """Sign expectation of one anyon started at fractional offset z0.

    1/2 sum_m (-1)^m [erf((2 z0 + 2m + 1) / (4 sqrt(q)))
                      - erf((2 z0 + 2m - 1) / (4 sqrt(q)))].
    """
    den = 4.0 * math.sqrt(q)
    total = 0.0
    m = 0
    while True:
        terms = 0.0
        for mm in ((m,) if m == 0 else (m, -m)):
            t = 0.5 * ((-1) ** (mm % 2)) * (
                math.erf((2.0 * z0 + 2.0 * mm + 1.0) / den)
                - math.erf((2.0 * z0 + 2.0 * mm - 1.0) / den))
            terms += t
        total += terms
        if m > 0 and abs(terms) < _TERM_CUT:
            break
        m += 1
        if m > 10_000:
            break
    return total


def single_pair_bare_z_scaled(q: float) -> float:
    """Bare <Z> of one pair as a function of q = gamma(0) t / L^2."""
    if q < 0:
        raise ValueError("scaled time must be >= 0")
    if q == 0.0:
        return 1.0
    val, _err = quad(lambda z0: _pair_f(z0, q) ** 2, -0.5, 0.5,
                     epsabs=1e-10, epsrel=1e-10, limit=200)
    return float(val)


def single_pair_corrected_z_scaled(q: float) -> float:
    """Corrected <Z_ec> of one pair as a function of q = gamma(0) t / L^2.

    The relative coordinate of the two walkers carries twice the
    single-anyon variance, so the interval boundaries sit at
    (2m +- 1) / (4 sqrt(2 q)). Evaluated as the absolutely convergent sum
    of signed interval probabilities.
    """
    if q < 0:
        raise ValueError("scaled time must be >= 0")
    if q == 0.0:
        return 1.0
    den = 4.0 * math.sqrt(2.0 * q)
    total = 0.0
    m = 0
    while True:
        terms = 0.0
        for mm in ((m,) if m == 0 else (m, -m)):
            t = 0.5 * ((-1) ** (mm % 2)) * (
                math.erf((2.0 * mm + 1.0) / den)
                - math.erf((2.0 * mm - 1.0) / den))
            terms += t
        total += terms
        if m > 0 and abs(terms) < _TERM_CUT:
            break
        m += 1
        if m > 10_000:
            break
    return total


def single_pair_bare_z(t: float, L: int, gamma0: float) -> float:
    """Continuum-limit bare <Z>(t) for a single diffusing anyon pair."""
    if t < 0:
        raise ValueError("time must be >= 0")
    if not gamma0 > 0:
        raise ValueError("gamma0 must be > 0")
    return single_pair_bare_z_scaled(gamma0 * t / float(L) ** 2)


def single_pair_corrected_z(t: float, L: int, gamma0: float) -> float:
    """Continuum-limit corrected <Z_ec>(t) for a single anyon pair."""
    if t < 0:
        raise ValueError("time must be >= 0")
    if not gamma0 > 0:
        raise ValueError("gamma0 must be > 0")
    return single_pair_corrected_z_scaled(gamma0 * t / float(L) ** 2)
