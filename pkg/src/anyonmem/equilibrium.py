"""Equilibrium statistics of the interacting anyon gas, without dynamics.

The mean-field treatment replaces the long-range repulsion felt at one
plaquette by the average over the whole torus: the self-consistent density
solves n = 1/(e^{beta*J + n*L_alpha} + 1) with the dimensionless scale
L_alpha = c_alpha * beta * A * L^(2-alpha), whose geometric constant
c_alpha integrates 1/r^alpha over a unit square centered at the origin.

For constant interaction the configuration energy depends only on the
anyon count, so exact grand-canonical averages reduce to one-dimensional
sums over N with binomial degeneracies (evaluated in log space). Metropolis
sampling over occupation configurations provides the unbiased reference at
any alpha; the nonsplit-pair rate equation describes the early-time
super-Ohmic regime where anyons only exist as adjacent pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq

from .bath import Bath
from .energy import InteractionSpec


class DivergentIntegralError(ValueError):
    """c_alpha diverges for alpha >= 2."""


class UnsupportedAlphaError(ValueError):
    """Closed-form partition sums require constant interaction (alpha = 0)."""


def c_alpha(alpha: float) -> float:
    """Integral of 1/r^alpha over the unit square centered at the origin.

    Reduced by symmetry to a regular 1d integral,
    8/(2-alpha) * int_0^{pi/4} (2 cos t)^(alpha-2) dt, so the quadrature
    never sees the r = 0 singularity. c_0 = 1 and c_1 = 4 ln(1 + sqrt(2)).
    """
    if alpha >= 2:
        raise DivergentIntegralError(
            f"1/r^alpha is not integrable in 2d for alpha = {alpha}")
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    val, err = quad(lambda t: (2.0 * math.cos(t)) ** (alpha - 2.0),
                    0.0, math.pi / 4.0, epsabs=1e-13, epsrel=1e-12)
    return 8.0 / (2.0 - alpha) * val


@dataclass(frozen=True)
class MeanFieldSolution:
    """Self-consistent anyon density and gap for one (L, spec, T)."""

    n_mf: float
    epsilon_mf: float
    L_alpha: float
    c_alpha: float
    L: int
    T: float

    @property
    def N_mf(self) -> float:
        return self.n_mf * self.L**2


def _fermi(x: float) -> float:
    """1 / (e^x + 1), safe against overflow for large |x|."""
    if x > 700.0:
        return math.exp(-x)
    if x < -700.0:
        return 1.0
    return 1.0 / (math.exp(x) + 1.0)


def _solve_density(beta_J: float, L_alpha: float) -> float:
    """Unique root of g(n) = n - 1/(e^{beta_J + n L_alpha} + 1) in (0, 1/2)."""

    def g(n):
        return n - _fermi(beta_J + n * L_alpha)

    n = brentq(g, 0.0, 0.5, xtol=1e-16, rtol=8.9e-16, maxiter=200)
    return float(n)


def solve_mean_field(L: int, spec: InteractionSpec, T: float) -> MeanFieldSolution:
    """Fixed point of the self-consistent density equation.

    The map g(n) = n - 1/(e^{beta J + n L_alpha} + 1) is strictly
    increasing for repulsive coupling, so bisection on [0, 1/2] always
    brackets the unique root.
    """
    if not T > 0:
        raise ValueError("temperature must be > 0")
    beta = 1.0 / T
    ca = c_alpha(spec.alpha)
    La = ca * beta * spec.A * float(L) ** (2.0 - spec.alpha)
    n = _solve_density(beta * spec.J, La)
    eps = spec.J + n * T * La
    residual = abs(n - _fermi(beta * spec.J + n * La))
    if residual > 1e-12:
        raise RuntimeError(f"fixed point residual {residual} exceeds 1e-12")
    return MeanFieldSolution(n_mf=n, epsilon_mf=eps, L_alpha=La, c_alpha=ca,
                             L=int(L), T=float(T))


@dataclass(frozen=True)
class ExpansionResult:
    """Large-L_alpha expansion value with a validity flag."""

    value: float
    in_regime: bool


def mean_field_expansion(L_alpha: float, beta_J: float) -> ExpansionResult:
    """Three-term asymptotic density (ln La - ln ln La - beta J) / La.

    Flagged out-of-regime unless ln L_alpha exceeds both beta J and
    |ln ln L_alpha|, where the dropped higher-order terms are small.
    """
    if L_alpha <= 1.0:
        return ExpansionResult(value=float("nan"), in_regime=False)
    ln_la = math.log(L_alpha)
    ln_ln = math.log(ln_la) if ln_la > 0 else float("-inf")
    value = (ln_la - ln_ln - beta_J) / L_alpha
    in_regime = ln_la > max(beta_J, abs(ln_ln))
    return ExpansionResult(value=value, in_regime=in_regime)


def _log_binom(n: int, k: np.ndarray) -> np.ndarray:
    from scipy.special import gammaln

    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def _truncated_average(log_degeneracy, energy, count, beta, kmax,
                       rel_cut=1e-15):
    """<count> over terms w_k = degeneracy * e^{-beta E_k}, log-space.

    Successive log-terms are concave in k (log-concave binomials plus a
    concave quadratic energy), so once terms fall below rel_cut of the
    running maximum the tail cannot recover and summation stops.
    """
    best = -math.inf
    logs = []
    counts = []
    cut = math.log(rel_cut)
    for k in range(kmax + 1):
        lt = log_degeneracy(k) - beta * energy(k)
        logs.append(lt)
        counts.append(count(k))
        if lt > best:
            best = lt
        elif lt < best + cut:
            break
    arr = np.array(logs)
    wts = np.exp(arr - best)
    cnts = np.array(counts, dtype=float)
    return float((cnts * wts).sum() / wts.sum())


def exact_partition_equilibrium(L: int, spec: InteractionSpec, T: float) -> float:
    """Grand-canonical mean anyon number for constant interaction.

    <N> = sum_k 2k C(L^2, 2k) e^{-beta E_2k} / sum_k C(L^2, 2k) e^{-beta E_2k}
    with E_N = N J + (A/2) N (N-1); valid because the energy depends only
    on the anyon count when alpha = 0.
    """
    if not spec.constant_interaction:
        raise UnsupportedAlphaError(
            "the partition sum over N requires alpha = 0")
    if not T > 0:
        raise ValueError("temperature must be > 0")
    beta = 1.0 / T
    M = L * L
    lg = math.lgamma

    def log_deg(k):
        return lg(M + 1) - lg(2 * k + 1) - lg(M - 2 * k + 1)

    def energy(k):
        N = 2 * k
        return N * spec.J + 0.5 * spec.A * N * (N - 1)

    return _truncated_average(log_deg, energy, lambda k: 2 * k, beta, M // 2)


def pair_partition_quasistationary(L: int, spec: InteractionSpec, T: float) -> float:
    """Quasi-stationary anyon number in the nonsplit-pair regime.

    Counts k diluted single-spin errors among the 2L^2 spins, each holding
    a nonsplit pair (2k anyons): <N> from sum_k C(2L^2, k) e^{-beta E_2k}.
    """
    if not spec.constant_interaction:
        raise UnsupportedAlphaError(
            "the pair partition sum requires alpha = 0")
    if not T > 0:
        raise ValueError("temperature must be > 0")
    beta = 1.0 / T
    M = 2 * L * L
    lg = math.lgamma

    def log_deg(k):
        return lg(M + 1) - lg(k + 1) - lg(M - k + 1)

    def energy(k):
        N = 2 * k
        return N * spec.J + 0.5 * spec.A * N * (N - 1)

    return _truncated_average(log_deg, energy, lambda k: 2 * k, beta, M)


# -- Metropolis sampling of occupation configurations -----------------------

@njit(cache=True)
def _metropolis_const(L, beta, J, A, sweeps, burn_in, seed, samples):
    """Single-toggle Metropolis at alpha = 0 (energy depends on N only)."""
    np.random.seed(seed)
    n_pl = L * L
    occ = np.zeros(n_pl, dtype=np.uint8)
    N = 0
    for s in range(sweeps):
        for _ in range(n_pl):
            p = int(np.random.random() * n_pl)
            if p >= n_pl:
                p = n_pl - 1
            if occ[p]:
                dE = -(J + A * (N - 1))
            else:
                dE = J + A * N
            if dE <= 0.0 or np.random.random() < np.exp(-beta * dE):
                if occ[p]:
                    occ[p] = 0
                    N -= 1
                else:
                    occ[p] = 1
                    N += 1
        if s >= burn_in:
            samples[s - burn_in] = N


@njit(cache=True)
def _metropolis_longrange(L, beta, J, kernel, sweeps, burn_in, seed, samples):
    """Single-toggle Metropolis with cached long-range potentials."""
    np.random.seed(seed)
    n_pl = L * L
    occ = np.zeros(n_pl, dtype=np.uint8)
    phi = np.zeros(n_pl, dtype=np.float64)
    for s in range(sweeps):
        for _ in range(n_pl):
            p = int(np.random.random() * n_pl)
            if p >= n_pl:
                p = n_pl - 1
            delta = 1 - 2 * int(occ[p])
            dE = delta * (J + phi[p])
            if dE <= 0.0 or np.random.random() < np.exp(-beta * dE):
                occ[p] = 1 - occ[p]
                x = p % L
                y = p // L
                for yy in range(L):
                    row = yy * L
                    krow = ((yy - y) % L) * L
                    for xx in range(L):
                        phi[row + xx] += delta * kernel[krow + (xx - x) % L]
        if s >= burn_in:
            N = 0
            for p in range(n_pl):
                N += occ[p]
            samples[s - burn_in] = N


@dataclass(frozen=True)
class MetropolisResult:
    mean_N: float
    stderr: float
    samples: np.ndarray
    sweeps: int
    burn_in: int


def metropolis_sample(L: int, spec: InteractionSpec, T: float, sweeps: int,
                      seed: int) -> MetropolisResult:
    """Metropolis estimate of the equilibrium anyon number.

    Sampling runs over occupation configurations {n_p} (not spin patterns),
    one plaquette toggle per attempt with acceptance min(1, e^{-beta dE});
    this deliberately ignores the even-N constraint of the microscopic
    model, matching the unconstrained lattice-gas distribution whose means
    the partition sums evaluate. The first 20% of sweeps are discarded and
    the standard error uses batch means to absorb autocorrelation.
    """
    if sweeps < 1:
        raise ValueError("sweeps must be >= 1")
    if not T > 0:
        raise ValueError("temperature must be > 0")
    beta = 1.0 / T
    burn_in = sweeps // 5
    kept = sweeps - burn_in
    samples = np.zeros(kept, dtype=np.int64)
    seed32 = np.uint32(np.random.SeedSequence(seed).generate_state(1)[0])
    if spec.constant_interaction:
        _metropolis_const(L, beta, spec.J, spec.A, sweeps, burn_in, seed32,
                          samples)
    else:
        from .energy import coupling_kernel

        kernel = coupling_kernel(spec, L).reshape(-1)
        _metropolis_longrange(L, beta, spec.J, kernel, sweeps, burn_in,
                              seed32, samples)
    mean = float(samples.mean())
    nb = min(20, kept)
    batches = np.array_split(samples, nb)
    bmeans = np.array([b.mean() for b in batches])
    stderr = float(bmeans.std(ddof=1) / math.sqrt(nb)) if nb > 1 else 0.0
    return MetropolisResult(mean_N=mean, stderr=stderr, samples=samples,
                            sweeps=sweeps, burn_in=burn_in)


# -- nonsplit-pair rate equation --------------------------------------------

@dataclass(frozen=True)
class NonsplitPairResult:
    times: np.ndarray
    n_star: np.ndarray
    quasi_stationary: float


def nonsplit_pair_quasistationary(L: int, spec: InteractionSpec, T: float) -> float:
    """Root of N = 4 L^2 e^{-2 beta (J + A N)} (bath-independent balance)."""
    if not spec.constant_interaction:
        raise UnsupportedAlphaError("the nonsplit-pair model requires alpha = 0")
    beta = 1.0 / T

    def h(N):
        return N - 4.0 * L * L * math.exp(-2.0 * beta * (spec.J + spec.A * N))

    return float(brentq(h, 0.0, 4.0 * L * L, xtol=1e-14, rtol=8.9e-16))


def nonsplit_pair_ode(L: int, spec: InteractionSpec, bath: Bath,
                      t_max: float, times=None) -> NonsplitPairResult:
    """Integrate dN*/dt = 4 L^2 gamma(-2 eps*) - N* gamma(2 eps*).

    eps* = J + A N* is the instantaneous pair gap. Starts from N* = 0;
    adaptive 4th/5th-order integration at relative tolerance 1e-8. Also
    returns the quasi-stationary root obtained from the stationarity
    condition.
    """
    if not spec.constant_interaction:
        raise UnsupportedAlphaError("the nonsplit-pair model requires alpha = 0")
    if t_max <= 0:
        raise ValueError("t_max must be > 0")
    if times is None:
        times = np.linspace(0.0, t_max, 256)
    times = np.asarray(times, dtype=float)

    four_l2 = 4.0 * L * L

    def rhs(_t, y):
        eps = spec.J + spec.A * y[0]
        return [four_l2 * bath.rate(-2.0 * eps) - y[0] * bath.rate(2.0 * eps)]

    t_end = max(float(t_max), float(times[-1]))
    sol = solve_ivp(rhs, (0.0, t_end), [0.0], t_eval=times,
                    method="RK45", rtol=1e-8, atol=1e-12)
    if not sol.success:
        raise RuntimeError(f"rate-equation integration failed: {sol.message}")
    nstar = nonsplit_pair_quasistationary(L, spec, 1.0 / bath.beta)
    return NonsplitPairResult(times=times, n_star=sol.y[0],
                              quasi_stationary=nstar)
