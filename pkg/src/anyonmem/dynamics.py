"""Continuous-time kinetic Monte Carlo for the thermal error dynamics.

One iteration of the rejection-free loop: compute the total flip rate
R = sum_i gamma(omega_i) over all 2L^2 spins, draw the waiting time from
Exp(1/R), flip one spin with probability gamma_i / R, update the caches.
Observables (anyon count, bare and error-corrected logical Z) are recorded
on state snapshots at scheduled sample times; the decoder never mutates
simulation state.

Two engines share this interface: a jitted rate-class loop for constant
interaction (alpha = 0, see _engine) and a vectorized per-event loop for
decaying interactions, which recomputes all edge rates from the potential
cache after every occupation change.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._engine import ConstantInteractionEngine
from .bath import Bath, ExplicitRatesBath
from .decoder import corrected_logical_z_from_positions
from .energy import ErrorPattern, InteractionSpec
from .lattice import LatticeGeometry, build_lattice


class ScheduleMismatchError(ValueError):
    """Trajectories with different sample schedules cannot be aggregated."""


class FrozenStateError(RuntimeError):
    """All transition rates vanished (absorbing state)."""


@dataclass(frozen=True)
class StepEvent:
    edge: int
    dt: float


@dataclass
class Trajectory:
    """Sampled observables of a single run."""

    times: np.ndarray      # (k,) sample times, strictly increasing
    n_anyons: np.ndarray   # (k,) int
    z_bare: np.ndarray     # (k,) +-1
    z_ec: np.ndarray       # (k,) +-1 (or z_bare copies when not decoded)
    n_flipped: np.ndarray | None = None  # (k,) flipped-spin counts
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("sample times must be strictly increasing")
        for arr in (self.z_bare, self.z_ec):
            if not np.all(np.abs(arr) == 1):
                raise ValueError("logical values must be +-1")


@dataclass
class DecayCurves:
    """Pointwise ensemble means with standard errors."""

    times: np.ndarray
    z_mean: np.ndarray
    z_err: np.ndarray
    zec_mean: np.ndarray
    zec_err: np.ndarray
    n_mean: np.ndarray
    n_err: np.ndarray
    n_runs: int


def make_sample_schedule(t_max: float, points_per_decade: int = 64,
                         decades: float = 3.0) -> np.ndarray:
    """Log-spaced sample times ending at t_max, plus t = 0 as first sample."""
    if t_max < 0:
        raise ValueError("t_max must be >= 0")
    if t_max == 0:
        return np.array([0.0])
    n = max(2, int(round(points_per_decade * decades)))
    lo = math.log10(t_max) - decades
    times = np.logspace(lo, math.log10(t_max), n)
    return np.concatenate([[0.0], times])


class SimulationState:
    """Generic mutable KMC state with per-edge rate caches.

    Valid for any (spec, bath); used directly as the long-range engine and
    as the reference implementation for the jitted alpha = 0 loop. The
    cached total rate is re-verified from scratch every `check_interval`
    events.
    """

    CHECK_INTERVAL = 100_000

    def __init__(self, geometry: LatticeGeometry, spec: InteractionSpec,
                 bath: Bath, seed, initial_flips=None):
        self.geometry = geometry
        self.spec = spec
        self.bath = bath
        self.pattern = ErrorPattern(geometry, spec, initial_flips)
        self.time = 0.0
        self._kahan = 0.0
        self.rng = np.random.default_rng(seed)
        self.n_events = 0
        self._ea = geometry.edge_plaquettes[:, 0]
        self._eb = geometry.edge_plaquettes[:, 1]
        self.refresh_rates()

    # -- rate bookkeeping -------------------------------------------------

    def edge_omegas(self) -> np.ndarray:
        """omega_i for all edges from the cached potentials (vectorized)."""
        occ = self.pattern.occupations
        spec = self.spec
        da = 1.0 - 2.0 * occ[self._ea]
        db = 1.0 - 2.0 * occ[self._eb]
        if spec.constant_interaction:
            N = self.pattern.N
            phi_a = spec.A * (N - occ[self._ea])
            phi_b = spec.A * (N - occ[self._eb])
        else:
            phi = self.pattern.potentials
            phi_a = phi[self._ea]
            phi_b = phi[self._eb]
        delta_e = da * (spec.J + phi_a) + db * (spec.J + phi_b) \
            + da * db * spec.A
        return -delta_e

    def refresh_rates(self) -> None:
        self.rates = self.bath.rate_array(self.edge_omegas())
        self._cum = np.cumsum(self.rates)
        self.total_rate = float(self._cum[-1]) if self._cum.size else 0.0

    def verify_total_rate(self, rtol: float = 1e-6) -> None:
        self.pattern.verify()
        fresh = self.bath.rate_array(self.edge_omegas())
        scale = max(fresh.sum(), 1e-300)
        if abs(fresh.sum() - self.total_rate) > rtol * scale:
            raise AssertionError("total-rate cache drifted beyond tolerance")

    # -- event loop --------------------------------------------------------

    def step(self) -> StepEvent | None:
        """One KMC event; returns None from an absorbing state."""
        R = self.total_rate
        if R <= 0.0:
            return None
        dt = self.rng.exponential(1.0 / R)
        u = self.rng.random() * R
        edge = int(np.searchsorted(self._cum, u, side="right"))
        if edge >= self.rates.size:
            edge = self.rates.size - 1
        self._advance_clock(dt)
        self.pattern.flip(edge)
        self.refresh_rates()
        self.n_events += 1
        if self.n_events % self.CHECK_INTERVAL == 0:
            self.verify_total_rate()
        return StepEvent(edge=edge, dt=dt)

    def _advance_clock(self, dt: float) -> None:
        y = dt - self._kahan
        t = self.time + y
        self._kahan = (t - self.time) - y
        self.time = t

    def advance_to(self, t_target: float) -> int:
        """Events until the clock reaches t_target (state left exactly there)."""
        frozen = 0
        while True:
            R = self.total_rate
            if R <= 0.0:
                self.time = t_target
                self._kahan = 0.0
                frozen = 1
                break
            dt = self.rng.exponential(1.0 / R)
            if self.time + (dt - self._kahan) >= t_target:
                self.time = t_target
                self._kahan = 0.0
                break
            u = self.rng.random() * R
            edge = int(np.searchsorted(self._cum, u, side="right"))
            if edge >= self.rates.size:
                edge = self.rates.size - 1
            self._advance_clock(dt)
            self.pattern.flip(edge)
            self.refresh_rates()
            self.n_events += 1
            if self.n_events % self.CHECK_INTERVAL == 0:
                self.verify_total_rate()
        return frozen

    # -- snapshot interface shared with the jitted engine -------------------

    @property
    def n_anyons(self) -> int:
        return self.pattern.N

    @property
    def z_bare(self) -> int:
        crossings = int(np.count_nonzero(
            self.pattern.flipped & self.geometry.logical_z_mask))
        return -1 if crossings % 2 else 1

    @property
    def occ(self) -> np.ndarray:
        return self.pattern.occupations


def step(state: SimulationState, spec=None, bath=None, geometry=None,
         rng=None) -> StepEvent | None:
    """Single KMC iteration on a generic simulation state."""
    return state.step()


def _derive_seeds(seed: int, k: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(int(seed)).spawn(k)


def _fast_engine_ok(spec: InteractionSpec) -> bool:
    return spec.constant_interaction


def run(L: int, spec: InteractionSpec, bath: Bath, t_max: float,
        schedule: np.ndarray | None = None, seed: int = 0,
        decoder_mode: str = "auto", record_zec: bool = True,
        initial_flips: np.ndarray | None = None,
        points_per_decade: int = 64, decades: float = 3.0,
        geometry: LatticeGeometry | None = None,
        engine: str = "auto") -> Trajectory:
    """One simulation run; deterministic given (seed, configuration).

    z_bare is the flip parity on the logical string; z_ec re-decodes a
    snapshot of the state at every sample time. For constant interaction
    the jitted rate-class engine is used, otherwise the vectorized
    long-range loop.
    """
    if t_max < 0:
        raise ValueError("t_max must be >= 0")
    if isinstance(bath, ExplicitRatesBath) and spec.A != 0:
        raise ValueError(
            "explicit-rate baths only support the non-interacting model "
            "(A = 0); flip energies would leave {0, +-2J}")
    geometry = build_lattice(L) if geometry is None else geometry
    if schedule is None:
        schedule = make_sample_schedule(t_max, points_per_decade, decades)
    schedule = np.asarray(schedule, dtype=float)
    if schedule.ndim != 1 or schedule.size == 0:
        raise ValueError("schedule must be a non-empty 1d array")
    if np.any(np.diff(schedule) <= 0):
        raise ValueError("schedule must be strictly increasing")

    ss = np.random.SeedSequence(int(seed))
    engine_seed, decoder_seed = ss.spawn(2)
    use_fast = _fast_engine_ok(spec) if engine == "auto" else engine == "classes"
    if use_fast:
        eng = ConstantInteractionEngine(
            geometry, spec, bath,
            seed=engine_seed.generate_state(1, np.uint32)[0],
            initial_flips=initial_flips)
    else:
        eng = SimulationState(geometry, spec, bath, seed=engine_seed,
                              initial_flips=initial_flips)

    k = schedule.size
    n_anyons = np.zeros(k, dtype=np.int64)
    n_flipped = np.zeros(k, dtype=np.int64)
    z_bare = np.ones(k, dtype=np.int8)
    z_ec = np.ones(k, dtype=np.int8)

    flipped_view = eng.flipped if use_fast else eng.pattern.flipped
    for i, t_s in enumerate(schedule):
        if t_s > 0:
            eng.advance_to(float(t_s))
        n_anyons[i] = eng.n_anyons
        n_flipped[i] = int(np.count_nonzero(flipped_view))
        z_bare[i] = eng.z_bare
        if record_zec:
            positions = np.nonzero(eng.occ)[0].astype(np.int32)
            z_ec[i] = corrected_logical_z_from_positions(
                positions, int(z_bare[i]), geometry, mode=decoder_mode)
        else:
            z_ec[i] = z_bare[i]

    meta = {
        "L": int(L),
        "seed": int(seed),
        "t_max": float(t_max),
        "engine": "classes" if use_fast else "long-range",
        "decoder_mode": decoder_mode,
        "record_zec": bool(record_zec),
        "n_events": int(eng.n_events),
    }
    return Trajectory(times=schedule.copy(), n_anyons=n_anyons,
                      z_bare=z_bare, z_ec=z_ec, n_flipped=n_flipped,
                      meta=meta)


def run_single_pair(L: int, bath: ExplicitRatesBath, t_max: float,
                    schedule: np.ndarray | None = None, seed: int = 0,
                    **kwargs) -> Trajectory:
    """Two-anyon run: one random spin flipped at t = 0, pair processes off.

    Requires a bath with gamma_minus = 0 so that creation and annihilation
    never fire and the single pair diffuses forever.
    """
    if bath.gamma_minus != 0:
        raise ValueError("single-pair runs need gamma_minus = 0")
    geometry = kwargs.pop("geometry", None) or build_lattice(L)
    init_ss = np.random.SeedSequence(int(seed)).spawn(1)[0]
    first_edge = int(np.random.default_rng(init_ss).integers(geometry.n_edges))
    flips = np.zeros(geometry.n_edges, dtype=bool)
    flips[first_edge] = True
    return run(L, InteractionSpec(), bath, t_max, schedule=schedule,
               seed=seed + 1_000_003, initial_flips=flips,
               geometry=geometry, **kwargs)


def ensemble_average(trajectories) -> DecayCurves:
    """Pointwise mean and standard error over a common sample schedule."""
    trajectories = list(trajectories)
    if not trajectories:
        raise ValueError("need at least one trajectory")
    t0 = trajectories[0].times
    for tr in trajectories[1:]:
        if tr.times.shape != t0.shape or not np.allclose(tr.times, t0):
            raise ScheduleMismatchError("trajectories use different schedules")
    nruns = len(trajectories)
    z = np.stack([tr.z_bare for tr in trajectories]).astype(float)
    zec = np.stack([tr.z_ec for tr in trajectories]).astype(float)
    nn = np.stack([tr.n_anyons for tr in trajectories]).astype(float)

    def mean_err(a):
        mean = a.mean(axis=0)
        if nruns > 1:
            err = a.std(axis=0, ddof=1) / math.sqrt(nruns)
        else:
            err = np.zeros_like(mean)
        return mean, err

    zm, ze = mean_err(z)
    zem, zee = mean_err(zec)
    nm, ne = mean_err(nn)
    return DecayCurves(times=t0.copy(), z_mean=zm, z_err=ze, zec_mean=zem,
                       zec_err=zee, n_mean=nm, n_err=ne, n_runs=nruns)


def decay_threshold_time(times, values, level: float) -> float | None:
    """First time the curve crosses ``level`` (linear interpolation).

    Returns None when the curve never reaches the level; the last sample
    time is then a lower bound on the crossing.
    """
    if not 0 < level < 1:
        raise ValueError("level must lie in (0, 1)")
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if values[0] < level:
        raise ValueError("curve must start at or above the level")
    below = np.nonzero(values < level)[0]
    if below.size == 0:
        return None
    i = int(below[0])
    t0, t1 = times[i - 1], times[i]
    v0, v1 = values[i - 1], values[i]
    if v0 == v1:
        return float(t1)
    return float(t0 + (v0 - level) * (t1 - t0) / (v0 - v1))


def inject_iid_errors(L: int, f: float, seed,
                      spec: InteractionSpec | None = None,
                      geometry: LatticeGeometry | None = None) -> ErrorPattern:
    """Independent sigma-x errors with probability f on each of 2L^2 spins."""
    if not 0 <= f <= 1:
        raise ValueError("error probability must lie in [0, 1]")
    geometry = build_lattice(L) if geometry is None else geometry
    spec = InteractionSpec() if spec is None else spec
    rng = np.random.default_rng(seed)
    flips = rng.random(geometry.n_edges) < f
    return ErrorPattern(geometry, spec, flips)


# -- parallel ensembles ----------------------------------------------------

def pool_context():
    """Forking pools inherit warmed-up jitted code; fall back to spawn."""
    import multiprocessing as mp

    method = "fork" if "fork" in mp.get_all_start_methods() else "spawn"
    return mp.get_context(method)


def _run_one(args):
    kind, kwargs = args
    if kind == "single_pair":
        return run_single_pair(**kwargs)
    return run(**kwargs)


def ensemble_run(L: int, spec: InteractionSpec, bath: Bath, t_max: float,
                 runs: int, base_seed: int = 0, workers: int = 1,
                 schedule: np.ndarray | None = None, kind: str = "standard",
                 **kwargs) -> list[Trajectory]:
    """Independent runs with per-run child seeds; order is deterministic
    regardless of worker count."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if schedule is None:
        schedule = make_sample_schedule(
            t_max,
            kwargs.pop("points_per_decade", 64),
            kwargs.pop("decades", 3.0),
        )
    seeds = [int(base_seed) + 1_000_000_007 * i for i in range(runs)]
    jobs = []
    for s in seeds:
        kw = dict(L=L, bath=bath, t_max=t_max, schedule=schedule, seed=s,
                  **kwargs)
        if kind == "standard":
            kw["spec"] = spec
        jobs.append(("single_pair" if kind == "single_pair" else "run", kw))
    if workers <= 1:
        return [_run_one(j) for j in jobs]
    with pool_context().Pool(workers) as pool:
        return list(pool.map(_run_one, jobs, chunksize=max(1, runs // (8 * workers))))
