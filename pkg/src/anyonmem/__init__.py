"""Toric-code quantum memory with long-range repulsive anyon interactions.

Simulation (kinetic Monte Carlo + matching-based readout), equilibrium
statistics (mean field, exact partition sums, Metropolis) and closed-form
lifetime analytics for a thermally coupled topological memory.
"""

__version__ = "0.1.0"

from .bath import (
    BathError,
    ExplicitRatesBath,
    SpinBosonBath,
    UnsupportedEnergyError,
    balanced_explicit_bath,
    rate,
)
from .decoder import (
    InvalidSyndromeError,
    MatchingGraph,
    anyon_positions,
    bare_logical_z,
    build_matching_graph,
    corrected_logical_z,
    min_weight_perfect_matching,
)
from .dynamics import (
    DecayCurves,
    Trajectory,
    decay_threshold_time,
    ensemble_average,
    ensemble_run,
    inject_iid_errors,
    make_sample_schedule,
    run,
    run_single_pair,
    step,
)
from .energy import (
    ErrorPattern,
    InteractionError,
    InteractionSpec,
    coupling,
    flip_delta,
    ising_energy,
    total_energy,
)
from .equilibrium import (
    MeanFieldSolution,
    c_alpha,
    exact_partition_equilibrium,
    mean_field_expansion,
    metropolis_sample,
    nonsplit_pair_ode,
    pair_partition_quasistationary,
    solve_mean_field,
)
from .analytics import (
    DiffusionConstants,
    LifetimePrediction,
    critical_radius,
    diffusion_constant,
    lifetime_interacting,
    lifetime_noninteracting,
    pair_creation_rate_mf,
    single_pair_bare_z,
    single_pair_corrected_z,
)
from .cavity import (
    CavitySpec,
    bogoliubov_frequencies,
    effective_parameters,
    honeycomb_gap,
    plaquette_coupling,
)
from .lattice import (
    LatticeGeometry,
    LatticeSizeError,
    build_lattice,
    euclidean_distance,
    geodesic_edge_path,
    manhattan_distance,
    torus_displacement,
)

__all__ = [name for name in dir() if not name.startswith("_")]
