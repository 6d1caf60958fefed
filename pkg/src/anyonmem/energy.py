"""Plaquette-sector Hamiltonian: couplings, total energies, flip costs.

The energy of an error pattern is E = sum_p J*n_p + (1/2) sum_{p!=p'}
U_pp' n_p n_p', with the pair coupling U_pp' = 2J for p = p' and
A / r_pp'^alpha otherwise (Euclidean minimal-image distance r).

Energies are dimensionless with J = 1 as the natural unit. For constant
interaction (alpha = 0) the energy depends on the anyon count alone,
E_N = N*J + (A/2)*N*(N-1), and no per-plaquette potential cache is kept.
For alpha > 0 the pattern maintains Phi_p = sum_{p'!=p} U_pp' n_p', updated
for all L^2 plaquettes whenever an occupation changes; that O(L^2) cost per
event is inherent to the long-range model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import LatticeGeometry


class InteractionError(ValueError):
    """Raised for interaction parameters outside the supported model."""


@dataclass(frozen=True)
class InteractionSpec:
    """Pair-interaction parameters (J, A, alpha).

    J > 0 is the single-anyon gap, A >= 0 the repulsion strength and
    0 <= alpha < 2 the power-law decay exponent. alpha >= 2 (short range)
    is rejected: it does not alter the lifetime scaling and is outside the
    model. Attractive couplings (A < 0) are likewise rejected.
    """

    J: float = 1.0
    A: float = 0.0
    alpha: float = 0.0

    def __post_init__(self):
        if not self.J > 0:
            raise InteractionError(f"J must be > 0, got {self.J}")
        if self.A < 0:
            raise InteractionError(f"A must be >= 0 (repulsive), got {self.A}")
        if not 0 <= self.alpha < 2:
            raise InteractionError(
                f"alpha must lie in [0, 2), got {self.alpha}"
            )

    @property
    def constant_interaction(self) -> bool:
        """True when the fast alpha = 0 path applies."""
        return self.alpha == 0


def coupling(spec: InteractionSpec, p, q, geometry: LatticeGeometry) -> float:
    """Pair coupling U_pq: 2J on the diagonal, A / r^alpha otherwise."""
    L = geometry.L
    dx, dy = _displacement(p, q, L)
    if dx == 0 and dy == 0:
        return 2.0 * spec.J
    if spec.A == 0.0:
        return 0.0
    r = float(np.hypot(dx, dy))
    return spec.A / r**spec.alpha


def _displacement(p, q, L):
    from .lattice import torus_displacement

    return torus_displacement(p, q, L)


def coupling_kernel(spec: InteractionSpec, L: int) -> np.ndarray:
    """Off-diagonal couplings as an (L, L) translation kernel.

    K[dy % L, dx % L] = A / r(dx, dy)^alpha with minimal-image r, and
    K[0, 0] = 0 so that rolled copies of the kernel add no self term.
    """
    idx = np.arange(L)
    d = np.minimum(idx, L - idx).astype(float)
    r2 = d[:, None] ** 2 + d[None, :] ** 2
    K = np.zeros((L, L))
    nz = r2 > 0
    K[nz] = spec.A / r2[nz] ** (spec.alpha / 2.0)
    return K


def kernel_row_sum(spec: InteractionSpec, L: int) -> float:
    """sum_{p' != p} U_pp' for any fixed p (translation invariant)."""
    return float(coupling_kernel(spec, L).sum())


class ErrorPattern:
    """Mutable set of flipped spins with derived anyon occupations.

    Owns per-plaquette potential caches for alpha > 0; a pattern is bound to
    one (geometry, spec) pair and to a single simulation run (single-owner
    mutable state).
    """

    def __init__(self, geometry: LatticeGeometry, spec: InteractionSpec,
                 flipped: np.ndarray | None = None):
        self.geometry = geometry
        self.spec = spec
        if flipped is None:
            flipped = np.zeros(geometry.n_edges, dtype=bool)
        else:
            flipped = np.asarray(flipped, dtype=bool).copy()
            if flipped.shape != (geometry.n_edges,):
                raise ValueError(
                    f"flipped must have shape ({geometry.n_edges},), "
                    f"got {flipped.shape}"
                )
        self.flipped = flipped
        self.occupations = self._occupations_from_flipped(flipped)
        self.N = int(self.occupations.sum())
        if spec.constant_interaction:
            self.potentials = None
            self._kernel = None
        else:
            self._kernel = coupling_kernel(spec, geometry.L)
            self.potentials = self._potentials_from_scratch()

    @classmethod
    def empty(cls, geometry: LatticeGeometry, spec: InteractionSpec) -> "ErrorPattern":
        return cls(geometry, spec)

    def _occupations_from_flipped(self, flipped: np.ndarray) -> np.ndarray:
        counts = flipped[self.geometry.plaquette_edges].sum(axis=1)
        return (counts % 2).astype(np.uint8)

    def _potentials_from_scratch(self) -> np.ndarray:
        L = self.geometry.L
        occ = self.occupations.reshape(L, L).astype(float)
        # Phi = K * occ as a cyclic convolution, done exactly via FFT-free
        # accumulation for moderate L (called only on construction/verify).
        phi = np.zeros((L, L))
        for y, x in zip(*np.nonzero(occ)):
            phi += np.roll(np.roll(self._kernel, y, axis=0), x, axis=1)
        return phi.reshape(-1)

    def copy(self) -> "ErrorPattern":
        new = object.__new__(ErrorPattern)
        new.geometry = self.geometry
        new.spec = self.spec
        new.flipped = self.flipped.copy()
        new.occupations = self.occupations.copy()
        new.N = self.N
        new._kernel = self._kernel
        new.potentials = None if self.potentials is None else self.potentials.copy()
        return new

    def flip(self, edge: int) -> None:
        """Apply one sigma-x error, updating occupations and caches."""
        self.flipped[edge] = ~self.flipped[edge]
        a, b = self.geometry.edge_plaquettes[edge]
        for p in (int(a), int(b)):
            old = self.occupations[p]
            delta = 1 - 2 * int(old)
            self.occupations[p] = 1 - old
            self.N += delta
            if self.potentials is not None:
                L = self.geometry.L
                x, y = p % L, p // L
                shifted = np.roll(np.roll(self._kernel, y, axis=0), x, axis=1)
                self.potentials += delta * shifted.reshape(-1)

    def verify(self, rtol: float = 1e-9) -> None:
        """Recompute all caches from scratch and check consistency."""
        occ = self._occupations_from_flipped(self.flipped)
        if not np.array_equal(occ, self.occupations):
            raise AssertionError("occupation cache inconsistent with flips")
        if self.N != int(occ.sum()):
            raise AssertionError("anyon count cache inconsistent")
        if self.N % 2 != 0:
            raise AssertionError("anyon count must be even")
        if self.potentials is not None:
            fresh = self._potentials_from_scratch()
            scale = max(np.abs(fresh).max(), 1.0)
            if np.abs(fresh - self.potentials).max() > rtol * scale:
                raise AssertionError("potential cache drifted beyond tolerance")


def total_energy(pattern: ErrorPattern, spec: InteractionSpec | None = None) -> float:
    """Total pattern energy N*J + (1/2) sum_{p!=p'} U_pp' n_p n_p'."""
    spec = pattern.spec if spec is None else spec
    N = pattern.N
    if spec.constant_interaction:
        return N * spec.J + 0.5 * spec.A * N * (N - 1)
    phi = pattern.potentials
    occ = pattern.occupations
    return N * spec.J + 0.5 * float(phi @ occ)


def constant_interaction_energy(N: int, spec: InteractionSpec) -> float:
    """E_N = N*J + (A/2) N (N-1), valid for alpha = 0 only."""
    if not spec.constant_interaction:
        raise InteractionError("closed-form E_N requires alpha = 0")
    return N * spec.J + 0.5 * spec.A * N * (N - 1)


def flip_delta(pattern: ErrorPattern, spec: InteractionSpec | None, edge: int) -> float:
    """Energy released by flipping ``edge``: omega = E(before) - E(after).

    Computed incrementally from the cached potentials of the two incident
    plaquettes plus their mutual coupling; positive omega means the flip
    releases energy (so pair creation has omega = -2J - ...).
    """
    spec = pattern.spec if spec is None else spec
    a, b = pattern.geometry.edge_plaquettes[edge]
    na = int(pattern.occupations[a])
    nb = int(pattern.occupations[b])
    da = 1 - 2 * na
    db = 1 - 2 * nb
    J = spec.J
    if spec.constant_interaction:
        A = spec.A
        N = pattern.N
        phi_a = A * (N - na)
        phi_b = A * (N - nb)
        u_ab = A
    else:
        phi_a = float(pattern.potentials[a])
        phi_b = float(pattern.potentials[b])
        # the two plaquettes of an edge sit at unit distance, so U_ab = A
        u_ab = spec.A
    delta_e = da * (J + phi_a) + db * (J + phi_b) + da * db * u_ab
    return -delta_e


@dataclass(frozen=True)
class IsingForm:
    """Ising-variable rewrite of the pattern energy.

    ``value`` is the field + pair part expressed in s_p = 1 - 2 n_p;
    ``constant`` is the configuration-independent offset such that
    value + constant equals the lattice-gas energy exactly.
    """

    value: float
    constant: float


def ising_energy(pattern: ErrorPattern, spec: InteractionSpec | None = None) -> IsingForm:
    """Evaluate the equivalent long-range Ising form of the energy.

    E = -sum_p (J/2 + sum_{p'!=p} U_pp'/4) s_p
        + (1/8) sum_{p!=p'} U_pp' s_p s_p' + constant,
    with s_p = 1 - 2 n_p and constant = J L^2 / 2 + (1/8) sum_{p!=p'} U_pp'.
    """
    spec = pattern.spec if spec is None else spec
    geom = pattern.geometry
    L = geom.L
    n_pl = geom.n_plaquettes
    s = 1.0 - 2.0 * pattern.occupations.astype(float)
    row_sum = kernel_row_sum(spec, L)
    constant = 0.5 * spec.J * n_pl + 0.125 * n_pl * row_sum

    field_term = -float(np.sum((0.5 * spec.J + 0.25 * row_sum) * s))
    if spec.A == 0.0:
        pair_term = 0.0
    else:
        # sum_{p!=p'} U_pp' s_p s_p' = s . (K * s) with cyclic convolution
        K = coupling_kernel(spec, L)
        sg = s.reshape(L, L)
        conv = _cyclic_convolve(K, sg)
        pair_term = 0.125 * float(np.sum(sg * conv))
    return IsingForm(value=field_term + pair_term, constant=constant)


def _cyclic_convolve(kernel: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """(kernel * grid)[p] = sum_{p'} kernel[p - p'] grid[p'] on the torus."""
    fk = np.fft.rfft2(kernel)
    fg = np.fft.rfft2(grid)
    return np.fft.irfft2(fk * fg, s=kernel.shape)
