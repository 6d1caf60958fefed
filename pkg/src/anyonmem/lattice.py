"""Torus geometry for the L x L plaquette lattice.

Spins live on the 2*L^2 edges of a periodic square lattice; anyons live on
the L^2 plaquettes. Indexing is fixed row-major so that runs are
reproducible: plaquette (x, y) has index y*L + x, horizontal edges occupy
indices 0..L^2-1 (edge h(x, y) = y*L + x sits between plaquette rows y-1
and y), vertical edges occupy L^2..2*L^2-1 (edge v(x, y) = L^2 + y*L + x
sits between plaquette columns x-1 and x).

Two metrics coexist on purpose: pair interactions use the Euclidean
minimal-image distance, while correction paths and matching weights use the
Manhattan minimal-image distance (the number of spin flips needed to move
an anyon).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

PlaquetteLike = "int | tuple[int, int]"


class LatticeSizeError(ValueError):
    """Raised for lattice sizes the torus cannot support."""


@dataclass(frozen=True)
class LatticeGeometry:
    """Static torus geometry shared read-only by all simulation runs."""

    L: int
    n_plaquettes: int
    n_edges: int
    # (n_edges, 2) plaquettes incident to each edge
    edge_plaquettes: np.ndarray = field(repr=False)
    # (n_plaquettes, 4) edges bordering each plaquette
    plaquette_edges: np.ndarray = field(repr=False)
    # sorted edge indices of the non-contractible logical-Z loop (length L)
    logical_z_edges: np.ndarray = field(repr=False)
    # boolean mask over edges, True on the logical-Z loop
    logical_z_mask: np.ndarray = field(repr=False)

    def plaquette_index(self, x: int, y: int) -> int:
        L = self.L
        return (y % L) * L + (x % L)

    def plaquette_xy(self, p: int) -> tuple[int, int]:
        return p % self.L, p // self.L

    def horizontal_edge(self, x: int, y: int) -> int:
        L = self.L
        return (y % L) * L + (x % L)

    def vertical_edge(self, x: int, y: int) -> int:
        L = self.L
        return L * L + (y % L) * L + (x % L)

    def star_edges(self, x: int, y: int) -> list[int]:
        """The 4 edges meeting at vertex (x, y).

        Their sigma-x product is the star stabilizer: flipping all four
        leaves every plaquette occupation (and the logical-Z sign)
        unchanged. This is the only piece of the star sector the plaquette
        dynamics ever needs.
        """
        return [
            self.horizontal_edge(x - 1, y),
            self.horizontal_edge(x, y),
            self.vertical_edge(x, y),
            self.vertical_edge(x, y - 1),
        ]


@functools.lru_cache(maxsize=64)
def build_lattice(L: int) -> LatticeGeometry:
    """Construct the torus geometry for linear size ``L`` (requires L >= 2).

    Plaquette (x, y) is bounded by horizontal edges h(x, y) / h(x, y+1) and
    vertical edges v(x, y) / v(x+1, y). The logical-Z string is the row of
    horizontal edges h(x, 0), a non-contractible loop winding in x.
    Geometries are immutable and cached, so repeated runs share one copy.
    """
    if not isinstance(L, (int, np.integer)) or isinstance(L, bool):
        raise LatticeSizeError(f"lattice size must be an integer, got {L!r}")
    if L < 2:
        raise LatticeSizeError(f"lattice size must be >= 2, got {L}")
    L = int(L)
    n_pl = L * L
    n_edges = 2 * n_pl

    xs, ys = np.meshgrid(np.arange(L), np.arange(L))  # ys*L+xs = row-major p
    x = xs.reshape(-1)
    y = ys.reshape(-1)
    plaquette_edges = np.empty((n_pl, 4), dtype=np.int32)
    plaquette_edges[:, 0] = y * L + x                          # h(x, y)
    plaquette_edges[:, 1] = ((y + 1) % L) * L + x              # h(x, y+1)
    plaquette_edges[:, 2] = n_pl + y * L + x                   # v(x, y)
    plaquette_edges[:, 3] = n_pl + y * L + (x + 1) % L         # v(x+1, y)

    edge_plaquettes = np.empty((n_edges, 2), dtype=np.int32)
    # h(x, y) separates plaquettes (x, y-1) and (x, y)
    edge_plaquettes[:n_pl, 0] = ((y - 1) % L) * L + x
    edge_plaquettes[:n_pl, 1] = y * L + x
    # v(x, y) separates plaquettes (x-1, y) and (x, y)
    edge_plaquettes[n_pl:, 0] = y * L + (x - 1) % L
    edge_plaquettes[n_pl:, 1] = y * L + x

    logical_z = np.arange(L, dtype=np.int32)  # h(x, 0) for all x
    mask = np.zeros(n_edges, dtype=bool)
    mask[logical_z] = True

    for arr in (plaquette_edges, edge_plaquettes, logical_z, mask):
        arr.setflags(write=False)

    return LatticeGeometry(
        L=L,
        n_plaquettes=n_pl,
        n_edges=n_edges,
        edge_plaquettes=edge_plaquettes,
        plaquette_edges=plaquette_edges,
        logical_z_edges=logical_z,
        logical_z_mask=mask,
    )


def _as_xy(p, L: int) -> tuple[int, int]:
    if isinstance(p, (tuple, list, np.ndarray)):
        x, y = int(p[0]), int(p[1])
        return x % L, y % L
    p = int(p)
    return p % L, p // L


def _min_image(d: int, L: int) -> int:
    """Smallest-magnitude representative of d mod L, ties (|d| = L/2) positive."""
    d %= L
    if 2 * d > L:
        d -= L
    return d


def torus_displacement(p, q, L: int) -> tuple[int, int]:
    """Minimal-image displacement (dx, dy) from plaquette p to q.

    Components satisfy -L/2 < dx, dy <= L/2; for even L the ambiguous
    half-way separation resolves to the positive direction.
    """
    x0, y0 = _as_xy(p, L)
    x1, y1 = _as_xy(q, L)
    return _min_image(x1 - x0, L), _min_image(y1 - y0, L)


def euclidean_distance(p, q, L: int) -> float:
    dx, dy = torus_displacement(p, q, L)
    return float(np.hypot(dx, dy))


def manhattan_distance(p, q, L: int) -> int:
    dx, dy = torus_displacement(p, q, L)
    return abs(dx) + abs(dy)


def geodesic_edge_path(geometry: LatticeGeometry, p, q) -> list[int]:
    """Edges whose flips carry an anyon from plaquette p to plaquette q.

    The path is a minimal Manhattan minimal-image lattice path with a fixed
    tie-break: the full x-displacement is traversed first, and half-way
    separations go in the positive direction. Returns [] when p == q.
    """
    L = geometry.L
    x0, y0 = _as_xy(p, L)
    x1, y1 = _as_xy(q, L)
    dx = _min_image(x1 - x0, L)
    dy = _min_image(y1 - y0, L)
    edges: list[int] = []
    x = x0
    sx = 1 if dx > 0 else -1
    for _ in range(abs(dx)):
        if sx > 0:
            edges.append(geometry.vertical_edge(x + 1, y0))
        else:
            edges.append(geometry.vertical_edge(x, y0))
        x = (x + sx) % L
    y = y0
    sy = 1 if dy > 0 else -1
    for _ in range(abs(dy)):
        if sy > 0:
            edges.append(geometry.horizontal_edge(x1, y + 1))
        else:
            edges.append(geometry.horizontal_edge(x1, y))
        y = (y + sy) % L
    return edges


def path_z_crossings(geometry: LatticeGeometry, p, q) -> int:
    """Parity of crossings of geodesic_edge_path(p, q) with the logical-Z loop.

    The logical string is the row of horizontal edges at y = 0, so only the
    y-leg of the path can cross it, and with |dy| <= L/2 it crosses at most
    once: exactly when the y-walk passes the row boundary at y = 0.
    """
    L = geometry.L
    _, y0 = _as_xy(p, L)
    _, y1 = _as_xy(q, L)
    dy = _min_image(y1 - y0, L)
    if dy > 0:
        return 1 if y0 + dy >= L else 0
    if dy < 0:
        return 1 if y0 + dy < 0 else 0
    return 0
