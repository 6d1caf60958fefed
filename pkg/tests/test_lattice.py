import numpy as np
import pytest

from anyonmem.energy import ErrorPattern, InteractionSpec
from anyonmem.lattice import (
    LatticeSizeError,
    build_lattice,
    euclidean_distance,
    geodesic_edge_path,
    manhattan_distance,
    path_z_crossings,
    torus_displacement,
)


@pytest.mark.parametrize("L,edges,plaquettes", [(2, 8, 4), (8, 128, 64)])
def test_counts(L, edges, plaquettes):
    g = build_lattice(L)
    assert g.n_edges == edges
    assert g.n_plaquettes == plaquettes


@pytest.mark.parametrize("L", [0, 1, -3])
def test_too_small_rejected(L):
    with pytest.raises(LatticeSizeError):
        build_lattice(L)


@pytest.mark.parametrize("L", [2, 3, 4, 6])
def test_incidence(L):
    g = build_lattice(L)
    count = np.zeros(g.n_edges, dtype=int)
    for p in range(g.n_plaquettes):
        edges = g.plaquette_edges[p]
        assert len(set(edges.tolist())) == 4
        for e in edges:
            count[e] += 1
            assert p in g.edge_plaquettes[e]
    assert (count == 2).all()


def test_logical_string_is_noncontractible_row():
    g = build_lattice(5)
    assert len(g.logical_z_edges) == 5
    # consecutive horizontal edges in one row form a single closed loop
    plaquette_rows = {tuple(sorted(g.edge_plaquettes[e])) for e in g.logical_z_edges}
    assert len(plaquette_rows) == 5
    assert g.logical_z_mask.sum() == 5


@pytest.mark.parametrize("L", [2, 3, 4, 5])
def test_star_closure(L):
    g = build_lattice(L)
    spec = InteractionSpec()
    for x in range(L):
        for y in range(L):
            pat = ErrorPattern(g, spec)
            for e in g.star_edges(x, y):
                pat.flip(int(e))
            assert pat.N == 0
            z_par = int(np.count_nonzero(pat.flipped & g.logical_z_mask)) % 2
            assert z_par == 0


def test_displacement_examples():
    assert torus_displacement((0, 0), (0, 1), 8) == (0, 1)
    assert torus_displacement((0, 0), (0, 7), 8) == (0, -1)
    dx, dy = torus_displacement((0, 0), (4, 4), 8)
    assert (dx, dy) == (4, 4)
    assert euclidean_distance((0, 0), (4, 4), 8) == pytest.approx(np.sqrt(32))
    # minimum over all 9 periodic images
    best = min(
        np.hypot(4 + 8 * a, 4 + 8 * b) for a in (-1, 0, 1) for b in (-1, 0, 1)
    )
    assert euclidean_distance((0, 0), (4, 4), 8) == pytest.approx(best)


@pytest.mark.parametrize("L", [4, 5, 7])
def test_displacement_translation_invariance(L):
    rng = np.random.default_rng(L)
    for _ in range(50):
        p, q, t = rng.integers(0, L * L, 3)
        g = build_lattice(L)
        px, py = g.plaquette_xy(int(p))
        qx, qy = g.plaquette_xy(int(q))
        tx, ty = g.plaquette_xy(int(t))
        d0 = torus_displacement((px, py), (qx, qy), L)
        d1 = torus_displacement((px + tx, py + ty), (qx + tx, qy + ty), L)
        assert d0 == d1
        # antisymmetric up to the half-way tie convention
        dx, dy = d0
        rx, ry = torus_displacement((qx, qy), (px, py), L)
        assert abs(rx) == abs(dx) and abs(ry) == abs(dy)


def test_geodesic_examples():
    g = build_lattice(8)
    # adjacent plaquettes share exactly one edge
    path = geodesic_edge_path(g, (0, 0), (0, 1))
    assert len(path) == 1
    shared = set(g.plaquette_edges[g.plaquette_index(0, 0)]) \
        & set(g.plaquette_edges[g.plaquette_index(0, 1)])
    assert set(path) == shared
    # straight path of two horizontal steps
    path = geodesic_edge_path(g, (0, 0), (2, 0))
    assert len(path) == 2
    # x-first tie-break
    path = geodesic_edge_path(g, (0, 0), (1, 1))
    assert path[0] == g.vertical_edge(1, 0)
    assert path[1] == g.horizontal_edge(1, 1)
    assert geodesic_edge_path(g, (3, 3), (3, 3)) == []


@pytest.mark.parametrize("L", [3, 4, 5, 6])
def test_geodesic_creates_endpoint_anyons(L):
    g = build_lattice(L)
    spec = InteractionSpec()
    for p in range(g.n_plaquettes):
        for q in range(g.n_plaquettes):
            if p == q:
                continue
            pat = ErrorPattern(g, spec)
            path = geodesic_edge_path(g, p, q)
            assert len(path) == manhattan_distance(p, q, L)
            for e in path:
                pat.flip(e)
            expected = np.zeros(g.n_plaquettes, dtype=np.uint8)
            expected[[p, q]] = 1
            assert np.array_equal(pat.occupations, expected)


@pytest.mark.parametrize("L", [4, 5, 6])
def test_crossing_parity_closed_form(L):
    g = build_lattice(L)
    for p in range(g.n_plaquettes):
        for q in range(g.n_plaquettes):
            if p == q:
                continue
            path = geodesic_edge_path(g, p, q)
            overlap = sum(1 for e in path if g.logical_z_mask[e]) % 2
            assert overlap == path_z_crossings(g, p, q)


@pytest.mark.parametrize("L", [5, 6])
def test_reverse_path_restores_z_parity(L):
    # paths there and back cancel on the logical string, except at exact
    # half-way separations where the two tie-broken geodesics differ by a
    # non-contractible loop
    g = build_lattice(L)
    for p in range(g.n_plaquettes):
        for q in range(g.n_plaquettes):
            if p == q:
                continue
            dx, dy = torus_displacement(p, q, L)
            if 2 * abs(dx) == L or 2 * abs(dy) == L:
                continue
            c1 = path_z_crossings(g, p, q)
            c2 = path_z_crossings(g, q, p)
            assert c1 == c2
