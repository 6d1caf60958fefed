"""Exact matcher versus brute-force enumeration and networkx blossom."""

import random

import numpy as np
import pytest

from anyonmem._blossom import (
    MatchingInfeasibleError,
    min_weight_perfect_matching_arrays,
)


def brute_force_optimum(n, edges):
    """(weight, rank-sum)-lexicographic optimum over all perfect matchings."""
    best = None

    def rec(remaining, weight, ranksum):
        nonlocal best
        if not remaining:
            if best is None or (weight, ranksum) < best:
                best = (weight, ranksum)
            return
        i = remaining[0]
        for j in remaining[1:]:
            if (i, j) in edges:
                rec([v for v in remaining if v not in (i, j)],
                    weight + edges[(i, j)], ranksum + i * n + j)

    rec(list(range(n)), 0, 0)
    return best


def random_graph(rng, n, density, wmax):
    edges = {}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                edges[(i, j)] = rng.randint(0, wmax)
    return edges


def as_arrays(edges):
    ei = np.array([e[0] for e in edges], dtype=np.int32)
    ej = np.array([e[1] for e in edges], dtype=np.int32)
    w = np.array(list(edges.values()), dtype=np.int64)
    return ei, ej, w


def solve(n, edges, lex=True):
    ei, ej, w = as_arrays(edges)
    pairs = min_weight_perfect_matching_arrays(n, ei, ej, w, lex_tiebreak=lex)
    used = sorted(int(x) for p in pairs for x in p)
    assert used == list(range(n)), "not a perfect matching"
    weight = sum(edges[(int(i), int(j))] for i, j in pairs)
    ranksum = sum(int(i) * n + int(j) for i, j in pairs)
    return pairs, weight, ranksum


def test_two_nodes():
    pairs, w, _ = solve(2, {(0, 1): 7})
    assert [(0, 1)] == [tuple(p) for p in pairs.tolist()]
    assert w == 7


def test_forced_optimum():
    edges = {(0, 1): 1, (2, 3): 1, (0, 2): 10, (1, 3): 10,
             (0, 3): 10, (1, 2): 10}
    pairs, w, _ = solve(4, edges)
    assert sorted(map(tuple, pairs.tolist())) == [(0, 1), (2, 3)]
    assert w == 2


def test_odd_count_infeasible():
    with pytest.raises(MatchingInfeasibleError):
        min_weight_perfect_matching_arrays(
            3, np.array([0], np.int32), np.array([1], np.int32),
            np.array([1], np.int64))


def test_structurally_infeasible():
    # path graph 0-1-2-3 missing the middle pairing options
    edges = {(0, 1): 1, (0, 2): 1, (0, 3): 1}
    with pytest.raises(MatchingInfeasibleError):
        solve(4, edges)


def test_small_fuzz_against_brute_force():
    rng = random.Random(2024)
    checked = 0
    for _ in range(250):
        n = rng.choice([2, 4, 6, 8, 10])
        edges = random_graph(rng, n, rng.uniform(0.3, 1.0), 12)
        if not edges:
            continue
        bf = brute_force_optimum(n, edges)
        try:
            _, w, ranksum = solve(n, edges)
        except MatchingInfeasibleError:
            assert bf is None
            continue
        assert bf is not None
        assert (w, ranksum) == bf
        checked += 1
    assert checked > 150


def test_medium_fuzz_against_networkx():
    nx = pytest.importorskip("networkx")
    rng = random.Random(77)
    for _ in range(60):
        n = rng.choice([12, 20, 30, 40])
        edges = random_graph(rng, n, rng.uniform(0.15, 0.9), 30)
        if not edges:
            continue
        G = nx.Graph()
        G.add_nodes_from(range(n))
        wmax = max(edges.values())
        for (i, j), wt in edges.items():
            G.add_edge(i, j, weight=wmax + 1 - wt)
        m = nx.max_weight_matching(G, maxcardinality=True)
        perfect = len(m) == n // 2
        try:
            _, w, _ = solve(n, edges, lex=False)
        except MatchingInfeasibleError:
            assert not perfect
            continue
        assert perfect
        assert w == sum(edges[(min(i, j), max(i, j))] for i, j in m)


def test_deterministic():
    rng = random.Random(5)
    edges = random_graph(rng, 20, 0.6, 4)
    p1, _, _ = solve(20, edges)
    p2, _, _ = solve(20, edges)
    assert np.array_equal(p1, p2)


def test_tie_break_minimizes_rank_sum():
    # square of equal weights: both pairings weigh 2; the secondary
    # objective sum(i*n + j) picks {(0,3),(1,2)} (9) over {(0,1),(2,3)} (12)
    edges = {(0, 1): 1, (1, 2): 1, (2, 3): 1, (0, 3): 1}
    pairs, w, ranksum = solve(4, edges)
    assert w == 2
    assert ranksum == 9
    assert sorted(map(tuple, pairs.tolist())) == [(0, 3), (1, 2)]
    assert brute_force_optimum(4, edges) == (2, 9)
