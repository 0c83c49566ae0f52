import math

import networkx as nx
import numpy as np
import pytest

from jamlab.core import Graph, Params, SizeError
from jamlab.crg import sample_crg
from jamlab.mc import greedy_counts
from jamlab.rgg import sample_rgg
from jamlab.rng import RngStream
from jamlab.rsa import exact_expected_jam, greedy_jam, is_independent, is_maximal_independent
from oracles import expected_jam_all_orders, expected_jam_by_permutations, expected_jam_by_recursion

CYCLE4_EXACT = 2.0  # pinned from the recursion oracle


def _graph(n, edges):
    return Graph.from_edges(n, list(edges))


def test_empty_and_complete():
    for n in (1, 5, 40):
        assert greedy_jam(Graph.empty(n), RngStream(n)).jam_count == n
        assert greedy_jam(Graph.complete(n), RngStream(n)).jam_count == 1
        assert exact_expected_jam(Graph.complete(min(n, 10))) == 1.0


def test_path_three():
    p3 = _graph(3, [(0, 1), (1, 2)])
    assert exact_expected_jam(p3) == pytest.approx(5 / 3, abs=1e-15)
    assert expected_jam_by_permutations(3, [(0, 1), (1, 2)]) == pytest.approx(5 / 3)


def test_four_cycle_golden():
    edges = [(0, 1), (1, 2), (2, 3), (3, 0)]
    assert expected_jam_by_recursion(4, edges) == CYCLE4_EXACT
    assert exact_expected_jam(_graph(4, edges)) == CYCLE4_EXACT


def test_size_limit():
    with pytest.raises(SizeError):
        exact_expected_jam(Graph.empty(11))


def test_all_graphs_up_to_seven_vertices():
    """Sequential uniform choice and the random-permutation pass agree in mean
    on every graph with at most 7 vertices (exhaustive over the n! orders)."""
    atlas = nx.graph_atlas_g()
    assert len(atlas) == 1253
    for h in atlas[1:]:
        n = h.number_of_nodes()
        edges = list(h.edges())
        exact = exact_expected_jam(_graph(n, edges))
        assert exact == pytest.approx(expected_jam_all_orders(n, edges), abs=1e-12)
        if n <= 4:
            assert exact == pytest.approx(expected_jam_by_permutations(n, edges), abs=1e-12)


def test_exact_matches_independent_recursion_on_random_graphs():
    rng = np.random.default_rng(3)
    for n in (8, 9, 10):
        for _ in range(5):
            edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.35]
            assert exact_expected_jam(_graph(n, edges)) == pytest.approx(
                expected_jam_by_recursion(n, edges), abs=1e-12)


@pytest.mark.parametrize("name, g", [
    ("petersen", Graph.from_edges(10, list(nx.petersen_graph().edges()))),
    ("star", Graph.from_edges(8, [(0, k) for k in range(1, 8)])),
    ("path8", Graph.from_edges(8, [(k, k + 1) for k in range(7)])),
])
def test_monte_carlo_matches_exact(name, g):
    counts = greedy_counts(g, 100_000, 12)
    se = counts.std(ddof=1) / math.sqrt(counts.size)
    assert abs(counts.mean() - exact_expected_jam(g)) <= 3 * se


def test_jam_sets_independent_and_maximal():
    graphs = [sample_rgg(Params(2000, 10, 0, 2), RngStream(s)) for s in range(5)]
    graphs += [sample_crg(Params(2000, 10, 0.5), RngStream(s)) for s in range(5)]
    graphs += [Graph.empty(10), Graph.complete(10)]
    for i, g in enumerate(graphs):
        res = greedy_jam(g, RngStream(77, i))
        assert res.jam_count == res.active.size
        assert res.jam_fraction == res.jam_count / g.n
        assert is_maximal_independent(g, res.active)


def test_independence_checkers():
    p3 = _graph(3, [(0, 1), (1, 2)])
    assert is_independent(p3, [0, 2]) and is_maximal_independent(p3, [0, 2])
    assert is_independent(p3, [0]) and not is_maximal_independent(p3, [0])
    assert not is_independent(p3, [0, 1])
    assert is_maximal_independent(p3, [1])
