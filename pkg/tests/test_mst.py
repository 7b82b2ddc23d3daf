import random
from itertools import combinations

import pytest

from balclust import (
    Disconnected,
    NotATree,
    build_graph,
    maximum_spanning_tree,
    root_tree,
    verify_mst,
)
from balclust.graph import is_connected_in
from tests.conftest import random_connected_graph


def enumerate_spanning_trees(graph):
    """All spanning trees by filtering (n-1)-subsets of edges; exhaustive
    oracle, fine for n <= 6."""
    n = graph.node_count
    for subset in combinations(graph.edges, n - 1):
        if is_connected_in(frozenset(range(n)), [(u, v) for u, v, _ in subset]):
            yield subset


def test_g4_mst_by_exhaustive_enumeration(g4):
    # enumerate all 16 spanning trees of K4 and take the max total weight
    best = max(enumerate_spanning_trees(g4), key=lambda t: sum(w for _, _, w in t))
    assert maximum_spanning_tree(g4) == tuple(sorted(best))
    assert maximum_spanning_tree(g4) == ((0, 1, 0.9), (1, 2, 0.2), (2, 3, 0.8))


def test_tree_input_returns_itself():
    edges = [(0, 1, 0.3), (1, 2, 0.7), (1, 3, 0.5)]
    g = build_graph(4, edges)
    assert maximum_spanning_tree(g) == tuple(sorted(edges))


def test_triangle_drops_lightest_edge():
    g = build_graph(3, [(0, 1, 0.9), (1, 2, 0.8), (0, 2, 0.5)])
    assert maximum_spanning_tree(g) == ((0, 1, 0.9), (1, 2, 0.8))


def test_maximum_weight_over_all_spanning_trees():
    rng = random.Random(11)
    for _ in range(20):
        n = rng.randint(3, 6)
        g = random_connected_graph(rng, n)
        got = sum(w for _, _, w in maximum_spanning_tree(g))
        want = max(sum(w for _, _, w in t) for t in enumerate_spanning_trees(g))
        assert got == want


def test_output_invariant_to_edge_order():
    rng = random.Random(23)
    for _ in range(20):
        n = rng.randint(3, 8)
        g = random_connected_graph(rng, n)
        baseline = maximum_spanning_tree(g)
        shuffled = list(g.edges)
        rng.shuffle(shuffled)
        g2 = build_graph(n, shuffled)
        assert maximum_spanning_tree(g2) == baseline


def test_tie_break_prefers_smaller_endpoints():
    # triangle with all-equal weights: the two lexicographically smallest
    # edges win
    g = build_graph(3, [(0, 1, 0.5), (0, 2, 0.5), (1, 2, 0.5)])
    assert maximum_spanning_tree(g) == ((0, 1, 0.5), (0, 2, 0.5))


def test_verify_mst_examples(g4):
    assert verify_mst(g4, [(0, 1, 0.9), (1, 2, 0.2), (2, 3, 0.8)])
    # star at a: the non-tree edge cd=0.8 beats tree edge ac=0.15 on its path
    assert not verify_mst(g4, [(0, 2, 0.15), (0, 3, 0.1), (0, 1, 0.9)])


def test_verify_mst_tree_input_trivially_true():
    edges = [(0, 1, 0.3), (1, 2, 0.7)]
    g = build_graph(3, edges)
    assert verify_mst(g, edges)


def test_mst_always_passes_cycle_property():
    rng = random.Random(31)
    for _ in range(30):
        n = rng.randint(3, 8)
        g = random_connected_graph(rng, n)
        assert verify_mst(g, maximum_spanning_tree(g))


def test_root_tree_path_structure():
    tree = root_tree([(0, 1, 0.9), (1, 2, 0.2), (2, 3, 0.8)], 0)
    assert tree.parent == {1: (0, 0.9), 2: (1, 0.2), 3: (2, 0.8)}
    assert tree.post_order == (3, 2, 1, 0)
    assert tree.children[0] == (1,)
    assert tree.distinct_weights == (0.2, 0.8, 0.9)


def test_root_tree_single_node_and_star():
    single = root_tree([], 0, 1)
    assert single.parent == {}
    assert single.post_order == (0,)
    star = root_tree([(0, 1, 0.5), (0, 2, 0.6)], 0)
    assert star.children[0] == (1, 2)


def test_root_tree_rejects_non_trees():
    with pytest.raises(NotATree):
        root_tree([(0, 1, 0.5), (0, 1, 0.6)], 0, 3)
    with pytest.raises(NotATree):
        root_tree([(0, 1, 0.5), (1, 2, 0.4), (0, 2, 0.3)], 0, 3)


def test_disconnected_graph_has_no_spanning_tree():
    with pytest.raises(Disconnected):
        build_graph(4, [(0, 1, 0.5), (2, 3, 0.5)])


def test_components_after_cuts(g4_tree):
    comps = g4_tree.components_after_cuts([(1, 2)])
    assert comps == (frozenset({0, 1}), frozenset({2, 3}))
    assert g4_tree.components_after_cuts([]) == (frozenset({0, 1, 2, 3}),)
