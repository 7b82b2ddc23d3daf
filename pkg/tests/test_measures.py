import random
from itertools import combinations

import pytest

from balclust import (
    ClusterNotConnectedInTree,
    DisconnectedCluster,
    Ratio,
    build_graph,
    lightest_cut_clustering,
    make_clustering,
    phi_cluster,
    phi_clustering,
    phi_restricted,
    tree_from_graph,
)
from tests.conftest import random_connected_graph


def test_phi_cluster_examples(g4):
    assert phi_cluster(g4, {0, 1, 2, 3}) == Ratio(0.0, 1.0)
    assert phi_cluster(g4, {0}) == Ratio(0.9, 1.0)
    # Out({c,d}) peaks at bc=0.2; induced spanning tree of {c,d} is cd=0.8
    assert phi_cluster(g4, {2, 3}) == Ratio(0.2, 0.8)


def test_phi_cluster_rejects_disconnected():
    g = build_graph(3, [(0, 1, 0.5), (1, 2, 0.4)])
    with pytest.raises(DisconnectedCluster):
        phi_cluster(g, {0, 2})


def test_phi_clustering_rejects_non_partitions(g4):
    from balclust import NotAPartition

    with pytest.raises(NotAPartition):
        phi_clustering(g4, make_clustering([{0, 1}, {1, 2, 3}]))
    with pytest.raises(NotAPartition):
        phi_clustering(g4, make_clustering([{0, 1}]))


def test_phi_clustering_examples(g4):
    assert phi_clustering(g4, make_clustering([{0, 1}, {2, 3}])) == Ratio(0.2, 0.8)
    assert phi_clustering(g4, make_clustering([{0, 1, 2, 3}])) == Ratio(0.0, 1.0)
    singles = make_clustering([{0}, {1}, {2}, {3}])
    assert phi_clustering(g4, singles) == Ratio(0.9, 1.0)


def test_phi_restricted_examples(g4, g4_tree):
    cc = make_clustering([{0, 1}, {2, 3}])
    assert phi_restricted(g4_tree, cc) == Ratio(0.2, 0.8)
    assert phi_restricted(g4_tree, make_clustering([{0, 1, 2, 3}])) == Ratio(0.0, 1.0)
    # head {a} and {b,c,d}: inner minimum of the tail is bc=0.2
    assert phi_restricted(g4_tree, make_clustering([{0}, {1, 2, 3}])) == Ratio(0.9, 0.2)


def test_phi_restricted_rejects_tree_disconnected(g4, g4_tree):
    # {a, c} is connected in the complete graph but not along the path tree
    with pytest.raises(ClusterNotConnectedInTree):
        phi_restricted(g4_tree, make_clustering([{0, 2}, {1, 3}]))


def _tree_clusterings(tree):
    """Every clustering of the tree: all subsets of edges as cuts."""
    edges = tree.edges
    for r in range(len(edges) + 1):
        for cut in combinations(edges, r):
            yield tree.components_after_cuts([(u, v) for u, v, _ in cut])


def test_graph_measure_equals_tree_measure_on_tree_clusterings():
    # For clusterings whose clusters are connected in the maximum spanning
    # tree, the full-graph measure and the tree-restricted measure agree;
    # checked by exhaustive enumeration on small random graphs.
    rng = random.Random(99)
    for _ in range(25):
        n = rng.randint(3, 7)
        g = random_connected_graph(rng, n)
        tree = tree_from_graph(g)
        for clustering in _tree_clusterings(tree):
            assert phi_clustering(g, clustering) == phi_restricted(tree, clustering)


def test_lightest_cut_construction_quality_bound():
    # cutting the k-1 lightest tree edges keeps every inner edge at least
    # as heavy as every outgoing edge, so the quality never exceeds 1
    rng = random.Random(5)
    one = Ratio(1.0, 1.0)
    for _ in range(40):
        n = rng.randint(2, 9)
        g = random_connected_graph(rng, n)
        tree = tree_from_graph(g)
        for k in range(1, n + 1):
            cc = lightest_cut_clustering(tree, k)
            assert len(cc) == k
            assert not (one < phi_restricted(tree, cc))
