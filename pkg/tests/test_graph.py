import random

import pytest
from hypothesis import given, settings, strategies as st

from balclust import (
    Disconnected,
    DuplicateEdge,
    SelfLoop,
    WeightOutOfRange,
    build_graph,
    make_clustering,
    max_out,
    phi_cluster,
    rescale_weights,
)


def test_minimal_connected_graph():
    g = build_graph(2, [(0, 1, 0.5)])
    assert g.node_count == 2
    assert g.edges == ((0, 1, 0.5),)
    assert g.node_labels == ("0", "1")


def test_boundary_weight_rejected():
    with pytest.raises(WeightOutOfRange):
        build_graph(2, [(0, 1, 1.0)])
    with pytest.raises(WeightOutOfRange):
        build_graph(2, [(0, 1, 0.0)])


def test_isolated_node_rejected():
    with pytest.raises(Disconnected):
        build_graph(3, [(0, 1, 0.9)])


def test_self_loop_and_duplicate_rejected():
    with pytest.raises(SelfLoop):
        build_graph(2, [(0, 0, 0.5), (0, 1, 0.5)])
    with pytest.raises(DuplicateEdge):
        build_graph(2, [(0, 1, 0.5), (1, 0, 0.6)])


def test_max_out_examples(g4):
    # scanned by hand over the crossing edges of each case
    assert max_out(g4, {0, 1, 2, 3}) == 0.0  # whole node set convention
    assert max_out(g4, {0, 1}) == 0.2  # crossing: bc=.2, ac=.15, ad=.1, bd=.12
    assert max_out(g4, {0}) == 0.9  # incident to a: ab=.9, ac=.15, ad=.1


def test_max_out_dense_and_sparse_agree():
    rng = random.Random(7)
    n = 8
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = [(u, v, rng.uniform(0.01, 0.99)) for u, v in pairs]
    dense = build_graph(n, edges)  # complete: dense matrix path
    tree_edges = edges[: n - 1]
    # chain over first appearances is not guaranteed connected; build a path
    sparse = build_graph(n, [(i, i + 1, rng.uniform(0.01, 0.99)) for i in range(n - 1)])
    assert dense.matrix is not None and sparse.matrix is None
    for _ in range(50):
        size = rng.randint(1, n)
        members = frozenset(rng.sample(range(n), size))
        brute = max((w for u, v, w in dense.edges if (u in members) != (v in members)), default=0.0)
        assert max_out(dense, members) == brute


def test_rescale_weights_properties():
    ws = rescale_weights([3.0, 10.0, 7.5])
    assert all(0.0 < w < 1.0 for w in ws)
    assert ws[0] == min(ws) and ws[1] == max(ws)
    assert rescale_weights([2.0, 2.0]) == [0.5, 0.5]
    with pytest.raises(WeightOutOfRange):
        rescale_weights([0.0, 1.0])


@settings(max_examples=60, deadline=None)
@given(st.permutations(list(range(4))))
def test_phi_cluster_permutation_equivariance(perm):
    # relabeling the nodes relabels the measure's arguments but not its value
    from tests.conftest import G4_EDGES

    g = build_graph(4, G4_EDGES)
    remapped = build_graph(4, [(perm[u], perm[v], w) for u, v, w in G4_EDGES])
    for cluster in ({0}, {0, 1}, {2, 3}, {0, 1, 2}, {0, 1, 2, 3}):
        image = {perm[u] for u in cluster}
        assert phi_cluster(g, cluster) == phi_cluster(remapped, image)


def test_make_clustering_is_canonical():
    cc = make_clustering([{3, 2}, {0, 1}])
    assert cc == (frozenset({0, 1}), frozenset({2, 3}))
