"""Cluster quality measures.

The quality of a cluster is the ratio of its heaviest outgoing edge to
the lightest edge of its internal maximum spanning tree; lower is better.
The whole node set scores 0, a singleton scores just its heaviest
incident edge. A clustering scores as its worst cluster. All comparisons
use exact Ratio arithmetic.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import ClusterNotConnectedInTree, DisconnectedCluster, NotAPartition
from .graph import (
    Cluster,
    Clustering,
    Edge,
    WeightedGraph,
    check_partition,
    is_connected_in,
    max_out,
)
from .mst import RootedTree, maximum_spanning_tree
from .ratio import RATIO_ZERO, Ratio, ratio_max


def _induced_mst_min(graph: WeightedGraph, members: Cluster) -> float:
    """Lightest edge of the maximum spanning tree induced by the cluster."""
    sub_nodes = sorted(members)
    index = {u: i for i, u in enumerate(sub_nodes)}
    sub_edges = [
        (index[u], index[v], w)
        for u, v, w in graph.edges
        if u in members and v in members
    ]
    sub = WeightedGraph(
        len(sub_nodes), tuple(str(u) for u in sub_nodes), tuple(sorted(sub_edges))
    )
    tree = maximum_spanning_tree(sub)
    return min(w for _, _, w in tree)


def phi_cluster(graph: WeightedGraph, cluster: Iterable[int]) -> Ratio:
    """Quality of one cluster in the full graph measure.

    Whole node set -> 0/1; singleton -> heaviest incident edge over 1;
    otherwise heaviest outgoing edge over the lightest edge of the
    cluster's induced maximum spanning tree.
    """
    members = frozenset(cluster)
    if len(members) == graph.node_count:
        return RATIO_ZERO
    if len(members) == 1:
        return Ratio(max_out(graph, members), 1.0)
    if not is_connected_in(members, [(u, v) for u, v, _ in graph.edges]):
        raise DisconnectedCluster(f"cluster {sorted(members)} is not connected")
    return Ratio(max_out(graph, members), _induced_mst_min(graph, members))


def phi_clustering(graph: WeightedGraph, clustering: Clustering) -> Ratio:
    """Quality of the worst cluster of a partition, full graph measure."""
    check_partition(graph, clustering)
    return ratio_max(phi_cluster(graph, c) for c in clustering)


def evaluate_on_edges(
    nodes: frozenset[int],
    edges: Sequence[Edge],
    clustering: Iterable[Iterable[int]],
) -> Ratio:
    """Worst-cluster quality over an explicit edge set.

    The measure is restricted to the given edges: outgoing maxima and
    inner minima ignore any edge not listed. A cluster covering a whole
    connected component contributes 0; singletons use denominator 1.
    """
    worst = RATIO_ZERO
    for group in clustering:
        members = frozenset(group)
        out_best = 0.0
        inner_min = None
        for u, v, w in edges:
            iu, iv = u in members, v in members
            if iu and iv:
                if inner_min is None or w < inner_min:
                    inner_min = w
            elif iu or iv:
                if w > out_best:
                    out_best = w
        if out_best == 0.0:
            value = RATIO_ZERO
        else:
            value = Ratio(out_best, 1.0 if inner_min is None else inner_min)
        if worst < value:
            worst = value
    return worst


def phi_restricted(tree: RootedTree, clustering: Clustering) -> Ratio:
    """Worst-cluster quality using tree edges only.

    Every cluster must be connected within the tree; a cluster that is
    connected in the graph but split across the tree has no defined
    restricted measure and raises ClusterNotConnectedInTree.
    """
    total = 0
    seen: set[int] = set()
    for c in clustering:
        total += len(c)
        seen.update(c)
    if total != tree.node_count or seen != set(range(tree.node_count)):
        raise NotAPartition("clusters do not partition the tree's node set")
    pairs = [(u, v) for u, v, _ in tree.edges]
    for c in clustering:
        if not is_connected_in(c, pairs):
            raise ClusterNotConnectedInTree(f"cluster {sorted(c)} is not connected in the tree")
    return evaluate_on_edges(frozenset(range(tree.node_count)), tree.edges, clustering)
