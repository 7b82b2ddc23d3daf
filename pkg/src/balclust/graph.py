"""Weighted similarity graph model.

A graph is undirected and connected, with edge weights strictly inside
(0, 1): weights are similarities, higher means more alike. All values are
immutable after construction and every operation here is pure, so graphs
can be shared freely across threads.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import (
    Disconnected,
    DuplicateEdge,
    NotAPartition,
    SelfLoop,
    WeightOutOfRange,
)

Edge = tuple[int, int, float]
Cluster = frozenset[int]
Clustering = tuple[Cluster, ...]

# Above this edge density a dense adjacency matrix is kept alongside the
# edge list; similarity matrices are typically complete graphs.
DENSE_THRESHOLD = 0.5

RESCALE_EPS = 1e-9


class WeightedGraph:
    """Undirected connected graph with weights in (0, 1).

    Build instances through :func:`build_graph`, which validates the
    invariants; the constructor itself trusts its arguments.
    """

    __slots__ = ("node_count", "node_labels", "edges", "adj", "matrix")

    def __init__(self, node_count: int, node_labels: tuple[str, ...], edges: tuple[Edge, ...]):
        self.node_count = node_count
        self.node_labels = node_labels
        self.edges = edges
        adj: dict[int, dict[int, float]] = {u: {} for u in range(node_count)}
        for u, v, w in edges:
            adj[u][v] = w
            adj[v][u] = w
        self.adj = adj
        max_edges = node_count * (node_count - 1) // 2
        if max_edges > 0 and len(edges) / max_edges > DENSE_THRESHOLD:
            m = np.zeros((node_count, node_count))
            for u, v, w in edges:
                m[u, v] = w
                m[v, u] = w
            self.matrix = m
        else:
            self.matrix = None

    def weight(self, u: int, v: int) -> float:
        return self.adj[u][v]

    def __repr__(self) -> str:
        return f"WeightedGraph(n={self.node_count}, m={len(self.edges)})"


def normalize_edge(u: int, v: int, w: float) -> Edge:
    return (u, v, w) if u < v else (v, u, w)


def _check_connected(n: int, edges: Iterable[tuple[int, int]]) -> bool:
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    comps = n
    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            comps -= 1
    return comps == 1


def build_graph(
    n: int,
    edges: Sequence[tuple[int, int, float]],
    labels: Sequence[str] | None = None,
) -> WeightedGraph:
    """Validate and construct a WeightedGraph.

    Raises WeightOutOfRange, SelfLoop, DuplicateEdge, or Disconnected when
    the corresponding invariant fails. Labels default to decimal indices.
    """
    if n < 1:
        raise ValueError(f"node count must be >= 1, got {n}")
    if labels is None:
        labels = tuple(str(i) for i in range(n))
    else:
        labels = tuple(labels)
        if len(labels) != n:
            raise ValueError("label count does not match node count")

    seen: set[tuple[int, int]] = set()
    norm: list[Edge] = []
    for u, v, w in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u},{v}) has node index outside [0,{n})")
        if u == v:
            raise SelfLoop(f"self loop at node {u}")
        if not (0.0 < w < 1.0):
            raise WeightOutOfRange(f"weight {w} on edge ({u},{v}) not in open interval (0,1)")
        e = normalize_edge(u, v, float(w))
        key = (e[0], e[1])
        if key in seen:
            raise DuplicateEdge(f"edge ({e[0]},{e[1]}) appears more than once")
        seen.add(key)
        norm.append(e)

    if not _check_connected(n, [(u, v) for u, v, _ in norm]):
        raise Disconnected("graph is not connected")

    norm.sort()
    return WeightedGraph(n, labels, tuple(norm))


def rescale_weights(
    weights: Sequence[float], eps: float = RESCALE_EPS
) -> list[float]:
    """Rescale arbitrary positive similarities linearly into (eps, 1-eps).

    Constant inputs map to 0.5. Non-positive values are rejected because a
    zero similarity carries no ordering information under this model.
    """
    ws = [float(w) for w in weights]
    if any(w <= 0.0 for w in ws):
        raise WeightOutOfRange("rescaling requires strictly positive similarities")
    lo, hi = min(ws), max(ws)
    if lo == hi:
        return [0.5 for _ in ws]
    span = hi - lo
    return [eps + (w - lo) / span * (1.0 - 2.0 * eps) for w in ws]


def make_clustering(groups: Iterable[Iterable[int]]) -> Clustering:
    """Canonical clustering: clusters sorted by smallest member."""
    clusters = tuple(sorted((frozenset(g) for g in groups), key=min))
    return clusters


def is_connected_in(nodes: Cluster, edge_pairs: Iterable[tuple[int, int]]) -> bool:
    """True iff `nodes` induce a connected subgraph of the given edges."""
    if len(nodes) <= 1:
        return True
    adj: dict[int, list[int]] = {u: [] for u in nodes}
    for u, v in edge_pairs:
        if u in adj and v in adj:
            adj[u].append(v)
            adj[v].append(u)
    start = next(iter(nodes))
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == len(nodes)


def max_out(graph: WeightedGraph, cluster: Iterable[int]) -> float:
    """Heaviest edge with exactly one endpoint in the cluster, 0 if none.

    When the cluster is the whole node set there are no outgoing edges and
    the result is 0 by convention.
    """
    members = frozenset(cluster)
    if not members:
        raise ValueError("cluster is empty")
    if not members <= set(range(graph.node_count)):
        raise ValueError("cluster contains unknown node indices")
    if len(members) == graph.node_count:
        return 0.0
    if graph.matrix is not None:
        inside = np.fromiter(
            (u in members for u in range(graph.node_count)), dtype=bool, count=graph.node_count
        )
        sub = graph.matrix[np.ix_(inside, ~inside)]
        return float(sub.max()) if sub.size else 0.0
    best = 0.0
    for u, v, w in graph.edges:
        if (u in members) != (v in members) and w > best:
            best = w
    return best


def check_partition(graph: WeightedGraph, clustering: Clustering) -> None:
    """Raise NotAPartition unless the clusters partition the node set."""
    total = 0
    seen: set[int] = set()
    for c in clustering:
        if not c:
            raise NotAPartition("empty cluster")
        total += len(c)
        seen.update(c)
    if total != graph.node_count or seen != set(range(graph.node_count)):
        raise NotAPartition("clusters do not partition the node set")
