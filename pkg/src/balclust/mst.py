"""Maximum spanning tree construction and rooting.

The solver operates on a maximum spanning tree of the similarity graph.
Construction is Kruskal with a disjoint-set union; ties between equal
weights are broken toward the lexicographically smaller endpoint pair so
the output is independent of edge input order.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import Disconnected, NotATree
from .graph import Edge, WeightedGraph, normalize_edge


class _DisjointSet:
    __slots__ = ("parent", "rank")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if self.rank[rx] < self.rank[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        if self.rank[rx] == self.rank[ry]:
            self.rank[rx] += 1
        return True


def maximum_spanning_tree(graph: WeightedGraph) -> tuple[Edge, ...]:
    """n-1 edges of a maximum-total-weight spanning tree.

    Deterministic: among equal weights the edge with the smaller
    (min endpoint, max endpoint) pair is preferred. Returned edges are
    normalized (u < v) and sorted.
    """
    n = graph.node_count
    order = sorted(graph.edges, key=lambda e: (-e[2], e[0], e[1]))
    ds = _DisjointSet(n)
    chosen: list[Edge] = []
    for u, v, w in order:
        if ds.union(u, v):
            chosen.append((u, v, w))
            if len(chosen) == n - 1:
                break
    if len(chosen) != n - 1:
        raise Disconnected("graph is not connected; no spanning tree exists")
    chosen.sort()
    return tuple(chosen)


class RootedTree:
    """A spanning tree rooted at a fixed node.

    Holds parent/children structure, a post-order traversal (children
    before parents, root last; children ordered by ascending index), and
    the sorted distinct edge weights. Immutable after construction.
    """

    __slots__ = (
        "node_count",
        "root",
        "parent",
        "children",
        "post_order",
        "distinct_weights",
        "edges",
        "_weight",
    )

    def __init__(
        self,
        node_count: int,
        root: int,
        parent: dict[int, tuple[int, float]],
        children: dict[int, tuple[int, ...]],
        post_order: tuple[int, ...],
        edges: tuple[Edge, ...],
    ):
        self.node_count = node_count
        self.root = root
        self.parent = parent
        self.children = children
        self.post_order = post_order
        self.edges = edges
        self.distinct_weights = tuple(sorted({w for _, _, w in edges}))
        self._weight = {(u, v): w for u, v, w in edges}

    def edge_weight(self, u: int, v: int) -> float:
        if u > v:
            u, v = v, u
        return self._weight[(u, v)]

    def has_edge(self, u: int, v: int) -> bool:
        if u > v:
            u, v = v, u
        return (u, v) in self._weight

    def components_after_cuts(
        self, cuts: Iterable[tuple[int, int]]
    ) -> tuple[frozenset[int], ...]:
        """Connected components left after removing the given tree edges."""
        cut_set = {(u, v) if u < v else (v, u) for u, v in cuts}
        ds = _DisjointSet(self.node_count)
        for u, v, _ in self.edges:
            if (u, v) not in cut_set:
                ds.union(u, v)
        groups: dict[int, set[int]] = {}
        for x in range(self.node_count):
            groups.setdefault(ds.find(x), set()).add(x)
        return tuple(sorted((frozenset(g) for g in groups.values()), key=min))

    def __repr__(self) -> str:
        return f"RootedTree(n={self.node_count}, root={self.root})"


def root_tree(
    tree_edges: Sequence[tuple[int, int, float]],
    root: int,
    node_count: int | None = None,
) -> RootedTree:
    """Root a spanning tree at the given node.

    Children are ordered by ascending node index so traversals are
    deterministic. Raises NotATree if the edges do not form a tree over
    the implied node set.
    """
    edges = tuple(sorted(normalize_edge(u, v, w) for u, v, w in tree_edges))
    if node_count is None:
        node_count = len(edges) + 1
    if len(edges) != node_count - 1:
        raise NotATree(f"{len(edges)} edges cannot span {node_count} nodes")
    if len({(u, v) for u, v, _ in edges}) != len(edges):
        raise NotATree("duplicate edge")
    if not (0 <= root < node_count):
        raise ValueError(f"root {root} outside [0,{node_count})")

    adj: dict[int, list[tuple[int, float]]] = {u: [] for u in range(node_count)}
    for u, v, w in edges:
        if not (0 <= u < node_count and 0 <= v < node_count):
            raise NotATree(f"edge ({u},{v}) references a node outside [0,{node_count})")
        adj[u].append((v, w))
        adj[v].append((u, w))

    parent: dict[int, tuple[int, float]] = {}
    children: dict[int, tuple[int, ...]] = {}
    post_order: list[int] = []
    seen = {root}
    # iterative DFS, expanding children in ascending index order
    stack: list[tuple[int, int]] = [(root, 0)]
    kids_of: dict[int, list[int]] = {}
    for v in range(node_count):
        kids_of[v] = []
    order_adj = {u: sorted(adj[u]) for u in adj}
    while stack:
        node, idx = stack.pop()
        nbrs = order_adj[node]
        while idx < len(nbrs) and nbrs[idx][0] in seen:
            idx += 1
        if idx == len(nbrs):
            post_order.append(node)
            continue
        stack.append((node, idx + 1))
        child, w = nbrs[idx]
        seen.add(child)
        parent[child] = (node, w)
        kids_of[node].append(child)
        stack.append((child, 0))

    if len(seen) != node_count:
        raise NotATree("edges do not connect all nodes")
    for v in range(node_count):
        children[v] = tuple(sorted(kids_of[v]))
    return RootedTree(node_count, root, parent, children, tuple(post_order), edges)


def tree_from_graph(graph: WeightedGraph, root: int = 0) -> RootedTree:
    """Maximum spanning tree of the graph, rooted at node `root`."""
    return root_tree(maximum_spanning_tree(graph), root, graph.node_count)


def verify_mst(graph: WeightedGraph, tree_edges: Sequence[tuple[int, int, float]]) -> bool:
    """Cycle-property check: True iff the tree is a maximum spanning tree.

    For every non-tree edge e, every tree edge on the path between e's
    endpoints must weigh at least w(e). Used as an independent test oracle
    for maximum_spanning_tree.
    """
    edges = tuple(normalize_edge(u, v, w) for u, v, w in tree_edges)
    try:
        tree = root_tree(edges, 0, graph.node_count)
    except NotATree:
        return False
    tree_pairs = {(u, v) for u, v, _ in edges}

    depth = {tree.root: 0}
    for v in reversed(tree.post_order):
        if v != tree.root:
            depth[v] = depth[tree.parent[v][0]] + 1

    def path_min(u: int, v: int) -> float:
        lo = 1.0
        while u != v:
            if depth[u] < depth[v]:
                u, v = v, u
            p, w = tree.parent[u]
            lo = min(lo, w)
            u = p
        return lo

    for u, v, w in graph.edges:
        if (u, v) in tree_pairs:
            continue
        if path_min(u, v) < w:
            return False
    return True
