"""Brute-force ground truth for the solver and its tables.

Everything here evaluates clusterings straight from the definitions, with
no shared machinery with the dynamic program beyond the basic quality
measures, so oracle agreement is meaningful evidence. Oracles are
intentionally naive and guarded by explicit enumeration budgets.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from itertools import combinations
from math import inf

from .errors import BudgetExceeded
from .graph import Clustering, WeightedGraph, is_connected_in, make_clustering
from .measures import evaluate_on_edges, phi_cluster
from .mst import RootedTree
from .ratio import RATIO_ZERO, Ratio
from .dp import SolveResult

BUDGET_ENV_VAR = "BALCLUST_BUDGET"


@dataclass(frozen=True)
class EnumerationBudget:
    """Limits for brute-force enumeration.

    max_cases caps the number of enumerated candidates and can be
    overridden through the BALCLUST_BUDGET environment variable.
    """

    max_nodes_tree: int = 10
    max_nodes_graph: int = 7
    max_cases: int = 2_000_000

    def __post_init__(self):
        if self.max_nodes_tree < 1 or self.max_nodes_graph < 1 or self.max_cases < 1:
            raise ValueError("enumeration budgets must be positive")


def default_budget() -> EnumerationBudget:
    budget = EnumerationBudget()
    env = os.environ.get(BUDGET_ENV_VAR)
    if env:
        try:
            cases = int(env)
        except ValueError as exc:
            raise ValueError(f"{BUDGET_ENV_VAR} must be an integer, got {env!r}") from exc
        budget = replace(budget, max_cases=cases)
    return budget


def brute_force_tree(
    tree: RootedTree, k: int, budget: EnumerationBudget | None = None
) -> SolveResult:
    """Optimal k-clustering of a tree by trying every cut set.

    Ties on quality break toward the lexicographically smallest sorted
    cut-edge list, which is the enumeration order of combinations over
    the canonically sorted edge list.
    """
    budget = budget or default_budget()
    n = tree.node_count
    if n > budget.max_nodes_tree:
        raise BudgetExceeded(f"tree has {n} nodes, budget allows {budget.max_nodes_tree}")
    if not (1 <= k <= n):
        raise ValueError(f"k must be in [1,{n}], got {k}")
    nodes = frozenset(range(n))
    edges = tree.edges
    count = 0
    best_phi: Ratio | None = None
    best: SolveResult | None = None
    for cut in combinations(range(len(edges)), k - 1):
        count += 1
        if count > budget.max_cases:
            raise BudgetExceeded(f"more than {budget.max_cases} cut sets")
        cut_pairs = [(edges[i][0], edges[i][1]) for i in cut]
        clustering = tree.components_after_cuts(cut_pairs)
        phi = evaluate_on_edges(nodes, edges, clustering)
        if best_phi is None or phi < best_phi:
            best_phi = phi
            best = SolveResult(
                phi, k, clustering, tuple(edges[i] for i in cut)
            )
    assert best is not None
    return best


def _partitions_into_k(n: int, k: int):
    """Restricted-growth enumeration of partitions of range(n) into
    exactly k non-empty blocks, in a fixed deterministic order."""
    assign = [0] * n

    def rec(i: int, used: int):
        if i == n:
            if used == k:
                yield tuple(assign)
            return
        if used + (n - i) < k:
            return
        top = min(used, k - 1)
        for b in range(top + 1):
            assign[i] = b
            yield from rec(i + 1, used if b < used else used + 1)

    yield from rec(1, 1) if n else iter(())


def brute_force_graph(
    graph: WeightedGraph, k: int, budget: EnumerationBudget | None = None
) -> SolveResult:
    """Optimal k-clustering of a graph by trying every connected partition.

    Uses the full graph measure, so each candidate cluster's denominator
    comes from the maximum spanning tree of its induced subgraph. The
    result carries no cut edges: a graph partition is not defined by
    tree cuts.
    """
    budget = budget or default_budget()
    n = graph.node_count
    if n > budget.max_nodes_graph:
        raise BudgetExceeded(f"graph has {n} nodes, budget allows {budget.max_nodes_graph}")
    if not (1 <= k <= n):
        raise ValueError(f"k must be in [1,{n}], got {k}")
    if k == 1:
        return SolveResult(RATIO_ZERO, 1, (frozenset(range(n)),), ())
    pairs = [(u, v) for u, v, _ in graph.edges]
    count = 0
    best_phi: Ratio | None = None
    best: SolveResult | None = None
    for assign in _partitions_into_k(n, k):
        count += 1
        if count > budget.max_cases:
            raise BudgetExceeded(f"more than {budget.max_cases} partitions")
        blocks: list[set[int]] = [set() for _ in range(k)]
        for node, b in enumerate(assign):
            blocks[b].add(node)
        clusters = [frozenset(b) for b in blocks]
        if any(not is_connected_in(c, pairs) for c in clusters):
            continue
        phi = RATIO_ZERO
        for c in clusters:
            value = phi_cluster(graph, c)
            if phi < value:
                phi = value
        if best_phi is None or phi < best_phi:
            best_phi = phi
            best = SolveResult(phi, k, make_clustering(clusters), ())
    if best is None:
        raise BudgetExceeded("no connected partition found")  # unreachable for connected graphs
    return best


@dataclass(frozen=True)
class OracleTable:
    """Definitional clustering table of one subtree for comparison tests.

    cells maps (l, mu) to the best (M, b); absent keys are infeasible,
    which includes bins whose minimum quality exceeds 1.
    """

    subtree_root: int
    columns: tuple[float, ...]
    kmax: int
    cells: dict[tuple[int, float], tuple[float, Ratio]]

    def cell(self, l: int, mu: float) -> tuple[float, Ratio] | tuple[float, float]:
        return self.cells.get((l, float(mu)), (inf, inf))


def subtree_nodes(tree: RootedTree, v: int) -> frozenset[int]:
    """The node v and all of its descendants."""
    out = {v}
    stack = [v]
    while stack:
        x = stack.pop()
        for c in tree.children[x]:
            out.add(c)
            stack.append(c)
    return frozenset(out)


def enumerate_encodings(
    tree: RootedTree,
    subtree_root: int,
    nodes: frozenset[int] | None = None,
    budget: EnumerationBudget | None = None,
) -> dict[tuple[int, float], list[tuple[float, Ratio]]]:
    """All clustering encodings of a subtree, binned by cluster count and
    head minimum.

    Every subset of the subtree's edges is one clustering (the cut set);
    each yields (M, b) for the head cluster holding subtree_root. Used
    both to build the definitional table and to check order properties
    within bins.
    """
    budget = budget or default_budget()
    if nodes is None:
        nodes = subtree_nodes(tree, subtree_root)
    edges = [e for e in tree.edges if e[0] in nodes and e[1] in nodes]
    if len(nodes) > 8:
        raise BudgetExceeded(f"subtree has {len(nodes)} nodes, limit is 8")
    if 2 ** len(edges) > budget.max_cases:
        raise BudgetExceeded(f"{2 ** len(edges)} clusterings exceed the budget")

    bins: dict[tuple[int, float], list[tuple[float, Ratio]]] = {}
    for r in range(len(edges) + 1):
        for cut in combinations(range(len(edges)), r):
            cut_set = set(cut)
            kept = [e for i, e in enumerate(edges) if i not in cut_set]
            comps = _components(nodes, kept)
            head = next(c for c in comps if subtree_root in c)
            inner = [w for u, v, w in kept if u in head and v in head]
            mu = min(inner) if inner else 1.0
            out_ws = [
                w for u, v, w in edges if (u in head) != (v in head)
            ]
            M = max(out_ws) if out_ws else 0.0
            b = Ratio(M, mu) if M > 0.0 else RATIO_ZERO
            rest = [c for c in comps if c is not head]
            if rest:
                tail = evaluate_on_edges(nodes, tuple(edges), rest)
                if b < tail:
                    b = tail
            bins.setdefault((len(comps), mu), []).append((M, b))
    return bins


def _components(nodes: frozenset[int], edges) -> list[frozenset[int]]:
    adj: dict[int, list[int]] = {u: [] for u in nodes}
    for u, v, _ in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen: set[int] = set()
    comps = []
    for start in sorted(nodes):
        if start in seen:
            continue
        comp = {start}
        seen.add(start)
        stack = [start]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    comp.add(y)
                    stack.append(y)
        comps.append(frozenset(comp))
    return comps


def brute_force_table(
    tree: RootedTree,
    subtree_root: int,
    nodes: frozenset[int] | None = None,
    budget: EnumerationBudget | None = None,
) -> OracleTable:
    """Definitional table: per (l, mu) bin, the minimum (b, M) with b
    compared first, dropped entirely when the minimal b exceeds 1."""
    if nodes is None:
        nodes = subtree_nodes(tree, subtree_root)
    bins = enumerate_encodings(tree, subtree_root, nodes, budget)
    one = Ratio(1.0, 1.0)
    cells: dict[tuple[int, float], tuple[float, Ratio]] = {}
    for (l, mu), entries in bins.items():
        bm, bb = entries[0]
        for M, b in entries[1:]:
            if b < bb or (b == bb and M < bm):
                bm, bb = M, b
        if one < bb:
            continue
        cells[(l, mu)] = (bm, bb)
    columns = tuple(list(tree.distinct_weights) + [1.0])
    kmax = len(nodes)
    return OracleTable(subtree_root, columns, kmax, cells)


def lightest_cut_clustering(tree: RootedTree, k: int) -> Clustering:
    """Clustering from cutting the k-1 lightest tree edges.

    This construction always has quality at most 1: every surviving inner
    edge weighs at least as much as every cut edge.
    """
    if not (1 <= k <= tree.node_count):
        raise ValueError(f"k must be in [1,{tree.node_count}], got {k}")
    order = sorted(tree.edges, key=lambda e: (e[2], e[0], e[1]))
    cuts = [(u, v) for u, v, _ in order[: k - 1]]
    return tree.components_after_cuts(cuts)
