"""Bottom-up dynamic program over subtree clustering tables.

For a subtree S of the rooted spanning tree, the table cell at (l, mu)
encodes the best l-clustering of S whose head cluster (the one holding
S's root) has lightest inner edge mu: it stores the pair (M, b) where M
is the heaviest head-outgoing edge inside S and b the worst cluster
quality, minimized by b first and M second. Cells whose best quality
exceeds 1 are infeasible, because such partial clusterings can never be
part of an optimal solution.

Two transitions build every table from leaf tables:

* up_to_parent: extend a full subtree's table to include its parent,
  either cutting the parent edge (the parent becomes a singleton head)
  or absorbing the parent into the head cluster.
* add_child_tree: merge a processed child subtree into the table rooted
  at its parent; the two head clusters share the parent node and fuse.

Exactness: every quality value is a quotient of two edge weights. The
context precomputes the exact global ordering of all such quotients
(cross-multiplication on integer mantissas), so the whole program runs
on small integer ranks and never divides.

Tables for disjoint subtrees are independent and immutable once built; a
sequential post-order pass is used here.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass

import numpy as np

from .errors import CorruptProvenance, InfeasibleK
from .graph import Clustering, Edge
from .measures import phi_restricted
from .mst import RootedTree
from .ratio import RATIO_ZERO, Ratio

# Switch the inner merge scan to numpy above this many (cell, source) pairs.
NUMPY_MIN_PAIRS = 4096

# Provenance cases.
PROV_NONE = 0
PROV_LEAF = 1
PROV_CUT = 2      # parent edge cut; parent is a fresh singleton head
PROV_EXTEND = 3   # parent absorbed; parent edge becomes the head minimum
PROV_COPY = 4     # parent absorbed; head minimum unchanged
PROV_MERGE_A = 5  # child merged; cell column lives on the accumulated side
PROV_MERGE_B = 6  # child merged; cell column lives on the child side

_X_SHIFT = 4
_JP_SHIFT = 20
_TRACK_CELL_BIT = 1 << 40
_TRACK_SRC_BIT = 1 << 41


def _value_cmp(a: float, b: float, c: float, d: float) -> int:
    """Sign of a/b - c/d, exact (a, c >= 0; b, d > 0)."""
    pa, qa = a.as_integer_ratio()
    pb, qb = b.as_integer_ratio()
    pc, qc = c.as_integer_ratio()
    pd, qd = d.as_integer_ratio()
    left = (pa * qb) * (qc * pd)
    right = (pc * qd) * (qa * pb)
    return (left > right) - (left < right)


class DPContext:
    """Shared exact-arithmetic state for all tables of one tree.

    Columns are the tree's distinct edge weights ascending plus the
    sentinel 1 (singleton head). Numerators of quality quotients are 0 or
    a weight, denominators a weight or 1; every possible quotient gets an
    integer rank so that rank order equals exact value order.
    """

    __slots__ = (
        "tree", "cols", "ncols", "m", "col_of", "km", "inf_m", "mvals",
        "rank", "rank_np", "rank_one", "nranks", "inf_key", "rep", "_pair_rank",
    )

    def __init__(self, tree: RootedTree):
        self.tree = tree
        ws = list(tree.distinct_weights)
        cols = ws + [1.0]
        self.cols = cols
        self.ncols = len(cols)
        self.m = len(ws)
        self.col_of = {w: i for i, w in enumerate(cols)}
        self.mvals = [0.0] + ws  # M code -> value
        self.inf_m = self.m + 1
        self.km = self.m + 2

        pairs = [(a, d) for a in self.mvals for d in cols]
        pairs.sort(key=lambda p: (p[0] / p[1], p[0], p[1]))
        # Float sort keys can merge distinct exact values; re-sort each
        # equal-float run exactly (exactly equal values always share the
        # same float, so runs cover all genuine ties).
        fixed: list[tuple[float, float]] = []
        i = 0
        while i < len(pairs):
            j = i
            v = pairs[i][0] / pairs[i][1]
            while j < len(pairs) and pairs[j][0] / pairs[j][1] == v:
                j += 1
            run = pairs[i:j]
            if len(run) > 1:
                run = _exact_sorted(run)
            fixed.extend(run)
            i = j
        pair_rank: dict[tuple[float, float], int] = {}
        rep: list[tuple[float, float]] = []
        prev: tuple[float, float] | None = None
        r = -1
        for a, d in fixed:
            if prev is None or _value_cmp(prev[0], prev[1], a, d) != 0:
                r += 1
                rep.append((a, d))
            pair_rank[(a, d)] = r
            prev = (a, d)
        self.nranks = r + 1
        self.rep = rep
        self._pair_rank = pair_rank
        self.rank = [
            [pair_rank[(self.mvals[mc], cols[j])] for j in range(self.ncols)]
            for mc in range(self.m + 1)
        ]
        self.rank_np = np.array(self.rank, dtype=np.int64)
        if ws:
            self.rank_one = pair_rank[(ws[0], ws[0])]
        else:
            self.rank_one = self.nranks  # single-node tree: nothing to demote
        self.inf_key = self.nranks * self.km + self.inf_m

    def rank_of(self, num: float, den: float) -> int:
        return self._pair_rank[(num, den)]

    def ratio_of_rank(self, r: int) -> Ratio:
        num, den = self.rep[r]
        return Ratio(num, den)


def _exact_sorted(run: list[tuple[float, float]]) -> list[tuple[float, float]]:
    import functools

    return sorted(run, key=functools.cmp_to_key(
        lambda p, q: _value_cmp(p[0], p[1], q[0], q[1])))


@dataclass(frozen=True)
class Provenance:
    """Where a table cell's value came from."""

    kind: str  # leaf | cut | extend | copy | merge | infeasible
    x: int | None = None
    mu_prime: float | None = None
    branch: str | None = None  # merge only: accumulated | child


@dataclass(frozen=True)
class DPCell:
    """Public view of one table cell: (M, b) plus provenance."""

    M: float
    b: Ratio | float
    provenance: Provenance

    @property
    def infeasible(self) -> bool:
        return self.provenance.kind == "infeasible"


@dataclass(frozen=True)
class SolveResult:
    """An optimal clustering: quality, cluster count, members, cut edges."""

    phi: Ratio
    k: int
    clustering: Clustering
    cut_edges: tuple[Edge, ...]


def pair_less(p, q) -> bool:
    """Strict order on (M, b) pairs: b decides first, then M.

    Accepts floats, ints, Ratios, and math.inf components; comparisons of
    finite values are exact. (inf, inf) compares greater than any finite
    pair.
    """
    c = _component_cmp(p[1], q[1])
    if c != 0:
        return c < 0
    return _component_cmp(p[0], q[0]) < 0


def _component_cmp(a, b) -> int:
    a_inf = not isinstance(a, Ratio) and a == math.inf
    b_inf = not isinstance(b, Ratio) and b == math.inf
    if a_inf or b_inf:
        return (not b_inf) - (not a_inf)
    ra = a if isinstance(a, Ratio) else Ratio(float(a), 1.0)
    rb = b if isinstance(b, Ratio) else Ratio(float(b), 1.0)
    if ra < rb:
        return -1
    if rb < ra:
        return 1
    return 0


class DPTable:
    """Clustering table of one subtree: rows 1..k_max, one column per mu.

    Rows are lists of packed integers (quality rank * km + M code); the
    parallel prov rows record how each cell was achieved, which is enough
    to reconstruct an optimal clustering without recomputation. Linked
    source tables are retained for that backtracking walk.
    """

    __slots__ = (
        "ctx", "kmax", "root_node", "kind", "keys", "prov", "fin",
        "src", "qsrc", "child_node", "omega_col",
    )

    def __init__(self, ctx: DPContext, kmax: int, root_node: int, kind: str):
        self.ctx = ctx
        self.kmax = kmax
        self.root_node = root_node
        self.kind = kind
        C = ctx.ncols
        inf = ctx.inf_key
        self.keys = [[inf] * C for _ in range(kmax + 1)]
        self.prov = [[0] * C for _ in range(kmax + 1)]
        self.fin: list[list[int]] = [[] for _ in range(kmax + 1)]
        self.src: DPTable | None = None
        self.qsrc: DPTable | None = None
        self.child_node: int | None = None
        self.omega_col: int | None = None

    @property
    def subtree_root(self) -> int:
        return self.root_node

    @property
    def columns(self) -> list[float]:
        return list(self.ctx.cols)

    def refresh_fin(self) -> None:
        inf = self.ctx.inf_key
        for l in range(1, self.kmax + 1):
            row = self.keys[l]
            self.fin[l] = [j for j in range(self.ctx.ncols) if row[j] != inf]

    def cell(self, l: int, mu: float) -> DPCell:
        ctx = self.ctx
        if not (1 <= l <= self.kmax):
            raise ValueError(f"row {l} outside [1,{self.kmax}]")
        col = ctx.col_of.get(float(mu))
        if col is None:
            raise ValueError(f"{mu} is not a column (tree edge weight or 1)")
        key = self.keys[l][col]
        if key == ctx.inf_key:
            return DPCell(math.inf, math.inf, Provenance("infeasible"))
        b, mc = divmod(key, ctx.km)
        return DPCell(ctx.mvals[mc], ctx.ratio_of_rank(b), self._decode_prov(self.prov[l][col]))

    def _decode_prov(self, p: int) -> Provenance:
        case = p & 0xF
        x = (p >> _X_SHIFT) & 0xFFFF
        jp = (p >> _JP_SHIFT) & 0xFFFFF
        cols = self.ctx.cols
        if case == PROV_LEAF:
            return Provenance("leaf")
        if case == PROV_CUT:
            return Provenance("cut", mu_prime=cols[jp])
        if case == PROV_EXTEND:
            return Provenance("extend", mu_prime=cols[jp])
        if case == PROV_COPY:
            return Provenance("copy")
        if case == PROV_MERGE_A:
            return Provenance("merge", x=x, mu_prime=cols[jp], branch="accumulated")
        if case == PROV_MERGE_B:
            return Provenance("merge", x=x, mu_prime=cols[jp], branch="child")
        return Provenance("infeasible")


def leaf_table(ctx: DPContext, v: int, k_max: int) -> DPTable:
    """Table of a single-node subtree: one feasible cell, (1, 1) = (0, 0)."""
    tab = DPTable(ctx, k_max, v, "leaf")
    mcol = ctx.ncols - 1
    tab.keys[1][mcol] = ctx.rank_of(0.0, 1.0) * ctx.km + 0
    tab.prov[1][mcol] = PROV_LEAF
    tab.refresh_fin()
    return tab


def up_to_parent(
    table: DPTable,
    omega: float,
    k_max: int | None = None,
    child_node: int | None = None,
) -> DPTable:
    """Extend a full subtree's table to include the subtree root's parent.

    omega is the weight of the edge to the parent. Columns lighter than
    omega carry over unchanged (the parent joins the head above the
    minimum); the omega column absorbs heads whose minimum was at least
    omega; the 1 column cuts the edge, making the parent a singleton
    head. Columns strictly between omega and 1 are infeasible.
    """
    ctx = table.ctx
    if k_max is None:
        k_max = table.kmax
    if child_node is None:
        child_node = table.root_node
    t = ctx.col_of.get(float(omega))
    if t is None or t == ctx.ncols - 1:
        raise ValueError(f"{omega} is not a tree edge weight")
    C = ctx.ncols
    km = ctx.km
    inf = ctx.inf_key
    rank = ctx.rank
    rone = ctx.rank_one
    parent_node = ctx.tree.parent[child_node][0]

    out = DPTable(ctx, k_max, parent_node, "up")
    out.src = table
    out.child_node = child_node
    out.omega_col = t
    omega_code = t + 1
    omega_flat = rank[omega_code][C - 1]  # rank of omega / 1

    for l in range(1, k_max + 1):
        row = out.keys[l]
        prow = out.prov[l]
        src_keys = table.keys[l]
        src_fin = table.fin[l]

        for j in src_fin:
            if j >= t:
                break
            row[j] = src_keys[j]
            prow[j] = PROV_COPY

        best = inf
        bestp = 0
        for j in src_fin[bisect_left(src_fin, t):]:
            b, mc = divmod(src_keys[j], km)
            nb = rank[mc][t]
            if b > nb:
                nb = b
            if nb > rone:
                continue
            key = nb * km + mc
            if key < best:
                best = key
                bestp = PROV_EXTEND | (j << _JP_SHIFT)
        if best < inf:
            row[t] = best
            prow[t] = bestp

        if l >= 2:
            pk = table.keys[l - 1]
            bestb = -1
            bestj = -1
            for j in table.fin[l - 1]:
                b, mc = divmod(pk[j], km)
                mm = mc if mc > omega_code else omega_code
                cb = rank[mm][j]
                if b > cb:
                    cb = b
                if omega_flat > cb:
                    cb = omega_flat
                if cb > rone:
                    continue
                if bestb < 0 or cb < bestb:
                    bestb = cb
                    bestj = j
            if bestj >= 0:
                row[C - 1] = bestb * km + omega_code
                prow[C - 1] = PROV_CUT | (bestj << _JP_SHIFT)

    out.refresh_fin()
    return out


def _merge_branch(ctx, cell_keys, cell_fin, src_keys, src_fin, row, prow, case, x):
    """One side of the merge: cells read their own column, sources scan
    every column at least as heavy. Updates row/prow in place; earlier
    calls win ties, and within a call the lightest source column wins."""
    if not cell_fin or not src_fin:
        return
    if len(cell_fin) * len(src_fin) >= NUMPY_MIN_PAIRS:
        _merge_branch_np(ctx, cell_keys, cell_fin, src_keys, src_fin, row, prow, case, x)
        return
    km = ctx.km
    rank = ctx.rank
    rone = ctx.rank_one
    inf = ctx.inf_key
    nsrc = len(src_fin)
    si = 0
    xbits = case | (x << _X_SHIFT)
    for j in cell_fin:
        while si < nsrc and src_fin[si] < j:
            si += 1
        if si == nsrc:
            break
        cb, cm = divmod(cell_keys[j], km)
        best = inf
        bestjp = -1
        for jp in src_fin[si:]:
            sb, sm = divmod(src_keys[jp], km)
            mm = cm if cm > sm else sm
            b = rank[mm][j]
            if cb > b:
                b = cb
            if sb > b:
                b = sb
            if b > rone:
                continue
            key = b * km + mm
            if key < best:
                best = key
                bestjp = jp
        if best < row[j]:
            row[j] = best
            prow[j] = xbits | (bestjp << _JP_SHIFT)


def _merge_branch_np(ctx, cell_keys, cell_fin, src_keys, src_fin, row, prow, case, x):
    """Vectorized merge scan; bitwise-identical results to the scalar path
    because candidates are minimized on (b, M, source column) packed keys."""
    km = ctx.km
    rone = ctx.rank_one
    inf = ctx.inf_key
    C = ctx.ncols
    jj = np.asarray(cell_fin, dtype=np.int64)
    ss = np.asarray(src_fin, dtype=np.int64)
    ck = np.asarray(cell_keys, dtype=np.int64)[jj]
    sk = np.asarray(src_keys, dtype=np.int64)[ss]
    cb, cm = np.divmod(ck, km)
    sb, sm = np.divmod(sk, km)
    mm = np.maximum(cm[:, None], sm[None, :])
    b = ctx.rank_np[mm, jj[:, None]]
    np.maximum(b, cb[:, None], out=b)
    np.maximum(b, sb[None, :], out=b)
    keys = b * km + mm
    invalid = (ss[None, :] < jj[:, None]) | (b > rone)
    keys[invalid] = inf
    packed = keys * C + ss[None, :]
    pos = np.argmin(packed, axis=1)
    best = packed[np.arange(len(jj)), pos]
    cutoff = inf * C
    xbits = case | (x << _X_SHIFT)
    for i, j in enumerate(cell_fin):
        pk = int(best[i])
        if pk >= cutoff:
            continue
        key, jp = divmod(pk, C)
        if key < row[j]:
            row[j] = key
            prow[j] = xbits | (jp << _JP_SHIFT)


def add_child_tree(
    s_table: DPTable,
    q_table: DPTable,
    omega: float,
    k_max: int | None = None,
    child_node: int | None = None,
) -> DPTable:
    """Merge a child subtree's table into the table rooted at its parent.

    The child table is first lifted over the connecting edge (weight
    omega) with up_to_parent; both partial clusterings then share the
    parent node, so their head clusters fuse and the cluster counts add
    up as x + (l - x + 1) - 1 = l. Every cell minimizes over the split x
    and over which side carries the head's lightest edge.
    """
    ctx = s_table.ctx
    if k_max is None:
        k_max = s_table.kmax
    if child_node is None:
        child_node = q_table.root_node
    qbar = up_to_parent(q_table, omega, k_max, child_node=child_node)
    out = DPTable(ctx, k_max, s_table.root_node, "add")
    out.src = s_table
    out.qsrc = qbar
    out.omega_col = ctx.col_of[omega]

    for l in range(1, k_max + 1):
        row = out.keys[l]
        prow = out.prov[l]
        for x in range(1, l + 1):
            y = l - x + 1
            sf = s_table.fin[x]
            qf = qbar.fin[y]
            if not sf or not qf:
                continue
            sk = s_table.keys[x]
            qk = qbar.keys[y]
            _merge_branch(ctx, sk, sf, qk, qf, row, prow, PROV_MERGE_A, x)
            _merge_branch(ctx, qk, qf, sk, sf, row, prow, PROV_MERGE_B, x)

    out.refresh_fin()
    return out


def build_root_table(tree: RootedTree, k_max: int, ctx: DPContext | None = None) -> DPTable:
    """Tables for every subtree bottom-up; returns the whole-tree table.

    Each node lifts its first child's table over the connecting edge and
    folds the remaining children in ascending index order. All
    intermediate tables stay reachable through source links for
    backtracking.
    """
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    if ctx is None:
        ctx = DPContext(tree)
    tabs: dict[int, DPTable] = {}
    for v in tree.post_order:
        kids = tree.children[v]
        if not kids:
            tabs[v] = leaf_table(ctx, v, k_max)
            continue
        first = kids[0]
        acc = up_to_parent(tabs.pop(first), tree.parent[first][1], k_max, child_node=first)
        for u in kids[1:]:
            acc = add_child_tree(acc, tabs.pop(u), tree.parent[u][1], k_max, child_node=u)
        tabs[v] = acc
    return tabs[tree.root]


def backtrack(table: DPTable, l: int, mu: float) -> list[tuple[int, int]]:
    """Cut edges realizing the clustering encoded at the root cell (l, mu).

    Follows provenance records down through the linked tables, emitting
    the parent edge wherever a cut case was chosen. Exactly l - 1 edges
    come back, sorted; anything else is a CorruptProvenance.
    """
    ctx = table.ctx
    col = ctx.col_of.get(float(mu))
    if col is None:
        raise ValueError(f"{mu} is not a column (tree edge weight or 1)")
    target_l = l
    if table.keys[l][col] == ctx.inf_key:
        raise CorruptProvenance(f"target cell (l={l}, mu={mu}) is infeasible")
    cuts: list[tuple[int, int]] = []
    stack: list[tuple[DPTable, int, int]] = [(table, l, col)]
    while stack:
        tab, l, col = stack.pop()
        if tab.keys[l][col] == ctx.inf_key:
            raise CorruptProvenance("walk reached an infeasible cell")
        p = tab.prov[l][col]
        case = p & 0xF
        x = (p >> _X_SHIFT) & 0xFFFF
        jp = (p >> _JP_SHIFT) & 0xFFFFF
        if case == PROV_LEAF:
            continue
        if case == PROV_CUT:
            v = tab.child_node
            u = ctx.tree.parent[v][0]
            cuts.append((u, v) if u < v else (v, u))
            stack.append((tab.src, l - 1, jp))
        elif case == PROV_EXTEND:
            stack.append((tab.src, l, jp))
        elif case == PROV_COPY:
            stack.append((tab.src, l, col))
        elif case == PROV_MERGE_A:
            stack.append((tab.src, x, col))
            stack.append((tab.qsrc, l - x + 1, jp))
        elif case == PROV_MERGE_B:
            stack.append((tab.src, x, jp))
            stack.append((tab.qsrc, l - x + 1, col))
        else:
            raise CorruptProvenance(f"cell carries no provenance (case={case})")
    if len(cuts) != target_l - 1:
        raise CorruptProvenance(f"expected {target_l - 1} cut edges, got {len(cuts)}")
    return sorted(cuts)


def _result_from_cuts(tree: RootedTree, cuts: list[tuple[int, int]], k: int) -> SolveResult:
    clustering = tree.components_after_cuts(cuts)
    phi = phi_restricted(tree, clustering)
    cut_edges = tuple((u, v, tree.edge_weight(u, v)) for u, v in cuts)
    return SolveResult(phi, k, clustering, cut_edges)


def solve_fixed_k(tree: RootedTree, k: int) -> SolveResult:
    """Optimal k-clustering of the tree under the restricted measure.

    k = 1 is the whole node set with quality 0 and needs no tables. The
    reconstructed clustering is re-evaluated and must reproduce the
    table's quality exactly.
    """
    n = tree.node_count
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > n:
        raise InfeasibleK(f"cannot split {n} nodes into {k} clusters")
    if k == 1:
        return SolveResult(RATIO_ZERO, 1, (frozenset(range(n)),), ())

    ctx = DPContext(tree)
    root = build_root_table(tree, k, ctx)
    row = root.keys[k]
    best = ctx.inf_key
    bcol = -1
    for j in root.fin[k]:
        if row[j] < best:
            best = row[j]
            bcol = j
    if bcol < 0:
        raise InfeasibleK(f"every {k}-clustering of the tree has quality above 1")
    cuts = backtrack(root, k, ctx.cols[bcol])
    result = _result_from_cuts(tree, cuts, k)
    b_rank = best // ctx.km
    if ctx.rank_of(result.phi.num, result.phi.den) != b_rank:
        raise CorruptProvenance("reconstructed clustering does not match table quality")
    return result
