"""Free cluster count solver.

When the number of clusters is open, the row index of the fixed-k tables
can be dropped: each subtree keeps a single row of best (M, b) pairs per
head minimum over clusterings of any size, and the merge split point
disappears because the two sides fuse in one step. One wrinkle remains:
the answer must use at least two clusters, but at the column of the
subtree's lightest edge the single-cluster clustering (M, b) = (0, 0)
always dominates. Each table therefore carries one extra slot with the
best multi-cluster encoding at that column; every other column is
multi-cluster by construction.

Correctness is gated in the test suite by cross-checking against the
per-k solver on every random instance.
"""

from __future__ import annotations

from bisect import bisect_left

from .dp import (
    PROV_COPY,
    PROV_CUT,
    PROV_EXTEND,
    PROV_LEAF,
    PROV_MERGE_A,
    PROV_MERGE_B,
    _JP_SHIFT,
    _TRACK_CELL_BIT,
    _TRACK_SRC_BIT,
    DPContext,
    SolveResult,
    _merge_branch,
    _result_from_cuts,
)
from .errors import CorruptProvenance, InfeasibleK, TooSmall
from .mst import RootedTree


class FreeTable:
    """Single-row clustering table of one subtree, any cluster count.

    keys/prov parallel the fixed-k rows; nt_key/nt_prov hold the best
    encoding with two or more clusters at column jmin (the subtree's
    lightest edge weight; the 1 column for a single node).
    """

    __slots__ = (
        "ctx", "root_node", "kind", "keys", "prov", "fin",
        "nt_key", "nt_prov", "jmin", "src", "qsrc", "child_node", "omega_col",
    )

    def __init__(self, ctx: DPContext, root_node: int, kind: str):
        self.ctx = ctx
        self.root_node = root_node
        self.kind = kind
        C = ctx.ncols
        self.keys = [ctx.inf_key] * C
        self.prov = [0] * C
        self.fin: list[int] = []
        self.nt_key = ctx.inf_key
        self.nt_prov = 0
        self.jmin = C - 1
        self.src: FreeTable | None = None
        self.qsrc: FreeTable | None = None
        self.child_node: int | None = None
        self.omega_col: int | None = None

    def refresh_fin(self) -> None:
        inf = self.ctx.inf_key
        self.fin = [j for j in range(self.ctx.ncols) if self.keys[j] != inf]


def leaf_free(ctx: DPContext, v: int) -> FreeTable:
    tab = FreeTable(ctx, v, "leaf")
    mcol = ctx.ncols - 1
    tab.keys[mcol] = ctx.rank_of(0.0, 1.0) * ctx.km + 0
    tab.prov[mcol] = PROV_LEAF
    tab.jmin = mcol
    tab.refresh_fin()
    return tab


def up_free(table: FreeTable, omega: float, child_node: int | None = None) -> FreeTable:
    ctx = table.ctx
    if child_node is None:
        child_node = table.root_node
    t = ctx.col_of[omega]
    C = ctx.ncols
    km = ctx.km
    inf = ctx.inf_key
    rank = ctx.rank
    rone = ctx.rank_one
    parent_node = ctx.tree.parent[child_node][0]

    out = FreeTable(ctx, parent_node, "up")
    out.src = table
    out.child_node = child_node
    out.omega_col = t
    omega_code = t + 1
    omega_flat = rank[omega_code][C - 1]
    row = out.keys
    prow = out.prov

    for j in table.fin:
        if j >= t:
            break
        row[j] = table.keys[j]
        prow[j] = PROV_COPY | (j << _JP_SHIFT)

    # The parent absorbs into the head; new head minimum is omega. Track
    # the multi-cluster best alongside, substituting the source's
    # multi-cluster slot when the scan passes its trivial column.
    best = inf
    bestp = 0
    nt_best = inf
    nt_bestp = 0
    for j in table.fin[bisect_left(table.fin, t):]:
        b, mc = divmod(table.keys[j], km)
        nb = rank[mc][t]
        if b > nb:
            nb = b
        if nb <= rone:
            key = nb * km + mc
            if key < best:
                best = key
                bestp = PROV_EXTEND | (j << _JP_SHIFT)
        if j == table.jmin:
            if table.nt_key == inf:
                continue
            b, mc = divmod(table.nt_key, km)
            nb = rank[mc][t]
            if b > nb:
                nb = b
            if nb > rone:
                continue
            key = nb * km + mc
            if key < nt_best:
                nt_best = key
                nt_bestp = PROV_EXTEND | (j << _JP_SHIFT) | _TRACK_SRC_BIT
        else:
            if nb <= rone:
                key = nb * km + mc
                if key < nt_best:
                    nt_best = key
                    nt_bestp = PROV_EXTEND | (j << _JP_SHIFT)
    if best < inf:
        row[t] = best
        prow[t] = bestp

    if table.jmin < t:
        out.jmin = table.jmin
        out.nt_key = table.nt_key
        out.nt_prov = PROV_COPY | (table.jmin << _JP_SHIFT) | _TRACK_SRC_BIT
    else:
        out.jmin = t
        out.nt_key = nt_best
        out.nt_prov = nt_bestp

    # Cut the parent edge: the parent is a singleton head over any
    # clustering of the source subtree.
    bestb = -1
    bestj = -1
    for j in table.fin:
        b, mc = divmod(table.keys[j], km)
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


def _free_nt_merge(ctx: DPContext, s: FreeTable, qbar: FreeTable, jm: int) -> tuple[int, int]:
    """Best multi-cluster encoding at column jm after a merge.

    Every merge candidate has at least two clusters unless both sides are
    their single-cluster encodings, which happens exactly when both read
    the (0, 0) cell at their own jmin column; those combinations are
    replaced by the sides' multi-cluster slots.
    """
    km = ctx.km
    rank = ctx.rank
    rone = ctx.rank_one
    inf = ctx.inf_key
    best = inf
    bestp = 0
    for cellside, srcside, case in ((s, qbar, PROV_MERGE_A), (qbar, s, PROV_MERGE_B)):
        cell_key = cellside.keys[jm]
        if cell_key == inf:
            continue
        cell_on_min = jm == cellside.jmin
        for jp in srcside.fin[bisect_left(srcside.fin, jm):]:
            combos: list[tuple[int, int, int]]
            if cell_on_min and jp == srcside.jmin:
                combos = [
                    (cellside.nt_key, srcside.keys[jp], _TRACK_CELL_BIT),
                    (cell_key, srcside.nt_key, _TRACK_SRC_BIT),
                    (cellside.nt_key, srcside.nt_key, _TRACK_CELL_BIT | _TRACK_SRC_BIT),
                ]
            else:
                combos = [(cell_key, srcside.keys[jp], 0)]
            for ckey, skey, tracks in combos:
                if ckey == inf or skey == inf:
                    continue
                cb, cm = divmod(ckey, km)
                sb, sm = divmod(skey, km)
                mm = cm if cm > sm else sm
                b = rank[mm][jm]
                if cb > b:
                    b = cb
                if sb > b:
                    b = sb
                if b > rone:
                    continue
                key = b * km + mm
                if key < best:
                    best = key
                    bestp = case | (jp << _JP_SHIFT) | tracks
    return best, bestp


def add_free(s_table: FreeTable, q_table: FreeTable, omega: float,
             child_node: int | None = None) -> FreeTable:
    ctx = s_table.ctx
    if child_node is None:
        child_node = q_table.root_node
    qbar = up_free(q_table, omega, child_node=child_node)
    out = FreeTable(ctx, s_table.root_node, "add")
    out.src = s_table
    out.qsrc = qbar
    out.omega_col = ctx.col_of[omega]

    _merge_branch(ctx, s_table.keys, s_table.fin, qbar.keys, qbar.fin,
                  out.keys, out.prov, PROV_MERGE_A, 0)
    _merge_branch(ctx, qbar.keys, qbar.fin, s_table.keys, s_table.fin,
                  out.keys, out.prov, PROV_MERGE_B, 0)

    out.jmin = min(s_table.jmin, qbar.jmin)
    out.nt_key, out.nt_prov = _free_nt_merge(ctx, s_table, qbar, out.jmin)
    out.refresh_fin()
    return out


def build_free_root(tree: RootedTree, ctx: DPContext | None = None) -> FreeTable:
    """Single-row tables for every subtree bottom-up; returns the root's."""
    if ctx is None:
        ctx = DPContext(tree)
    tabs: dict[int, FreeTable] = {}
    for v in tree.post_order:
        kids = tree.children[v]
        if not kids:
            tabs[v] = leaf_free(ctx, v)
            continue
        first = kids[0]
        acc = up_free(tabs.pop(first), tree.parent[first][1], child_node=first)
        for u in kids[1:]:
            acc = add_free(acc, tabs.pop(u), tree.parent[u][1], child_node=u)
        tabs[v] = acc
    return tabs[tree.root]


def backtrack_free(table: FreeTable, col: int, nontrivial: bool) -> list[tuple[int, int]]:
    """Cut edges for a root cell (or the multi-cluster slot at jmin)."""
    ctx = table.ctx
    cuts: list[tuple[int, int]] = []
    stack: list[tuple[FreeTable, int, bool]] = [(table, col, nontrivial)]
    while stack:
        tab, col, nt = stack.pop()
        if nt:
            key, p = tab.nt_key, tab.nt_prov
        else:
            key, p = tab.keys[col], tab.prov[col]
        if key == ctx.inf_key:
            raise CorruptProvenance("walk reached an infeasible cell")
        case = p & 0xF
        jp = (p >> _JP_SHIFT) & 0xFFFFF
        cell_nt = bool(p & _TRACK_CELL_BIT)
        src_nt = bool(p & _TRACK_SRC_BIT)
        if case == PROV_LEAF:
            continue
        if case == PROV_CUT:
            v = tab.child_node
            u = ctx.tree.parent[v][0]
            cuts.append((u, v) if u < v else (v, u))
            stack.append((tab.src, jp, False))
        elif case == PROV_EXTEND:
            stack.append((tab.src, jp, src_nt))
        elif case == PROV_COPY:
            stack.append((tab.src, jp, src_nt))
        elif case == PROV_MERGE_A:
            stack.append((tab.src, tab.src.jmin if cell_nt else col, cell_nt))
            stack.append((tab.qsrc, tab.qsrc.jmin if src_nt else jp, src_nt))
        elif case == PROV_MERGE_B:
            stack.append((tab.src, tab.src.jmin if src_nt else jp, src_nt))
            stack.append((tab.qsrc, tab.qsrc.jmin if cell_nt else col, cell_nt))
        else:
            raise CorruptProvenance(f"cell carries no provenance (case={case})")
    return sorted(cuts)


def solve_any_k(tree: RootedTree) -> SolveResult:
    """Best clustering with at least two clusters, cluster count free.

    Scans the root table's columns, skipping the single-cluster encoding
    at the lightest-edge column in favor of its multi-cluster slot.
    """
    n = tree.node_count
    if n < 2:
        raise TooSmall(f"need at least 2 nodes, got {n}")
    ctx = DPContext(tree)
    root = build_free_root(tree, ctx)

    best_key = ctx.inf_key
    best_col = -1
    best_nt = False
    for j in root.fin:
        if j == root.jmin:
            continue
        if root.keys[j] < best_key:
            best_key = root.keys[j]
            best_col = j
            best_nt = False
    if root.nt_key < best_key:
        best_key = root.nt_key
        best_col = root.jmin
        best_nt = True
    if best_col < 0:
        raise InfeasibleK("every multi-cluster clustering has quality above 1")

    cuts = backtrack_free(root, best_col, best_nt)
    if not cuts:
        raise CorruptProvenance("multi-cluster solution produced no cut edges")
    result = _result_from_cuts(tree, cuts, len(cuts) + 1)
    if ctx.rank_of(result.phi.num, result.phi.den) != best_key // ctx.km:
        raise CorruptProvenance("reconstructed clustering does not match table quality")
    return result
