import math
import random
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

import balclust.dp as dp_mod
from balclust import (
    DPContext,
    InfeasibleK,
    Ratio,
    add_child_tree,
    backtrack,
    brute_force_table,
    brute_force_tree,
    build_graph,
    build_root_table,
    leaf_table,
    pair_less,
    phi_restricted,
    root_tree,
    solve_fixed_k,
    subtree_nodes,
    up_to_parent,
)
from tests.conftest import random_tree


def test_pair_less_total_order_examples():
    assert pair_less((0.5, 0.2), (0.9, 0.3))  # b decides
    assert pair_less((0.5, 0.3), (0.9, 0.3))  # tie on b, M decides
    assert not pair_less((math.inf, math.inf), (0.9, 0.3))
    assert pair_less((0.9, 0.3), (math.inf, math.inf))
    assert not pair_less((0.5, 0.2), (0.5, 0.2))
    # Ratio components compare exactly
    assert pair_less((0.2, Ratio(0.2, 0.9)), (0.2, Ratio(0.2, 0.8)))


def test_leaf_table_cells(g4_tree):
    ctx = DPContext(g4_tree)
    tab = leaf_table(ctx, 3, 3)
    cell = tab.cell(1, 1.0)
    assert (cell.M, cell.b) == (0.0, Ratio(0.0, 1.0))
    assert cell.provenance.kind == "leaf"
    assert tab.cell(2, 1.0).infeasible  # more than one cluster of one node
    assert tab.cell(1, 0.2).infeasible  # a single node has no inner edge


def test_up_to_parent_example_cells(g4_tree):
    # lift the leaf {d} over the 0.8 edge to get the {c,d} subtree table
    ctx = DPContext(g4_tree)
    tab = up_to_parent(leaf_table(ctx, 3, 3), 0.8, 3)
    c = tab.cell(1, 0.8)
    assert (c.M, c.b) == (0.0, Ratio(0.0, 1.0))
    c = tab.cell(2, 1.0)
    assert (c.M, c.b) == (0.8, Ratio(0.8, 1.0))
    assert tab.cell(1, 0.9).infeasible  # head minimum strictly between 0.8 and 1
    assert tab.cell(2, 0.8).infeasible
    # definitional oracle agrees cell for cell
    oracle = brute_force_table(g4_tree, 2, frozenset({2, 3}))
    _assert_tables_equal(tab, oracle, g4_tree, kmax=3)


def test_add_child_tree_example_cells(star_tree):
    # accumulated side {1, 0} over the 0.9 edge, then fold in leaf {2} over 0.4
    ctx = DPContext(star_tree)
    acc = up_to_parent(leaf_table(ctx, 1, 3), 0.9, 3)
    tab = add_child_tree(acc, leaf_table(ctx, 2, 3), 0.4, 3)
    c = tab.cell(1, 0.4)
    assert (c.M, c.b) == (0.0, Ratio(0.0, 1.0))
    c = tab.cell(2, 0.9)
    assert (c.M, c.b) == (0.4, Ratio(0.4, 0.9))
    c = tab.cell(3, 1.0)
    assert (c.M, c.b) == (0.9, Ratio(0.9, 1.0))
    # the only candidate at (2, 0.4) evaluates above 1 and is demoted
    assert tab.cell(2, 0.4).infeasible
    oracle = brute_force_table(star_tree, 0)
    _assert_tables_equal(tab, oracle, star_tree, kmax=3)


def _assert_tables_equal(table, oracle, tree, kmax):
    cols = list(tree.distinct_weights) + [1.0]
    for l in range(1, kmax + 1):
        for mu in cols:
            got = table.cell(l, mu)
            want_m, want_b = oracle.cell(l, mu)
            if got.infeasible:
                assert want_m == math.inf, (l, mu, want_m, want_b)
            else:
                assert want_m != math.inf, (l, mu, got)
                assert got.M == want_m and got.b == want_b, (l, mu)


def test_build_root_table_single_node():
    tree = root_tree([], 0, 1)
    tab = build_root_table(tree, 1)
    assert tab.kind == "leaf"
    cell = tab.cell(1, 1.0)
    assert (cell.M, cell.b) == (0.0, Ratio(0.0, 1.0))


def test_build_root_table_g4_row(g4_tree):
    tab = build_root_table(g4_tree, 2)
    feasible = [tab.cell(2, mu) for mu in tab.columns]
    bs = [c.b for c in feasible if not c.infeasible]
    assert min(bs) == Ratio(0.2, 0.8)  # brute force over the 3 cuts gives 0.25


def test_build_root_table_star(star_tree):
    tab = build_root_table(star_tree, 3)
    c = tab.cell(3, 1.0)
    assert (c.M, c.b) == (0.9, Ratio(0.9, 1.0))


def test_solve_fixed_k_worked_examples(g4_tree):
    r = solve_fixed_k(g4_tree, 2)
    assert r.phi == Ratio(0.2, 0.8)
    assert r.clustering == (frozenset({0, 1}), frozenset({2, 3}))
    assert r.cut_edges == ((1, 2, 0.2),)

    r1 = solve_fixed_k(g4_tree, 1)
    assert r1.phi == Ratio(0.0, 1.0)
    assert r1.clustering == (frozenset({0, 1, 2, 3}),)
    assert r1.cut_edges == ()

    r4 = solve_fixed_k(g4_tree, 4)
    assert r4.phi == Ratio(0.9, 1.0)
    assert len(r4.clustering) == 4


def test_solve_fixed_k_validates_k(g4_tree):
    with pytest.raises(InfeasibleK):
        solve_fixed_k(g4_tree, 5)
    with pytest.raises(ValueError):
        solve_fixed_k(g4_tree, 0)


def test_backtrack_examples(g4_tree):
    tab = build_root_table(g4_tree, 4)
    assert backtrack(tab, 2, 0.9) == [(1, 2)]
    assert backtrack(tab, 1, 0.2) == []
    assert backtrack(tab, 4, 1.0) == [(0, 1), (1, 2), (2, 3)]


@st.composite
def small_trees(draw, max_nodes=7):
    n = draw(st.integers(min_value=2, max_value=max_nodes))
    parents = [draw(st.integers(min_value=0, max_value=v - 1)) for v in range(1, n)]
    ws = draw(
        st.lists(
            st.floats(min_value=0.01, max_value=0.99, allow_nan=False),
            min_size=n - 1, max_size=n - 1, unique=True,
        )
    )
    return root_tree([(parents[v - 1], v, ws[v - 1]) for v in range(1, n)], 0, n)


@settings(max_examples=40, deadline=None)
@given(small_trees(), st.data())
def test_solver_equals_oracle_property(tree, data):
    k = data.draw(st.integers(min_value=1, max_value=tree.node_count))
    assert solve_fixed_k(tree, k).phi == brute_force_tree(tree, k).phi


@settings(max_examples=40, deadline=None)
@given(small_trees(), st.data())
def test_induced_side_clusterings_property(tree, data):
    from balclust.measures import evaluate_on_edges

    edges = tree.edges
    cut_mask = [data.draw(st.booleans()) for _ in edges]
    clustering = tree.components_after_cuts(
        [(u, v) for (u, v, _), c in zip(edges, cut_mask) if c]
    )
    total = phi_restricted(tree, clustering)
    u0, v0, _ = edges[data.draw(st.integers(0, len(edges) - 1))]
    for side in tree.components_after_cuts([(u0, v0)]):
        side_edges = tuple(e for e in edges if e[0] in side and e[1] in side)
        induced = [c & side for c in clustering if c & side]
        assert not (total < evaluate_on_edges(side, side_edges, induced))


def test_solver_matches_exhaustive_cuts_on_random_trees():
    rng = random.Random(424242)
    for _ in range(120):
        n = rng.randint(2, 9)
        tree = random_tree(rng, n, distinct=rng.random() < 0.7)
        for k in range(1, n + 1):
            got = solve_fixed_k(tree, k)
            want = brute_force_tree(tree, k)
            assert got.phi == want.phi, (tree.edges, k)
            assert phi_restricted(tree, got.clustering) == got.phi
            assert len(got.cut_edges) == k - 1
            assert len(got.clustering) == k


def test_solutions_never_exceed_one():
    one = Ratio(1.0, 1.0)
    rng = random.Random(8)
    for _ in range(60):
        n = rng.randint(2, 10)
        tree = random_tree(rng, n)
        for k in range(1, n + 1):
            assert not (one < solve_fixed_k(tree, k).phi)


def test_tables_match_definitional_oracle_on_random_trees():
    rng = random.Random(1357)
    for _ in range(40):
        n = rng.randint(2, 8)
        tree = random_tree(rng, n, distinct=rng.random() < 0.5)
        ctx = DPContext(tree)
        tabs = {}
        for v in tree.post_order:
            kids = tree.children[v]
            if not kids:
                tabs[v] = leaf_table(ctx, v, n)
                continue
            first = kids[0]
            acc = up_to_parent(tabs.pop(first), tree.parent[first][1], n, child_node=first)
            nodes = set(subtree_nodes(tree, first)) | {v}
            _assert_tables_equal(
                acc, brute_force_table(tree, v, frozenset(nodes)), tree, kmax=n
            )
            for u in kids[1:]:
                acc = add_child_tree(acc, tabs.pop(u), tree.parent[u][1], n, child_node=u)
                nodes |= set(subtree_nodes(tree, u))
                _assert_tables_equal(
                    acc, brute_force_table(tree, v, frozenset(nodes)), tree, kmax=n
                )
            tabs[v] = acc


def test_scalar_and_vector_scans_build_identical_tables():
    rng = random.Random(99)
    saved = dp_mod.NUMPY_MIN_PAIRS
    try:
        for _ in range(15):
            n = rng.randint(4, 18)
            tree = random_tree(rng, n, distinct=rng.random() < 0.5)
            k = rng.randint(2, min(n, 6))
            dp_mod.NUMPY_MIN_PAIRS = 10 ** 9
            scalar = build_root_table(tree, k)
            dp_mod.NUMPY_MIN_PAIRS = 1
            vector = build_root_table(tree, k)
            assert scalar.keys == vector.keys
            assert scalar.prov == vector.prov
    finally:
        dp_mod.NUMPY_MIN_PAIRS = saved


def test_bin_floor_holds_for_every_enumerated_clustering():
    # whenever a (count, head-minimum) bin has a feasible cell (M, b),
    # every clustering in the bin has quality >= b and head boundary >= M
    from balclust import enumerate_encodings, subtree_nodes

    rng = random.Random(31337)
    one = Ratio(1.0, 1.0)
    for _ in range(80):
        n = rng.randint(2, 8)
        tree = random_tree(rng, n, distinct=rng.random() < 0.6)
        for v in tree.post_order:
            nodes = subtree_nodes(tree, v)
            if len(nodes) < 2:
                continue
            for entries in enumerate_encodings(tree, v, nodes).values():
                bm, bb = entries[0]
                for M, b in entries[1:]:
                    if b < bb or (b == bb and M < bm):
                        bm, bb = M, b
                if one < bb:
                    continue
                for M, b in entries:
                    assert not (b < bb)
                    assert not (M < bm)


def test_cells_expose_decoded_provenance(g4_tree):
    tab = build_root_table(g4_tree, 3)
    kinds = set()
    walk = [tab]
    while walk:
        t = walk.pop()
        for l in range(1, t.kmax + 1):
            for mu in t.columns:
                kinds.add(t.cell(l, mu).provenance.kind)
        if t.src is not None:
            walk.append(t.src)
        if t.qsrc is not None:
            walk.append(t.qsrc)
    assert {"leaf", "cut", "extend", "infeasible"} <= kinds


def test_division_of_a_clustering_never_degrades():
    # removing a tree edge induces one clustering per side; both evaluate
    # at most the original
    from balclust.measures import evaluate_on_edges

    rng = random.Random(246)
    for _ in range(150):
        n = rng.randint(2, 12)
        tree = random_tree(rng, n, distinct=rng.random() < 0.7)
        edges = tree.edges
        cuts = [e for e in edges if rng.random() < 0.4]
        clustering = tree.components_after_cuts([(u, v) for u, v, _ in cuts])
        total = phi_restricted(tree, clustering)
        u0, v0, _ = edges[rng.randrange(len(edges))]
        sides = tree.components_after_cuts([(u0, v0)])
        for side in sides:
            side_edges = tuple(e for e in edges if e[0] in side and e[1] in side)
            induced = [c & side for c in clustering if c & side]
            value = evaluate_on_edges(side, side_edges, induced)
            assert not (total < value)


def _encoding_of(tree, nodes, root, kept_edges):
    """Definitional (l, mu, M, b) of the clustering given by the kept edges."""
    from balclust.measures import evaluate_on_edges
    from balclust.oracle import _components

    comps = _components(nodes, kept_edges)
    head = next(c for c in comps if root in c)
    inner = [w for u, v, w in kept_edges if u in head and v in head]
    mu = min(inner) if inner else 1.0
    sub_edges = [e for e in tree.edges if e[0] in nodes and e[1] in nodes]
    outs = [w for u, v, w in sub_edges if (u in head) != (v in head)]
    M = max(outs) if outs else 0.0
    b = evaluate_on_edges(nodes, tuple(sub_edges), comps)
    return len(comps), mu, M, b


def test_exchange_of_equally_encoded_subclusterings():
    # replacing the induced clustering of a child subtree with the best
    # clustering of the same (count, head-minimum) bin preserves the root
    # encoding
    rng = random.Random(777)
    for _ in range(60):
        n = rng.randint(3, 8)
        tree = random_tree(rng, n)
        k = rng.randint(2, n)
        result = solve_fixed_k(tree, k)
        cuts = {(u, v) for u, v, _ in result.cut_edges}
        v0 = rng.choice([v for v in range(n) if v != tree.root])
        q_nodes = subtree_nodes(tree, v0)
        q_edges = [e for e in tree.edges if e[0] in q_nodes and e[1] in q_nodes]

        kept_a = [e for e in q_edges if (e[0], e[1]) not in cuts]
        l_a, mu_a, _, _ = _encoding_of(tree, q_nodes, v0, kept_a)

        # oracle: best (b, M) achiever in the same bin of the subtree
        best = None
        best_kept = None
        for r in range(len(q_edges) + 1):
            for cut in combinations(range(len(q_edges)), r):
                kept = [e for i, e in enumerate(q_edges) if i not in cut]
                l_b, mu_b, m_b, b_b = _encoding_of(tree, q_nodes, v0, kept)
                if (l_b, mu_b) != (l_a, mu_a):
                    continue
                if best is None or (b_b, m_b) < best:
                    if best is None or b_b < best[0] or (b_b == best[0] and m_b < best[1]):
                        best = (b_b, m_b)
                        best_kept = kept
        assert best_kept is not None  # the induced clustering itself is in the bin

        all_nodes = frozenset(range(n))
        kept_full = [e for e in tree.edges if (e[0], e[1]) not in cuts]
        before = _encoding_of(tree, all_nodes, tree.root, kept_full)
        spliced = [e for e in kept_full if not (e[0] in q_nodes and e[1] in q_nodes)]
        spliced += best_kept
        after = _encoding_of(tree, all_nodes, tree.root, spliced)
        assert after == before


def test_optimum_invariant_across_tied_maximum_spanning_trees():
    # equal weights admit several maximum spanning trees; the optimal value
    # is the same on each of them
    from balclust import maximum_spanning_tree
    from tests.test_mst import enumerate_spanning_trees

    g = build_graph(4, [
        (0, 1, 0.5), (1, 2, 0.5), (2, 3, 0.5), (0, 3, 0.5), (0, 2, 0.3), (1, 3, 0.9),
    ])
    best_total = sum(w for _, _, w in maximum_spanning_tree(g))
    msts = [t for t in enumerate_spanning_trees(g)
            if sum(w for _, _, w in t) == best_total]
    assert len(msts) > 1
    for k in range(1, 5):
        values = {solve_fixed_k(root_tree(t, 0, 4), k).phi for t in msts}
        assert len(values) == 1


def test_relabeling_does_not_change_optimum():
    # the fold order follows child indices; relabeling permutes that order
    # and must not change the optimal value
    rng = random.Random(31415)
    for _ in range(30):
        n = rng.randint(3, 9)
        tree = random_tree(rng, n)
        perm = list(range(n))
        rng.shuffle(perm)
        relabeled = root_tree(
            [(perm[u], perm[v], w) for u, v, w in tree.edges], perm[tree.root], n
        )
        for k in (1, 2, min(3, n)):
            assert solve_fixed_k(tree, k).phi == solve_fixed_k(relabeled, k).phi


def test_repeat_solves_are_identical(g4_tree):
    a = solve_fixed_k(g4_tree, 3)
    b = solve_fixed_k(g4_tree, 3)
    assert a == b


def test_shared_tree_is_safe_across_threads():
    # trees and graphs are immutable after construction; concurrent solves
    # over the same instance must agree with the sequential result
    from concurrent.futures import ThreadPoolExecutor

    rng = random.Random(5150)
    tree = random_tree(rng, 9)
    expected = {k: solve_fixed_k(tree, k).phi for k in range(1, 10)}
    with ThreadPoolExecutor(max_workers=4) as pool:
        futures = [pool.submit(solve_fixed_k, tree, k) for k in range(1, 10) for _ in range(3)]
        for fut, k in zip(futures, [k for k in range(1, 10) for _ in range(3)]):
            assert fut.result().phi == expected[k]
