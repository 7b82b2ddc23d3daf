"""Command-line interface.

Exit codes: 0 success, 2 input error, 3 infeasible request, 4 enumeration
budget exceeded.
"""

from __future__ import annotations

import functools
import sys
import time
from pathlib import Path

import click

from .anyk import solve_any_k
from .dp import SolveResult, solve_fixed_k
from .errors import BudgetExceeded, InfeasibleK, InputError, TooSmall
from .graph import WeightedGraph, build_graph
from .io import InputSpec, digest_file, emit_dot, emit_result, load_input, write_assignments_csv
from .mst import RootedTree, tree_from_graph
from .oracle import brute_force_graph, brute_force_tree, default_budget

EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_BUDGET = 4


def _mapped_exits(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (InputError, ValueError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_INPUT)
        except (InfeasibleK, TooSmall) as exc:
            click.echo(f"infeasible: {exc}", err=True)
            sys.exit(EXIT_INFEASIBLE)
        except BudgetExceeded as exc:
            click.echo(f"budget exceeded: {exc}", err=True)
            sys.exit(EXIT_BUDGET)

    return wrapper


def _input_options(fn):
    fn = click.option("--input", "input_path", required=True,
                      type=click.Path(exists=True, dir_okay=False),
                      help="Input file.")(fn)
    fn = click.option("--format", "input_format", default="matrix", show_default=True,
                      type=click.Choice(["matrix", "edgelist", "points"]),
                      help="Input format.")(fn)
    fn = click.option("--kernel", default="gaussian", show_default=True,
                      type=click.Choice(["gaussian", "inverse"]),
                      help="Similarity kernel for points input.")(fn)
    fn = click.option("--sigma", default=1.0, show_default=True, type=float,
                      help="Gaussian kernel width for points input.")(fn)
    fn = click.option("--normalize", is_flag=True,
                      help="Rescale positive similarities into (0,1) before validation.")(fn)
    return fn


def _load(input_path, input_format, kernel, sigma, normalize) -> tuple[WeightedGraph, str]:
    spec = InputSpec(format=input_format, path=input_path, kernel=kernel,
                     sigma=sigma, normalize=normalize)
    return load_input(spec), digest_file(input_path)


def _solve(tree: RootedTree, k: int | None, any_k: bool) -> tuple[SolveResult, str]:
    if any_k:
        return solve_any_k(tree), "any_k"
    return solve_fixed_k(tree, k), "fixed_k"


@click.group()
@click.version_option(package_name="balclust")
def main():
    """Balanced min-max clustering of weighted similarity graphs."""


@main.command()
@_input_options
@click.option("--k", type=int, default=None, help="Exact number of clusters.")
@click.option("--any-k", "any_k", is_flag=True, help="Optimize over every cluster count >= 2.")
@click.option("--output", type=click.Path(dir_okay=False), default=None,
              help="Write the result document to this file.")
@click.option("--dot", "dot_path", type=click.Path(dir_okay=False), default=None,
              help="Write a Graphviz rendering of the clustering.")
@click.option("--plot", "plot_path", type=click.Path(dir_okay=False), default=None,
              help="Render the clustering to an image file.")
@_mapped_exits
def solve(input_path, input_format, kernel, sigma, normalize, k, any_k,
          output, dot_path, plot_path):
    """Solve one instance and print the result document."""
    if (k is None) == (not any_k):
        raise ValueError("choose exactly one of --k or --any-k")
    graph, digest = _load(input_path, input_format, kernel, sigma, normalize)
    tree = tree_from_graph(graph)
    result, mode = _solve(tree, k, any_k)
    _, text = emit_result(result, graph, tree, mode, digest)
    click.echo(text, nl=False)
    if output:
        Path(output).write_text(text)
    if dot_path:
        Path(dot_path).write_text(emit_dot(graph, tree, result.clustering, result.cut_edges))
    if plot_path:
        from .plotting import render_clustering

        render_clustering(graph, tree, result.clustering, result.cut_edges,
                          phi=float(result.phi), path=plot_path)


@main.command()
@_input_options
@click.option("--k", type=int, default=None,
              help="Check only this cluster count (default: all feasible).")
@click.option("--max-nodes", type=int, default=None,
              help="Override both oracle node budgets.")
@_mapped_exits
def verify(input_path, input_format, kernel, sigma, normalize, k, max_nodes):
    """Cross-check the solver against brute-force oracles; exit 1 on any
    disagreement."""
    import dataclasses

    graph, _ = _load(input_path, input_format, kernel, sigma, normalize)
    tree = tree_from_graph(graph)
    n = graph.node_count
    budget = default_budget()
    if max_nodes is not None:
        budget = dataclasses.replace(budget, max_nodes_tree=max_nodes, max_nodes_graph=max_nodes)
    ks = [k] if k is not None else list(range(1, n + 1))
    failures = 0
    for kk in ks:
        solved = solve_fixed_k(tree, kk)
        tree_oracle = brute_force_tree(tree, kk, budget)
        pieces = [f"solver={solved.phi.decimal(17)}", f"tree-oracle={tree_oracle.phi.decimal(17)}"]
        ok = solved.phi == tree_oracle.phi
        if n <= budget.max_nodes_graph:
            graph_oracle = brute_force_graph(graph, kk, budget)
            pieces.append(f"graph-oracle={graph_oracle.phi.decimal(17)}")
            ok = ok and solved.phi == graph_oracle.phi
        status = "OK" if ok else "MISMATCH"
        click.echo(f"k={kk}: {status} " + " ".join(pieces))
        if not ok:
            failures += 1
    if failures:
        click.echo(f"{failures} disagreement(s) found", err=True)
        sys.exit(1)
    click.echo("all checks passed")


@main.command()
@click.option("--n", type=int, required=True, help="Number of nodes.")
@click.option("--k", type=int, required=True, help="Cluster count for the fixed-k solve.")
@click.option("--seed", type=int, default=0, show_default=True, help="RNG seed.")
@_mapped_exits
def bench(n, k, seed):
    """Time the solver on a random complete similarity graph."""
    import numpy as np

    if n < 2:
        raise ValueError("need n >= 2")
    rng = np.random.default_rng(seed)
    w = rng.uniform(1e-6, 1.0 - 1e-6, size=(n, n))
    edges = [(u, v, float(w[u, v])) for u in range(n) for v in range(u + 1, n)]
    graph = build_graph(n, edges)

    t0 = time.perf_counter()
    tree = tree_from_graph(graph)
    t_mst = time.perf_counter() - t0

    t0 = time.perf_counter()
    fixed = solve_fixed_k(tree, k)
    t_fixed = time.perf_counter() - t0

    t0 = time.perf_counter()
    free = solve_any_k(tree)
    t_free = time.perf_counter() - t0

    click.echo(f"n={n} k={k} seed={seed}")
    click.echo(f"maximum spanning tree: {t_mst:.3f}s")
    click.echo(f"solve_fixed_k: {t_fixed:.3f}s  phi={fixed.phi.decimal(17)}")
    click.echo(f"solve_any_k:   {t_free:.3f}s  phi={free.phi.decimal(17)} k={free.k}")


@main.command()
@_input_options
@click.option("--k", type=int, default=None, help="Exact number of clusters.")
@click.option("--any-k", "any_k", is_flag=True, help="Optimize over every cluster count >= 2.")
@click.option("--outdir", required=True, type=click.Path(file_okay=False),
              help="Directory for the report bundle.")
@click.option("--scan-k", "scan_k", is_flag=True,
              help="Also plot the optimal quality for every cluster count.")
@_mapped_exits
def report(input_path, input_format, kernel, sigma, normalize, k, any_k, outdir, scan_k):
    """Solve and write a report bundle: result document, assignment CSV,
    Graphviz text, and rendered figures."""
    from .plotting import render_clustering, render_phi_by_k

    if (k is None) == (not any_k):
        raise ValueError("choose exactly one of --k or --any-k")
    graph, digest = _load(input_path, input_format, kernel, sigma, normalize)
    tree = tree_from_graph(graph)
    result, mode = _solve(tree, k, any_k)

    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    _, text = emit_result(result, graph, tree, mode, digest)
    (out / "result.json").write_text(text)
    (out / "assignments.csv").write_text(write_assignments_csv(graph, result.clustering))
    (out / "graph.dot").write_text(emit_dot(graph, tree, result.clustering, result.cut_edges))
    render_clustering(graph, tree, result.clustering, result.cut_edges,
                      phi=float(result.phi), path=str(out / "clusters.png"))
    written = ["result.json", "assignments.csv", "graph.dot", "clusters.png"]
    if scan_k:
        ks = list(range(1, graph.node_count + 1))
        phis = [float(solve_fixed_k(tree, kk).phi) for kk in ks]
        render_phi_by_k(ks, phis, path=str(out / "phi_by_k.png"))
        written.append("phi_by_k.png")
    click.echo(f"wrote {', '.join(written)} to {out}")


if __name__ == "__main__":
    main()
