"""Figure rendering for the report path.

Figures are drawn with a deterministic layout: nodes sit on a circle
grouped by cluster, so cluster membership is readable without a graph
layout engine. Rendering uses the Agg backend and writes straight to
files.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .graph import WeightedGraph  # noqa: E402
from .mst import RootedTree  # noqa: E402

_CLUSTER_CMAP = "tab20"


def cluster_layout(graph: WeightedGraph, clustering) -> dict[int, tuple[float, float]]:
    """Circular positions with cluster members adjacent.

    A small angular gap separates consecutive clusters so the grouping is
    visible even without colors.
    """
    ordered = sorted(clustering, key=min)
    n = graph.node_count
    k = len(ordered)
    gap = 0.35 if k > 1 else 0.0
    total = n + gap * k
    pos: dict[int, tuple[float, float]] = {}
    slot = 0.0
    for cluster in ordered:
        for u in sorted(cluster):
            angle = 2.0 * math.pi * slot / total
            pos[u] = (math.cos(angle), math.sin(angle))
            slot += 1.0
        slot += gap
    return pos


def render_clustering(
    graph: WeightedGraph,
    tree: RootedTree,
    clustering,
    cut_edges=(),
    phi: float | None = None,
    path: str | None = None,
    title: str | None = None,
):
    """Draw the graph with spanning-tree, cut, and residual edges styled
    apart and nodes colored by cluster. Saves to `path` when given and
    returns the figure."""
    pos = cluster_layout(graph, clustering)
    ordered = sorted(clustering, key=min)
    cmap = matplotlib.colormaps[_CLUSTER_CMAP]
    color_of = {}
    for ci, cluster in enumerate(ordered):
        for u in cluster:
            color_of[u] = cmap(ci % cmap.N)

    tree_pairs = {(u, v) for u, v, _ in tree.edges}
    cut_pairs = {(min(u, v), max(u, v)) for u, v, *_ in cut_edges}

    fig, ax = plt.subplots(figsize=(7, 7))
    for u, v, w in graph.edges:
        (x0, y0), (x1, y1) = pos[u], pos[v]
        if (u, v) in cut_pairs:
            ax.plot([x0, x1], [y0, y1], linestyle="--", color="crimson",
                    linewidth=1.8, zorder=2)
        elif (u, v) in tree_pairs:
            ax.plot([x0, x1], [y0, y1], color="black",
                    linewidth=0.8 + 2.2 * w, zorder=3)
        elif graph.node_count <= 40:
            # residual edges clutter large instances; draw them only when readable
            ax.plot([x0, x1], [y0, y1], color="0.85", linewidth=0.6, zorder=1)
    xs = [pos[u][0] for u in range(graph.node_count)]
    ys = [pos[u][1] for u in range(graph.node_count)]
    ax.scatter(xs, ys, s=260 if graph.node_count <= 40 else 40,
               c=[color_of[u] for u in range(graph.node_count)],
               edgecolors="black", linewidths=0.8, zorder=4)
    if graph.node_count <= 40:
        for u in range(graph.node_count):
            ax.annotate(graph.node_labels[u], pos[u], ha="center", va="center",
                        fontsize=9, zorder=5)
    if title is None:
        title = f"{len(ordered)} clusters"
        if phi is not None:
            title += f", worst quality {phi:.6g}"
    ax.set_title(title)
    ax.set_aspect("equal")
    ax.axis("off")
    fig.tight_layout()
    if path is not None:
        fig.savefig(path, dpi=150)
        plt.close(fig)
    return fig


def render_phi_by_k(ks, phis, path: str | None = None):
    """Quality of the optimal clustering as the cluster count varies."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ks, phis, marker="o", color="steelblue")
    ax.set_xlabel("clusters k")
    ax.set_ylabel("optimal worst-cluster quality")
    ax.set_ylim(bottom=0)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    if path is not None:
        fig.savefig(path, dpi=150)
        plt.close(fig)
    return fig
