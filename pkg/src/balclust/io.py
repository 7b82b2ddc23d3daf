"""Input parsing and result serialization.

Supported inputs: a square similarity matrix CSV (optional label header),
an edge list CSV with arbitrary string labels, or a file of point
vectors converted to similarities through a kernel. Distances never
reach the solver core; this module owns the conversion.

Serialization is deterministic: fixed key order, clusters sorted by
smallest member label, weights rendered so they round-trip exactly.
"""

from __future__ import annotations

import csv
import hashlib
import io as _stdio
import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

from .dp import SolveResult
from .errors import (
    Asymmetric,
    DimensionMismatch,
    Disconnected,
    DuplicateEdge,
    NotSquare,
    ParseError,
)
from .graph import WeightedGraph, build_graph, rescale_weights
from .mst import RootedTree

SYMMETRY_TOL = 1e-12
CLAMP_HIGH = 1.0 - 1e-9
CLAMP_LOW = 1e-300


@dataclass(frozen=True)
class InputSpec:
    """How to load one input file into a similarity graph."""

    format: str  # matrix | edgelist | points
    path: str
    kernel: str = "gaussian"  # points only: gaussian | inverse
    sigma: float = 1.0
    normalize: bool = False

    def __post_init__(self):
        if self.format not in ("matrix", "edgelist", "points"):
            raise ValueError(f"unknown format {self.format!r}")
        if self.kernel not in ("gaussian", "inverse"):
            raise ValueError(f"unknown kernel {self.kernel!r}")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")


def load_input(spec: InputSpec) -> WeightedGraph:
    if spec.format == "matrix":
        return parse_matrix_csv(spec.path, normalize=spec.normalize)
    if spec.format == "edgelist":
        return parse_edge_list(spec.path, normalize=spec.normalize)
    labels, points = parse_points(spec.path)
    return points_to_similarity(points, kernel=spec.kernel, sigma=spec.sigma, labels=labels)


def digest_file(path: str | Path) -> str:
    """SHA-256 of the raw input bytes; ties results to their input."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _read_rows(path: str | Path) -> list[list[str]]:
    with open(path, newline="") as fh:
        return [row for row in csv.reader(fh)]


def parse_matrix_csv(path: str | Path, normalize: bool = False) -> WeightedGraph:
    """Square similarity matrix, optional header row of labels.

    Entries (i, j) and (j, i) must agree within 1e-12 and are averaged;
    the diagonal is ignored. The result is the complete graph over the
    labels. With normalize=True, arbitrary positive similarities are
    rescaled into (1e-9, 1 - 1e-9) before validation.
    """
    rows = [r for r in _read_rows(path) if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError("empty matrix file")
    labels: list[str] | None = None
    first = rows[0]
    if any(not _is_number(c) for c in first):
        labels = [c.strip() for c in first]
        rows = rows[1:]
    n = len(rows)
    if n == 0:
        raise ParseError("matrix has a header but no data rows")
    values: list[list[float]] = []
    for i, row in enumerate(rows):
        if len(row) != n:
            raise NotSquare(f"row {i + 1} has {len(row)} columns, expected {n}")
        try:
            values.append([float(c) for c in row])
        except ValueError as exc:
            raise ParseError(f"non-numeric matrix entry in row {i + 1}", line=i + 1) from exc
    if labels is None:
        labels = [str(i) for i in range(n)]
    elif len(labels) != n:
        raise NotSquare(f"header has {len(labels)} labels for {n} rows")

    weights: list[float] = []
    pairs: list[tuple[int, int]] = []
    for i in range(n):
        for j in range(i + 1, n):
            a, b = values[i][j], values[j][i]
            if abs(a - b) > SYMMETRY_TOL:
                raise Asymmetric(f"A[{i},{j}]={a!r} differs from A[{j},{i}]={b!r}")
            pairs.append((i, j))
            weights.append((a + b) / 2.0)
    if normalize and weights:
        weights = rescale_weights(weights)
    edges = [(u, v, w) for (u, v), w in zip(pairs, weights)]
    return build_graph(n, edges, labels=labels)


def _is_number(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def parse_edge_list(path: str | Path, normalize: bool = False) -> WeightedGraph:
    """Edge list with lines `u,v,w`; labels are arbitrary strings.

    Node indices are assigned by first appearance. Connectivity is
    enforced; repeated pairs raise DuplicateEdge even when the weights
    agree.
    """
    index: dict[str, int] = {}
    raw: list[tuple[int, int, float, int]] = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not any(c.strip() for c in row):
                continue
            if len(row) != 3:
                raise ParseError(f"expected `u,v,w`, got {len(row)} fields", line=lineno)
            ul, vl, ws = (c.strip() for c in row)
            try:
                w = float(ws)
            except ValueError as exc:
                raise ParseError(f"bad weight {ws!r}", line=lineno) from exc
            if ul == vl:
                raise ParseError(f"self loop on {ul!r}", line=lineno)
            for lab in (ul, vl):
                if lab not in index:
                    index[lab] = len(index)
            raw.append((index[ul], index[vl], w, lineno))
    if not raw and not index:
        raise ParseError("empty edge list")
    seen: set[tuple[int, int]] = set()
    for u, v, _, lineno in raw:
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdge(f"line {lineno}: repeated pair")
        seen.add(key)
    weights = [w for _, _, w, _ in raw]
    if normalize and weights:
        weights = rescale_weights(weights)
    labels = [lab for lab, _ in sorted(index.items(), key=lambda it: it[1])]
    edges = [(u, v, w) for (u, v, _, _), w in zip(raw, weights)]
    if len(index) >= 2 and not edges:
        raise Disconnected("no edges")
    return build_graph(len(index), edges, labels=labels)


def parse_points(path: str | Path) -> tuple[list[str], list[list[float]]]:
    """Whitespace-separated vectors, one per line, optional leading label."""
    labels: list[str] = []
    points: list[list[float]] = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if _is_number(parts[0]):
                label = str(len(points))
                coords = parts
            else:
                label = parts[0]
                coords = parts[1:]
            if not coords:
                raise ParseError("no coordinates", line=lineno)
            try:
                vec = [float(c) for c in coords]
            except ValueError as exc:
                raise ParseError(f"bad coordinate in {parts!r}", line=lineno) from exc
            labels.append(label)
            points.append(vec)
    if not points:
        raise ParseError("empty points file")
    return labels, points


def points_to_similarity(
    points: list[list[float]],
    kernel: str = "gaussian",
    sigma: float = 1.0,
    labels: list[str] | None = None,
) -> WeightedGraph:
    """Complete similarity graph over point vectors.

    gaussian: w = exp(-d^2 / (2 sigma^2)); inverse: w = 1 / (1 + d), with
    d the Euclidean distance. Coincident points would give w = 1, outside
    the open interval, and are clamped to 1 - 1e-9 with a warning;
    symmetric underflow toward 0 is clamped upward the same way.
    """
    if kernel not in ("gaussian", "inverse"):
        raise ValueError(f"unknown kernel {kernel!r}")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    n = len(points)
    if n == 0:
        raise ValueError("no points")
    dim = len(points[0])
    for i, p in enumerate(points):
        if len(p) != dim:
            raise DimensionMismatch(f"point {i} has dimension {len(p)}, expected {dim}")
    if labels is None:
        labels = [str(i) for i in range(n)]
    edges = []
    clamped = 0
    for i in range(n):
        for j in range(i + 1, n):
            d2 = sum((a - b) ** 2 for a, b in zip(points[i], points[j]))
            if kernel == "gaussian":
                w = math.exp(-d2 / (2.0 * sigma * sigma))
            else:
                w = 1.0 / (1.0 + math.sqrt(d2))
            if w >= 1.0:
                w = CLAMP_HIGH
                clamped += 1
            elif w < CLAMP_LOW:
                w = CLAMP_LOW
                clamped += 1
            edges.append((i, j, w))
    if clamped:
        warnings.warn(
            f"{clamped} similarity value(s) clamped into the open interval (0,1)",
            stacklevel=2,
        )
    return build_graph(n, edges, labels=labels)


@dataclass(frozen=True)
class ResultDocument:
    """Serializable view of one solve, deterministic field order."""

    phi: str
    phi_exact: tuple[float, float]
    k: int
    clusters: tuple[tuple[str, ...], ...]
    cut_edges: tuple[tuple[str, str, float], ...]
    mst_edges: tuple[tuple[str, str, float], ...]
    solver: str
    input_digest: str

    def to_json(self) -> str:
        doc = {
            "phi": self.phi,
            "phi_exact": {"numerator": self.phi_exact[0], "denominator": self.phi_exact[1]},
            "k": self.k,
            "clusters": [list(c) for c in self.clusters],
            "cut_edges": [list(e) for e in self.cut_edges],
            "mst_edges": [list(e) for e in self.mst_edges],
            "solver": self.solver,
            "input_digest": self.input_digest,
        }
        return json.dumps(doc, indent=2) + "\n"


def emit_result(
    result: SolveResult,
    graph: WeightedGraph,
    tree: RootedTree,
    solver: str,
    input_digest: str = "",
) -> tuple[ResultDocument, str]:
    """Build the result document and its serialized text.

    Clusters are sorted by smallest member label with members sorted;
    repeat runs over the same input produce byte-identical text.
    """
    labels = graph.node_labels
    clusters = tuple(
        sorted((tuple(sorted(labels[u] for u in c)) for c in result.clustering), key=lambda c: c[0])
    )
    cut_edges = tuple(
        (labels[u], labels[v], w) for u, v, w in sorted(result.cut_edges)
    )
    mst_edges = tuple((labels[u], labels[v], w) for u, v, w in tree.edges)
    doc = ResultDocument(
        phi=result.phi.decimal(17),
        phi_exact=(result.phi.num, result.phi.den),
        k=result.k,
        clusters=clusters,
        cut_edges=cut_edges,
        mst_edges=mst_edges,
        solver=solver,
        input_digest=input_digest,
    )
    return doc, doc.to_json()


def emit_dot(
    graph: WeightedGraph,
    tree: RootedTree,
    clustering,
    cut_edges=(),
) -> str:
    """Graphviz text: spanning-tree edges bold, cut edges dashed, one
    fill color per cluster."""
    palette = [
        "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462",
        "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f",
    ]
    labels = graph.node_labels
    tree_pairs = {(u, v) for u, v, _ in tree.edges}
    cut_pairs = {(min(u, v), max(u, v)) for u, v, *_ in cut_edges}
    color_of: dict[int, str] = {}
    ordered = sorted(clustering, key=min)
    for ci, cluster in enumerate(ordered):
        for u in cluster:
            color_of[u] = palette[ci % len(palette)]
    out = _stdio.StringIO()
    out.write("graph clustering {\n")
    out.write("  node [style=filled];\n")
    for u in range(graph.node_count):
        out.write(f'  "{labels[u]}" [fillcolor="{color_of.get(u, "#ffffff")}"];\n')
    for u, v, w in graph.edges:
        attrs = [f'label="{w:g}"']
        if (u, v) in cut_pairs:
            attrs.append("style=dashed")
            attrs.append("color=red")
            attrs.append("penwidth=2")
        elif (u, v) in tree_pairs:
            attrs.append("style=bold")
            attrs.append("penwidth=2")
        else:
            attrs.append("color=gray70")
        out.write(f'  "{labels[u]}" -- "{labels[v]}" [{", ".join(attrs)}];\n')
    out.write("}\n")
    return out.getvalue()


def write_edge_list(graph: WeightedGraph) -> str:
    """Edge-list text that reparses to the same graph (weights exact)."""
    lines = [
        f"{graph.node_labels[u]},{graph.node_labels[v]},{w!r}" for u, v, w in graph.edges
    ]
    return "\n".join(lines) + "\n"


def write_assignments_csv(graph: WeightedGraph, clustering) -> str:
    """Delimited node-to-cluster assignment: `node,cluster` rows."""
    ordered = sorted(clustering, key=min)
    cluster_of: dict[int, int] = {}
    for ci, cluster in enumerate(ordered):
        for u in cluster:
            cluster_of[u] = ci
    lines = ["node,cluster"]
    for u in range(graph.node_count):
        lines.append(f"{graph.node_labels[u]},{cluster_of[u]}")
    return "\n".join(lines) + "\n"
