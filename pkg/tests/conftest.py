import random

import pytest

from balclust import build_graph, root_tree, tree_from_graph

# The running example: complete graph on {a, b, c, d} whose maximum
# spanning tree is the path a-b-c-d.
G4_EDGES = [
    (0, 1, 0.9),
    (1, 2, 0.2),
    (2, 3, 0.8),
    (0, 2, 0.15),
    (0, 3, 0.1),
    (1, 3, 0.12),
]


@pytest.fixture
def g4():
    return build_graph(4, G4_EDGES, labels=["a", "b", "c", "d"])


@pytest.fixture
def g4_tree(g4):
    return tree_from_graph(g4)


@pytest.fixture
def star_tree():
    # center 0 with leaves 1 (weight 0.9) and 2 (weight 0.4)
    return root_tree([(0, 1, 0.9), (0, 2, 0.4)], 0)


def _open_unit(rng: random.Random) -> float:
    """Uniform draw from the open interval (0, 1)."""
    while True:
        w = rng.random()
        if w != 0.0:
            return w


def random_tree(rng: random.Random, n: int, distinct: bool = True):
    """Random rooted tree on n nodes with uniform weights in (0, 1)."""
    if distinct:
        while True:
            ws = [_open_unit(rng) for _ in range(n - 1)]
            if len(set(ws)) == n - 1:
                break
    else:
        ws = []
        for _ in range(n - 1):
            if ws and rng.random() < 0.3:
                ws.append(rng.choice(ws))
            else:
                ws.append(_open_unit(rng))
    edges = [(rng.randrange(v), v, ws[v - 1]) for v in range(1, n)]
    return root_tree(edges, 0, n)


def random_connected_graph(rng: random.Random, n: int, min_density: float = 0.5):
    """Random connected graph with edge density at least min_density and
    distinct weights."""
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    order = list(range(n))
    rng.shuffle(order)
    chosen = set()
    for i in range(1, n):
        u, v = order[rng.randrange(i)], order[i]
        chosen.add((min(u, v), max(u, v)))
    density = rng.uniform(min_density, 1.0)
    target = max(len(chosen), round(density * len(pairs)))
    rest = [p for p in pairs if p not in chosen]
    rng.shuffle(rest)
    chosen.update(rest[: target - len(chosen)])
    while True:
        ws = [_open_unit(rng) for _ in chosen]
        if len(set(ws)) == len(chosen):
            break
    edges = [(u, v, w) for (u, v), w in zip(sorted(chosen), ws)]
    return build_graph(n, edges)


def random_complete_graph(seed: int, n: int):
    """Random complete similarity graph, numpy-seeded for speed."""
    import numpy as np

    rng = np.random.default_rng(seed)
    w = rng.uniform(1e-6, 1.0 - 1e-6, size=(n, n))
    edges = [(u, v, float(w[u, v])) for u in range(n) for v in range(u + 1, n)]
    return build_graph(n, edges)
