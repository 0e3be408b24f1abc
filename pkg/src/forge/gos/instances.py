"""Ready-made instances: graph templates, spider instances and small random ones."""

from __future__ import annotations

import numpy as np

from ..graph import Graph, cycle_graph, path_graph
from ..metric import WeightedSpace, all_pairs
from .model import GraphOfSpaces
from .spiders import build_spider_gos

__all__ = ["binary_tree", "heap_tree", "parse_gamma", "spider_instance", "random_instance"]


def binary_tree(depth: int) -> Graph:
    """Complete binary tree with leaves at ``depth`` (``2**(depth+1) - 1`` vertices)."""
    return heap_tree(2 ** (depth + 1) - 1)


def heap_tree(n: int) -> Graph:
    """Binary tree on ``n`` vertices in heap order (parent of ``v`` is ``(v-1)//2``)."""
    return Graph.from_edges(n, [((v - 1) // 2, v) for v in range(1, n)])


def parse_gamma(spec: str) -> Graph:
    """``cycle:N``, ``path:N``, ``tree:DEPTH`` or ``heap:N``."""
    kind, _, arg = spec.partition(":")
    try:
        k = int(arg)
    except ValueError:
        raise ValueError(f"bad graph template {spec!r}") from None
    if kind == "cycle":
        return cycle_graph(k)
    if kind == "path":
        return path_graph(k)
    if kind == "tree":
        return binary_tree(k)
    if kind == "heap":
        return heap_tree(k)
    raise ValueError(f"unknown graph template {kind!r}")


def spider_instance(spec: str, L: int = 2, legs: int | None = None) -> GraphOfSpaces:
    """Spiders over a template graph; legs default to the maximum degree."""
    g = parse_gamma(spec)
    d = legs if legs is not None else max(g.degrees)
    return build_spider_gos(g, d, L, allow_irregular=True)


def _random_space(rng: np.random.Generator, k: int) -> list[tuple[int, int, float]]:
    edges = []
    for v in range(1, k):
        edges.append((int(rng.integers(0, v)), v, float(np.round(rng.uniform(0.5, 4.0), 3))))
    have = {(min(a, b), max(a, b)) for a, b, _ in edges}
    for _ in range(int(rng.integers(0, k))):
        a, b = sorted(int(x) for x in rng.choice(k, size=2, replace=False))
        if (a, b) not in have:
            have.add((a, b))
            edges.append((a, b, float(np.round(rng.uniform(0.5, 4.0), 3))))
    return edges


def random_instance(seed: int, max_vertex_spaces: int = 3, coherent: bool = True) -> GraphOfSpaces:
    """A valid instance with at most three vertex spaces and small random geometry.

    Each edge space is a sample of points of the head's space with the
    induced metric; an isometric copy is grafted onto the tail's space at
    one point, which leaves all earlier distances unchanged.  Coherent
    instances sample and graft at the basepoints (point 0); otherwise the
    points are random, which is what lets strings cut through other
    pieces.
    """
    rng = np.random.default_rng(seed)
    nv = int(rng.integers(2, max_vertex_spaces + 1))
    if nv == 2:
        gamma = path_graph(2)
    else:
        gamma = cycle_graph(3) if rng.random() < 0.7 else path_graph(3)
    sizes = [int(rng.integers(3, 7)) for _ in range(nv)]
    spaces = [_random_space(rng, k) for k in sizes]
    orient, eds, ah, at = [], [], [], []
    for u, v in gamma.edges:
        t, h = (u, v) if rng.random() < 0.5 else (v, u)
        orient.append((t, h))
        dh = all_pairs(WeightedSpace.from_edges(sizes[h], spaces[h]))
        k = int(rng.integers(1, min(4, sizes[h]) + 1))
        perm = [int(x) for x in rng.permutation(sizes[h])]
        first = 0 if coherent else perm[0]
        s = [first] + [x for x in perm if x != first][: k - 1]
        metric = dh[np.ix_(s, s)]
        eds.append(WeightedSpace.from_edges(k, [(i, j, float(metric[i, j])) for i in range(k) for j in range(i + 1, k)]))
        ah.append(tuple(s))
        anchor = 0 if coherent else int(rng.integers(0, sizes[t]))
        copy = [anchor] + list(range(sizes[t], sizes[t] + k - 1))
        sizes[t] += k - 1
        spaces[t] += [(copy[i], copy[j], float(metric[i, j])) for i in range(k) for j in range(i + 1, k)]
        at.append(tuple(copy))
    vs = tuple(WeightedSpace.from_edges(sizes[v], spaces[v]) for v in range(nv))
    return GraphOfSpaces(gamma, tuple(orient), vs, tuple(eds), tuple(ah), tuple(at), tuple(0 for _ in gamma.edges))
