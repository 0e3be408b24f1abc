"""Spider vertex spaces: ``d`` legs of length ``L`` meeting at a root."""

from __future__ import annotations

import numpy as np

from ..aut import automorphism_group, is_vertex_free
from ..graph import Graph
from ..metric import TOL, WeightedSpace, all_pairs
from .model import GraphOfSpaces

__all__ = [
    "spider_space",
    "leg_points",
    "path_space",
    "build_spider_gos",
    "link_rigidity_order",
    "link_rigidity_check",
    "LINK_RIGIDITY_CAP",
]

LINK_RIGIDITY_CAP = 300


def spider_space(d: int, L: int) -> WeightedSpace:
    """Root 0; leg ``j`` is ``0, 1+jL, ..., (j+1)L`` with unit edges."""
    if d < 1 or L < 1:
        raise ValueError("a spider needs at least one leg of positive length")
    edges = []
    for j in range(d):
        prev = 0
        for t in range(1, L + 1):
            p = 1 + j * L + t - 1
            edges.append((prev, p, 1.0))
            prev = p
    return WeightedSpace.from_edges(1 + d * L, edges)


def leg_points(L: int, j: int) -> list[int]:
    return [0] + [1 + j * L + t for t in range(L)]


def path_space(L: int) -> WeightedSpace:
    return WeightedSpace.from_edges(L + 1, [(t, t + 1, 1.0) for t in range(L)])


def _leg_assignment(gamma: Graph, lc: bool) -> list[dict[int, int]]:
    """``legs[v][e]`` for every incident edge index ``e``."""
    eidx = {e: i for i, e in enumerate(gamma.edges)}
    inc: list[list[int]] = [[] for _ in range(gamma.n)]
    for i, (u, v) in enumerate(gamma.edges):
        inc[u].append(i)
        inc[v].append(i)
    legs = [{e: j for j, e in enumerate(sorted(inc[v]))} for v in range(gamma.n)]
    if not lc:
        return legs
    grp = automorphism_group(gamma, cap=max(gamma.n, 1))
    if not is_vertex_free(gamma, grp):
        raise ValueError("an orbit-consistent leg assignment needs a vertex-free graph")
    out: list[dict[int, int] | None] = [None] * gamma.n
    elems = grp.elements()
    labels = grp.vertex_orbits()
    # the smallest vertex of each orbit is its representative
    reps = {}
    for v in range(gamma.n):
        reps.setdefault(int(labels[v]), v)
    for r in reps.values():
        for g in elems:
            v = int(g[r])
            asg = {}
            for e, j in legs[r].items():
                a, b = gamma.edges[e]
                asg[eidx[tuple(sorted((int(g[a]), int(g[b]))))]] = j
            out[v] = asg
    return out  # type: ignore[return-value]


def build_spider_gos(
    gamma: Graph,
    d: int,
    L: int,
    *,
    lc: bool = False,
    allow_irregular: bool = False,
) -> GraphOfSpaces:
    """Spider at every vertex, a length-``L`` path on every edge glued along one leg at each end.

    Edges are oriented from the smaller to the larger vertex.  Legs are
    assigned by sorted incident edge; with ``lc=True`` the assignment at a
    representative of each vertex orbit is transported along the (free)
    automorphism group so that automorphisms respect legs.  With
    ``allow_irregular`` vertices of degree below ``d`` keep free legs.
    """
    degs = gamma.degrees
    if allow_irregular:
        if max(degs, default=0) > d:
            raise ValueError(f"a vertex has degree above the leg count {d}")
    elif any(k != d for k in degs):
        raise ValueError(f"gamma is not {d}-regular")
    legs = _leg_assignment(gamma, lc)
    sp = spider_space(d, L)
    y = path_space(L)
    ah, at = [], []
    for i, (u, v) in enumerate(gamma.edges):
        at.append(tuple(leg_points(L, legs[u][i])))
        ah.append(tuple(leg_points(L, legs[v][i])))
    return GraphOfSpaces(
        gamma,
        tuple(gamma.edges),
        tuple(sp for _ in range(gamma.n)),
        tuple(y for _ in range(gamma.m)),
        tuple(ah),
        tuple(at),
        tuple(0 for _ in range(gamma.m)),
    )


def _distance_encoding(space: WeightedSpace, rays: list) -> tuple[Graph, list]:
    dm = all_pairs(space)
    n = space.n
    iu, ju = np.triu_indices(n, 1)
    vals = np.round(dm[iu, ju] / TOL).astype(np.int64)
    _, cls = np.unique(vals, return_inverse=True)
    colors: list = []
    for p in range(n):
        colors.append(("point", tuple(k for k, r in enumerate(rays) if p in r)))
    edges = []
    for k, (a, b) in enumerate(zip(iu.tolist(), ju.tolist())):
        x = n + k
        edges += [(a, x), (b, x)]
        colors.append(("pair", int(cls[k])))
    return Graph.from_edges(n + len(iu), edges), colors


def link_rigidity_order(space: WeightedSpace, rays) -> int:
    """Number of isometries of ``space`` mapping every ray onto itself."""
    if space.n > LINK_RIGIDITY_CAP:
        raise ValueError(f"space has {space.n} points, above the enumeration cap {LINK_RIGIDITY_CAP}")
    rays = [frozenset(int(p) for p in r) for r in rays]
    for r in rays:
        if any(not 0 <= p < space.n for p in r):
            raise ValueError("ray contains a point outside the space")
    g, colors = _distance_encoding(space, rays)
    return automorphism_group(g, colors, cap=max(g.n, 1)).order


def link_rigidity_check(space: WeightedSpace, rays) -> bool:
    """True iff the only isometry preserving every ray setwise is the identity."""
    return link_rigidity_order(space, rays) == 1
