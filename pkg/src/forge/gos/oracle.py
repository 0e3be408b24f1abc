"""Brute-force intrinsic distance: minimum length over all reduced strings.

Independent of :mod:`forge.gos.network`: piece metrics come from
Floyd-Warshall on the raw edge lists and the cylinder formula, and strings
are enumerated piece sequence by piece sequence.  For a fixed sequence the
best transfer points are found exactly by minimising over every choice.
"""

from __future__ import annotations

import math

import numpy as np

from ..metric import WeightedSpace
from .model import GraphOfSpaces

__all__ = ["floyd_warshall", "string_oracle"]


def floyd_warshall(ws: WeightedSpace) -> np.ndarray:
    d = np.full((ws.n, ws.n), np.inf)
    np.fill_diagonal(d, 0.0)
    for u, v, w in ws.wedges:
        if w < d[u, v]:
            d[u, v] = d[v, u] = w
    for k in range(ws.n):
        d = np.minimum(d, d[:, k : k + 1] + d[k : k + 1, :])
    return d


def string_oracle(gos: GraphOfSpaces, source: tuple[int, int], max_pieces: int = 7) -> dict[tuple[int, int], float]:
    """Distances from vertex point ``(v, i)`` to every vertex point.

    Strings alternate between vertex spaces and cylinders and use at most
    ``max_pieces`` pieces.
    """
    dx = [floyd_warshall(ws) for ws in gos.vertex_spaces]
    dy = [floyd_warshall(ws) for ws in gos.edge_spaces]

    # members of each piece, as vertex points with their cylinder coordinates
    def members(piece):
        if piece[0] == "V":
            v = piece[1]
            return [((v, i), None) for i in range(gos.vertex_spaces[v].n)]
        e = piece[1]
        tail, head = gos.orient[e]
        out = [((head, x), (y, 0.0)) for y, x in enumerate(gos.alpha_head[e])]
        out += [((tail, x), (y, 1.0)) for y, x in enumerate(gos.alpha_tail[e])]
        return out

    def dist(piece, a, b):
        if piece[0] == "V":
            return dx[piece[1]][a[0][1], b[0][1]]
        (y1, t1), (y2, t2) = a[1], b[1]
        return math.hypot(dy[piece[1]][y1, y2], t1 - t2)

    def neighbours(piece):
        if piece[0] == "V":
            return [("E", e) for e in gos.incident(piece[1])]
        tail, head = gos.orient[piece[1]]
        return [("V", head), ("V", tail)] if head != tail else [("V", head)]

    best: dict[tuple[int, int], float] = {source: 0.0}

    def walk(piece, entry: dict, depth: int) -> None:
        # entry: member -> cost of reaching that member of ``piece``
        mem = members(piece)
        reached: dict = {}
        for b in mem:
            c = min((cost + dist(piece, a, b) for a, cost in entry.items()), default=math.inf)
            if c < reached.get(b, math.inf):
                reached[b] = c
        for (pt, _), c in reached.items():
            if c < best.get(pt, math.inf):
                best[pt] = c
        if depth == max_pieces:
            return
        for nxt in neighbours(piece):
            nmem = members(nxt)
            nentry: dict = {}
            for b in nmem:
                for a, c in reached.items():
                    if a[0] == b[0] and c < nentry.get(b, math.inf):
                        nentry[b] = c
            if nentry:
                walk(nxt, nentry, depth + 1)

    v, i = source
    for piece in [("V", v)] + [("E", e) for e in gos.incident(v)]:
        entry = {m: 0.0 for m in members(piece) if m[0] == (v, i)}
        if entry:
            walk(piece, entry, 1)
    return best
