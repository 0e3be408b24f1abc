"""Exact intrinsic distances on the realisation via a weighted network.

Nodes are the points of the vertex spaces (a cylinder boundary point *is*
the vertex-space point it is glued to) plus optional interior cylinder
points.  Consecutive points of a string share a piece, and pieces meet
only along edge-space images, so shortest paths in this network realise
the infimum of string lengths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .model import GraphOfSpaces

__all__ = [
    "Point",
    "Piece",
    "normalize_point",
    "piece_distance",
    "pieces_containing",
    "StringPath",
    "RealizationNetwork",
    "realize_network",
    "gos_distance",
    "gos_geodesic",
]

Point = tuple  # ("v", v, i) or ("c", e, y, t) with 0 < t < 1
Piece = tuple  # ("V", v) or ("E", e)


def normalize_point(gos: GraphOfSpaces, p: Sequence) -> Point:
    kind = p[0]
    if kind == "v":
        v, i = int(p[1]), int(p[2])
        if not (0 <= v < gos.n and 0 <= i < gos.vertex_spaces[v].n):
            raise ValueError(f"no point {i} in vertex space {v}")
        return ("v", v, i)
    if kind == "c":
        e, y, t = int(p[1]), int(p[2]), float(p[3])
        if not (0 <= e < gos.gamma.m and 0 <= y < gos.edge_spaces[e].n) or not 0 <= t <= 1:
            raise ValueError(f"no cylinder point {tuple(p)}")
        tail, head = gos.orient[e]
        if t == 0:
            return ("v", head, gos.alpha_head[e][y])
        if t == 1:
            return ("v", tail, gos.alpha_tail[e][y])
        return ("c", e, y, t)
    raise ValueError(f"unknown point kind {kind!r}")


def _positions(gos: GraphOfSpaces, e: int, p: Point) -> list[tuple[int, float]]:
    """Coordinates ``(y, t)`` of ``p`` in the cylinder of ``e`` (empty if outside)."""
    if p[0] == "c":
        return [(p[2], p[3])] if p[1] == e else []
    tail, head = gos.orient[e]
    out = []
    if p[1] == head:
        out += [(y, 0.0) for y, x in enumerate(gos.alpha_head[e]) if x == p[2]]
    if p[1] == tail:
        out += [(y, 1.0) for y, x in enumerate(gos.alpha_tail[e]) if x == p[2]]
    return out


def pieces_containing(gos: GraphOfSpaces, p: Point) -> list[Piece]:
    if p[0] == "c":
        return [("E", p[1])]
    out: list[Piece] = [("V", p[1])]
    out += [("E", e) for e in gos.incident(p[1]) if _positions(gos, e, p)]
    return out


def piece_distance(gos: GraphOfSpaces, piece: Piece, p: Point, q: Point) -> float:
    """Distance inside one piece; ``inf`` if a point is not in it."""
    if piece[0] == "V":
        v = piece[1]
        if p[0] != "v" or q[0] != "v" or p[1] != v or q[1] != v:
            return math.inf
        return float(gos.vertex_metrics[v][p[2], q[2]])
    e = piece[1]
    dy = gos.edge_metrics[e]
    best = math.inf
    for y1, t1 in _positions(gos, e, p):
        for y2, t2 in _positions(gos, e, q):
            best = min(best, math.hypot(dy[y1, y2], t1 - t2))
    return best


@dataclass
class StringPath:
    points: list[Point]
    pieces: list[Piece]
    lengths: list[float] = field(default_factory=list)

    @property
    def length(self) -> float:
        return float(sum(self.lengths))

    def check(self, gos: GraphOfSpaces) -> list[str]:
        out = []
        if len(self.pieces) != len(self.points) - 1 or len(self.lengths) != len(self.pieces):
            return ["length mismatch between points, pieces and step lengths"]
        for k, (piece, a, b) in enumerate(zip(self.pieces, self.points, self.points[1:])):
            d = piece_distance(gos, piece, a, b)
            if math.isinf(d):
                out.append(f"step {k}: points not co-resident in {piece}")
            elif abs(d - self.lengths[k]) > 1e-9:
                out.append(f"step {k}: recorded length {self.lengths[k]} but piece distance {d}")
        for k in range(len(self.pieces) - 1):
            if self.pieces[k][0] == self.pieces[k + 1][0]:
                out.append(f"steps {k},{k + 1}: pieces do not alternate")
        return out

    def to_json(self) -> dict:
        return {
            "points": [list(p) for p in self.points],
            "pieces": [list(p) for p in self.pieces],
            "lengths": self.lengths,
            "length": self.length,
        }


class RealizationNetwork:
    def __init__(self, gos: GraphOfSpaces, extra: Iterable[Sequence] = ()):
        self.gos = gos
        self.nodes: list[Point] = [gos.point_of(i) for i in range(gos.num_points)]
        self.index: dict[Point, int] = {p: i for i, p in enumerate(self.nodes)}
        for p in extra:
            p = normalize_point(gos, p)
            if p not in self.index:
                self.index[p] = len(self.nodes)
                self.nodes.append(p)
        self.links: dict[tuple[int, int], tuple[float, Piece]] = {}
        off = gos.offsets
        for v, ws in enumerate(gos.vertex_spaces):
            for a, b, w in ws.wedges:
                self._link(int(off[v] + a), int(off[v] + b), w, ("V", v))
        interior: dict[int, list[int]] = {}
        for i, p in enumerate(self.nodes):
            if p[0] == "c":
                interior.setdefault(p[1], []).append(i)
        for e, (tail, head) in enumerate(gos.orient):
            dy = gos.edge_metrics[e]
            ny = len(dy)
            piece = ("E", e)
            side = [
                [int(off[head] + x) for x in gos.alpha_head[e]],
                [int(off[tail] + x) for x in gos.alpha_tail[e]],
            ]
            for y1 in range(ny):
                for y2 in range(ny):
                    self._link(side[0][y1], side[1][y2], math.hypot(dy[y1, y2], 1.0), piece)
                    if y1 < y2:
                        self._link(side[0][y1], side[0][y2], float(dy[y1, y2]), piece)
                        self._link(side[1][y1], side[1][y2], float(dy[y1, y2]), piece)
            pts = interior.get(e, [])
            for k, i in enumerate(pts):
                _, _, y, t = self.nodes[i]
                for y2 in range(ny):
                    self._link(i, side[0][y2], math.hypot(dy[y, y2], t), piece)
                    self._link(i, side[1][y2], math.hypot(dy[y, y2], 1.0 - t), piece)
                for j in pts[k + 1 :]:
                    _, _, y2, t2 = self.nodes[j]
                    self._link(i, j, math.hypot(dy[y, y2], t - t2), piece)
        keys = list(self.links)
        n = len(self.nodes)
        if keys:
            rows = np.array([k[0] for k in keys] + [k[1] for k in keys])
            cols = np.array([k[1] for k in keys] + [k[0] for k in keys])
            vals = np.array([self.links[k][0] for k in keys] * 2)
            self.matrix = coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
        else:
            self.matrix = coo_matrix((n, n)).tocsr()

    def _link(self, a: int, b: int, w: float, piece: Piece) -> None:
        if a == b:
            return
        key = (min(a, b), max(a, b))
        old = self.links.get(key)
        if old is None or w < old[0] - 1e-15:
            self.links[key] = (float(w), piece)

    @property
    def size(self) -> int:
        return len(self.nodes)

    def node(self, p: Sequence) -> int:
        q = normalize_point(self.gos, p)
        try:
            return self.index[q]
        except KeyError:
            raise ValueError(f"point {q} is not a node of this network") from None

    def distances(self, sources: Sequence[int] | None = None) -> np.ndarray:
        return dijkstra(self.matrix, directed=False, indices=sources)

    def distance_to_set(self, nodes: Sequence[int]) -> np.ndarray:
        return dijkstra(self.matrix, directed=False, indices=list(nodes), min_only=True)

    def piece_nodes(self, piece: Piece) -> list[int]:
        if piece[0] == "V":
            v = piece[1]
            return list(range(int(self.gos.offsets[v]), int(self.gos.offsets[v + 1])))
        e = piece[1]
        tail, head = self.gos.orient[e]
        off = self.gos.offsets
        out = {int(off[head] + x) for x in self.gos.alpha_head[e]}
        out |= {int(off[tail] + x) for x in self.gos.alpha_tail[e]}
        out |= {i for i, p in enumerate(self.nodes) if p[0] == "c" and p[1] == e}
        return sorted(out)

    def node_path(self, a: int, b: int) -> list[int]:
        dist, pred = dijkstra(self.matrix, directed=False, indices=a, return_predecessors=True)
        if math.isinf(dist[b]):
            raise ValueError("points lie in different components")
        path = [b]
        while path[-1] != a:
            path.append(int(pred[path[-1]]))
        return path[::-1]

    def string_of(self, path: Sequence[int]) -> StringPath:
        """Reduced string along a node path: merge runs in one piece, pad cylinder changes."""
        if len(path) == 1:
            return StringPath([self.nodes[path[0]]], [], [])
        steps: list[list] = []  # [start, end, piece]
        for a, b in zip(path, path[1:]):
            piece = self.links[(min(a, b), max(a, b))][1]
            if steps and steps[-1][2] == piece:
                steps[-1][1] = b
            else:
                steps.append([a, b, piece])
        points = [self.nodes[steps[0][0]]]
        pieces: list[Piece] = []
        lengths: list[float] = []
        for k, (a, b, piece) in enumerate(steps):
            if pieces and pieces[-1][0] == "E" and piece[0] == "E":
                v = self.nodes[a][1]
                pieces.append(("V", v))
                points.append(self.nodes[a])
                lengths.append(0.0)
            pieces.append(piece)
            points.append(self.nodes[b])
            lengths.append(piece_distance(self.gos, piece, self.nodes[a], self.nodes[b]))
        return StringPath(points, pieces, lengths)


def realize_network(
    gos: GraphOfSpaces, extra_points: Iterable[Sequence] = (), grid_step: float | None = None
) -> RealizationNetwork:
    """Network on all vertex-space points, ``extra_points`` and an optional cylinder grid."""
    extra = list(extra_points)
    if grid_step is not None:
        if not 0 < grid_step < 1:
            raise ValueError("grid step must lie in (0, 1)")
        ticks = []
        k = 1
        while k * grid_step < 1 - 1e-12:
            ticks.append(round(k * grid_step, 12))
            k += 1
        for e, ws in enumerate(gos.edge_spaces):
            extra += [("c", e, y, t) for y in range(ws.n) for t in ticks]
    return RealizationNetwork(gos, extra)


def gos_distance(gos: GraphOfSpaces, p: Sequence, q: Sequence, net: RealizationNetwork | None = None) -> float:
    net = net or realize_network(gos, [x for x in (p, q) if x[0] == "c"])
    a, b = net.node(p), net.node(q)
    return float(net.distances(a)[b])


def gos_geodesic(gos: GraphOfSpaces, p: Sequence, q: Sequence, net: RealizationNetwork | None = None) -> StringPath:
    net = net or realize_network(gos, [x for x in (p, q) if x[0] == "c"])
    return net.string_of(net.node_path(net.node(p), net.node(q)))
