"""Graphs of finite metric spaces glued along isometrically embedded edge spaces.

Every edge ``e`` of ``gamma`` has an orientation ``(tail, head)``, an edge
space ``Y_e`` and two injections of its points: ``alpha_head[e]`` into the
head's vertex space and ``alpha_tail[e]`` into the tail's.  The cylinder
``Y_e x [0, 1]`` carries the l2 product metric; side 0 is glued to the
head, side 1 to the tail.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np

from ..graph import Graph
from ..metric import TOL, MetricError, WeightedSpace, all_pairs, four_point_delta, set_gromov_product

__all__ = [
    "GraphOfSpaces",
    "validate_gos",
    "UniformityReport",
    "uniformity_constants",
    "paper_constants",
]


@dataclass(frozen=True)
class GraphOfSpaces:
    gamma: Graph
    orient: tuple[tuple[int, int], ...]
    vertex_spaces: tuple[WeightedSpace, ...]
    edge_spaces: tuple[WeightedSpace, ...]
    alpha_head: tuple[tuple[int, ...], ...]
    alpha_tail: tuple[tuple[int, ...], ...]
    basepoints: tuple[int, ...]

    def __post_init__(self) -> None:
        m, n = self.gamma.m, self.gamma.n
        for name, seq, size in (
            ("orient", self.orient, m),
            ("vertex_spaces", self.vertex_spaces, n),
            ("edge_spaces", self.edge_spaces, m),
            ("alpha_head", self.alpha_head, m),
            ("alpha_tail", self.alpha_tail, m),
            ("basepoints", self.basepoints, m),
        ):
            if len(seq) != size:
                raise ValueError(f"{name} has {len(seq)} entries, expected {size}")
        for e, (t, h) in enumerate(self.orient):
            if (min(t, h), max(t, h)) != self.gamma.edges[e]:
                raise ValueError(f"orientation {t, h} does not match edge {self.gamma.edges[e]}")
            ny = self.edge_spaces[e].n
            if len(self.alpha_head[e]) != ny or len(self.alpha_tail[e]) != ny:
                raise ValueError(f"alpha maps of edge {e} do not cover its edge space")
            for v, amap in ((h, self.alpha_head[e]), (t, self.alpha_tail[e])):
                if any(not 0 <= x < self.vertex_spaces[v].n for x in amap):
                    raise ValueError(f"alpha image of edge {e} outside vertex space {v}")
            if not 0 <= self.basepoints[e] < ny:
                raise ValueError(f"basepoint of edge {e} outside its edge space")

    # -- derived data -------------------------------------------------------------

    @property
    def n(self) -> int:
        return self.gamma.n

    @cached_property
    def offsets(self) -> np.ndarray:
        """Global index of point 0 of each vertex space."""
        sizes = [ws.n for ws in self.vertex_spaces]
        return np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)

    @property
    def num_points(self) -> int:
        return int(self.offsets[-1])

    def point_index(self, v: int, i: int) -> int:
        return int(self.offsets[v] + i)

    def point_of(self, idx: int) -> tuple[str, int, int]:
        v = int(np.searchsorted(self.offsets, idx, side="right") - 1)
        return ("v", v, int(idx - self.offsets[v]))

    @cached_property
    def vertex_metrics(self) -> tuple[np.ndarray, ...]:
        return tuple(all_pairs(ws) if ws.n else np.zeros((0, 0)) for ws in self.vertex_spaces)

    @cached_property
    def edge_metrics(self) -> tuple[np.ndarray, ...]:
        return tuple(all_pairs(ws) for ws in self.edge_spaces)

    def incident(self, v: int) -> list[int]:
        return [e for e, (t, h) in enumerate(self.orient) if v in (t, h)]

    def alpha_at(self, e: int, v: int) -> tuple[int, ...]:
        t, h = self.orient[e]
        if v == h:
            return self.alpha_head[e]
        if v == t:
            return self.alpha_tail[e]
        raise ValueError(f"edge {e} is not incident to {v}")

    def vertex_basepoint(self, v: int) -> int:
        """Local index of ``y_v``: the image of the first incident edge's basepoint."""
        inc = self.incident(v)
        if not inc:
            return 0
        e = inc[0]
        return self.alpha_at(e, v)[self.basepoints[e]]

    def link(self, v: int) -> list[int]:
        """Union of the incident edge-space images in ``X_v``."""
        out: set[int] = set()
        for e in self.incident(v):
            out.update(self.alpha_at(e, v))
        return sorted(out)

    # -- serialisation ------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "gamma": {"n": self.gamma.n, "edges": [list(e) for e in self.gamma.edges], "orient": [list(o) for o in self.orient]},
            "vertexSpaces": {str(v): ws.to_json() for v, ws in enumerate(self.vertex_spaces)},
            "edgeSpaces": {str(e): ws.to_json() for e, ws in enumerate(self.edge_spaces)},
            "alpha": {
                str(e): {"tail": list(self.alpha_tail[e]), "head": list(self.alpha_head[e])}
                for e in range(self.gamma.m)
            },
            "basepoints": {str(e): b for e, b in enumerate(self.basepoints)},
        }

    @classmethod
    def from_json(cls, data: dict) -> "GraphOfSpaces":
        gd = data["gamma"]
        orient = [tuple(int(x) for x in o) for o in gd["orient"]]
        gamma = Graph.from_edges(int(gd["n"]), orient)
        # edges are indexed in sorted order; reorder the per-edge data to match
        key = {(min(t, h), max(t, h)): i for i, (t, h) in enumerate(orient)}
        order = [key[e] for e in gamma.edges]
        es = [WeightedSpace.from_json(data["edgeSpaces"][str(i)]) for i in order]
        ah = [tuple(int(x) for x in data["alpha"][str(i)]["head"]) for i in order]
        at = [tuple(int(x) for x in data["alpha"][str(i)]["tail"]) for i in order]
        bp = [int(data["basepoints"][str(i)]) for i in order]
        vs = [WeightedSpace.from_json(data["vertexSpaces"][str(v)]) for v in range(gamma.n)]
        return cls(gamma, tuple(orient[i] for i in order), tuple(vs), tuple(es), tuple(ah), tuple(at), tuple(bp))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def validate_gos(gos: GraphOfSpaces, coherence: bool = True) -> dict:
    """Check injectivity and isometry of every alpha map and basepoint coherence.

    Coherence is required at every vertex over all incident edges, whichever
    side of the edge the vertex is on.  ``coherence=False`` skips it, for
    instances that only need a well-defined intrinsic metric.
    """
    violations: list[str] = []
    vm = []
    for v, ws in enumerate(gos.vertex_spaces):
        try:
            vm.append(all_pairs(ws) if ws.n else np.zeros((0, 0)))
        except MetricError:
            violations.append(f"vertex space {v} is disconnected")
            vm.append(None)
        if ws.n == 0:
            violations.append(f"vertex space {v} is empty")
    for e, ws in enumerate(gos.edge_spaces):
        try:
            dy = all_pairs(ws)
        except MetricError:
            violations.append(f"edge space {e} is disconnected")
            continue
        t, h = gos.orient[e]
        for side, v, amap in (("head", h, gos.alpha_head[e]), ("tail", t, gos.alpha_tail[e])):
            if len(set(amap)) != len(amap):
                violations.append(f"alpha {side} of edge {e} is not injective")
            if vm[v] is None:
                continue
            a = np.asarray(amap, dtype=np.int64)
            dev = np.abs(vm[v][np.ix_(a, a)] - dy)
            if np.any(dev > TOL):
                violations.append(f"alpha {side} of edge {e} is not isometric (max deviation {float(dev.max()):.6g})")
    for v in range(gos.n if coherence else 0):
        imgs = {gos.alpha_at(e, v)[gos.basepoints[e]] for e in gos.incident(v)}
        if len(imgs) > 1:
            violations.append(f"incoherent basepoints at vertex {v}: images {sorted(imgs)}")
    return {"valid": not violations, "violations": violations}


@dataclass
class UniformityReport:
    deltas: list[float]
    delta: float
    C: float
    exhaustive: bool
    witness: tuple[int, int, int] | None = None  # (vertex, edge, edge)

    def to_json(self) -> dict:
        return {
            "deltas": self.deltas,
            "delta": self.delta,
            "C": self.C,
            "exhaustive": self.exhaustive,
            "witness": list(self.witness) if self.witness else None,
        }


def uniformity_constants(gos: GraphOfSpaces, sample_size: int | None = None, seed: int = 0) -> UniformityReport:
    """Per-vertex four-point delta and the largest Gromov product of two incident edge images."""
    deltas, exhaustive = [], True
    for dm in gos.vertex_metrics:
        rep = four_point_delta(dm, sample_size=sample_size, seed=seed)
        deltas.append(rep.value)
        exhaustive = exhaustive and rep.exhaustive
    c, wit = 0.0, None
    for v in range(gos.n):
        dm = gos.vertex_metrics[v]
        base = gos.vertex_basepoint(v)
        for e1, e2 in combinations(gos.incident(v), 2):
            val = set_gromov_product(dm, gos.alpha_at(e1, v), gos.alpha_at(e2, v), base)
            if val > c + TOL:
                c, wit = val, (v, e1, e2)
    return UniformityReport(deltas, max(deltas, default=0.0), c, exhaustive, wit)


def paper_constants(delta: float, C: float, eps: float = 0.0) -> dict:
    """Upper bounds predicted from measured ``delta`` and ``C``."""
    D = 4 * C + 4 * delta + 1
    K = 4 * C + 4 * delta + 4 * D + 5
    return {
        "delta": delta,
        "C": C,
        "eps": eps,
        "D": D,
        "K": K,
        "sigma": K + D + 1,
        "k": 2 * delta + 2 * C + 2,
        "defectBound": K + 5 * eps,
        "basepointBound": D + eps,
    }
