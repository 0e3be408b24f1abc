"""Measured counterparts of the uniform-hyperbolicity estimates."""

from __future__ import annotations

from itertools import combinations
from typing import Sequence

import numpy as np

from ..metric import TOL, coarse_separation_profile, four_point_delta, four_point_delta_points
from .model import GraphOfSpaces, paper_constants, uniformity_constants
from .network import Piece, RealizationNetwork, StringPath, realize_network

__all__ = [
    "embedded_graph_check",
    "vertex_embedding_distortion",
    "quasiconvexity_measure",
    "visited_vertex_sequence",
    "neighborhood_intersection_diameter",
    "realization_delta",
    "bottleneck_profile",
]


def _basepoint_nodes(gos: GraphOfSpaces) -> list[int]:
    return [gos.point_index(v, gos.vertex_basepoint(v)) for v in range(gos.n)]


def embedded_graph_check(gos: GraphOfSpaces, net: RealizationNetwork | None = None) -> dict:
    """Compare intrinsic distances between vertex basepoints with graph distances."""
    net = net or realize_network(gos)
    nodes = _basepoint_nodes(gos)
    dx = net.distances(nodes)[:, nodes]
    dg = gos.gamma.distance_matrix().astype(float)
    dev = np.abs(dx - dg)
    worst = np.unravel_index(int(np.argmax(dev)), dev.shape) if dev.size else None
    return {
        "pairs": gos.n * (gos.n - 1) // 2,
        "maxDeviation": float(dev.max()) if dev.size else 0.0,
        "worstPair": [int(worst[0]), int(worst[1])] if worst is not None and dev.max() > 0 else None,
        "passed": bool(dev.size == 0 or dev.max() <= TOL),
    }


def vertex_embedding_distortion(gos: GraphOfSpaces, v: int, net: RealizationNetwork | None = None) -> dict:
    """``max d_{X_v}(x, x') - d(x, x')`` over pairs of ``X_v``, with the predicted bound."""
    net = net or realize_network(gos)
    nodes = net.piece_nodes(("V", v))
    dx = net.distances(nodes)[:, nodes]
    gap = gos.vertex_metrics[v] - dx
    uni = uniformity_constants(gos)
    bound = paper_constants(uni.delta, uni.C)["k"]
    measured = float(max(gap.max(), 0.0)) if gap.size else 0.0
    return {
        "vertex": v,
        "measured": measured,
        "minGap": float(gap.min()) if gap.size else 0.0,
        "bound": bound,
        "delta": uni.delta,
        "C": uni.C,
        "passed": bool(measured <= bound + TOL and (gap.size == 0 or gap.min() >= -TOL)),
    }


def quasiconvexity_measure(
    gos: GraphOfSpaces,
    v: int,
    sample_pairs: int | None = None,
    seed: int = 0,
    net: RealizationNetwork | None = None,
) -> dict:
    """Largest distance from ``X_v`` of a point on a returned geodesic between points of ``X_v``."""
    net = net or realize_network(gos)
    nodes = net.piece_nodes(("V", v))
    pairs = list(combinations(nodes, 2))
    if sample_pairs is not None and len(pairs) > sample_pairs:
        rng = np.random.default_rng(seed)
        pick = rng.choice(len(pairs), size=sample_pairs, replace=False)
        pairs = [pairs[i] for i in sorted(pick)]
    to_set = net.distance_to_set(nodes)
    worst, wpair = 0.0, None
    for a, b in pairs:
        path = net.node_path(a, b)
        far = float(to_set[path].max())
        if far > worst + TOL:
            worst, wpair = far, (a, b)
    uni = uniformity_constants(gos)
    bound = paper_constants(uni.delta, uni.C)["sigma"]
    return {
        "vertex": v,
        "pairs": len(pairs),
        "sampled": sample_pairs is not None and len(pairs) == sample_pairs,
        "measured": worst,
        "witness": [net.nodes[i] for i in wpair] if wpair else None,
        "bound": bound,
        "passed": worst <= bound + TOL,
    }


def visited_vertex_sequence(gos: GraphOfSpaces, path: StringPath, eps: float = 0.0) -> dict:
    """Vertex spaces met in order, the defect against the graph distance, and basepoint proximity."""
    seq: list[int] = []
    for p in path.points:
        if p[0] == "v" and (not seq or seq[-1] != p[1]):
            seq.append(p[1])
    if not seq:
        raise ValueError("path meets no vertex space")
    dg = gos.gamma.bfs_distances(seq[0])[seq[-1]]
    prox = 0.0
    for p in path.points[1:-1]:
        if p[0] == "v":
            base = gos.vertex_basepoint(p[1])
            prox = max(prox, float(gos.vertex_metrics[p[1]][p[2], base]))
    uni = uniformity_constants(gos)
    pc = paper_constants(uni.delta, uni.C, eps)
    defect = len(seq) - dg
    return {
        "sequence": seq,
        "n": len(seq),
        "graphDistance": dg,
        "defect": defect,
        "defectBound": pc["defectBound"],
        "maxBasepointDistance": prox,
        "basepointBound": pc["basepointBound"],
        "eps": eps,
        "passed": defect <= pc["defectBound"] + TOL,
    }


def neighborhood_intersection_diameter(
    gos: GraphOfSpaces, a: Piece, b: Piece, r: float, grid_step: float | None = None
) -> dict:
    """Diameter of the nodes within ``r`` of both pieces."""
    if tuple(a) == tuple(b):
        raise ValueError("pieces must be distinct")
    net = realize_network(gos, grid_step=grid_step)
    da = net.distance_to_set(net.piece_nodes(tuple(a)))
    db = net.distance_to_set(net.piece_nodes(tuple(b)))
    inside = np.flatnonzero((da <= r + TOL) & (db <= r + TOL))
    diam = 0.0
    if len(inside) > 1:
        diam = float(net.distances(inside)[:, inside].max())
    return {"pieces": [list(a), list(b)], "r": r, "gridStep": grid_step, "size": int(len(inside)), "diameter": diam}


def realization_delta(
    gos: GraphOfSpaces, grid_step: float = 0.25, sample_size: int = 100_000, seed: int = 0
) -> dict:
    """Four-point delta of the realisation over vertex points and a cylinder grid.

    The reported value is at least the exhaustive value over the embedded
    copy of the graph (the vertex basepoints).
    """
    net = realize_network(gos, grid_step=grid_step)
    dm = net.distances()
    if np.isinf(dm).any():
        raise ValueError("realisation is disconnected")
    rep = four_point_delta(dm, sample_size=None if net.size <= 120 else sample_size, seed=seed)
    emb = four_point_delta_points(dm, _basepoint_nodes(gos))
    graph_delta = four_point_delta(gos.gamma.distance_matrix().astype(float)).value
    return {
        "gridStep": grid_step,
        "nodes": net.size,
        "quadruples": rep.quadruples,
        "exhaustive": rep.exhaustive,
        "seed": seed,
        "scanDelta": rep.value,
        "embeddedDelta": emb.value,
        "graphDelta": graph_delta,
        "delta": max(rep.value, emb.value),
    }


def bottleneck_profile(
    gos: GraphOfSpaces,
    v: int,
    kappas: Sequence[float] = (0.5, 1.0, 2.0),
    Ks: Sequence[float] = (0.0, 1.0, 2.0, 4.0, 8.0),
) -> dict:
    """Deep coarse components of ``X_v`` minus a neighbourhood of its link, over a ladder."""
    link = gos.link(v)
    dm = gos.vertex_metrics[v]
    rows = []
    if link:
        for kappa in kappas:
            for K in Ks:
                rep = coarse_separation_profile(dm, link, kappa, K)
                rows.append({"kappa": kappa, "K": K, "components": len(rep.components), "deep": rep.deep_count})
    return {"vertex": v, "link": link, "rows": rows, "note": "finite diagnostic; not a proof of bottlenecking"}
