"""Finite metric spaces: shortest-path metrics, Gromov products, hyperbolicity.

Distances are float64 and compared with an absolute tolerance of ``TOL``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .graph import Graph

__all__ = [
    "TOL",
    "MetricError",
    "WeightedSpace",
    "all_pairs",
    "check_metric",
    "gromov_product",
    "set_gromov_product",
    "DeltaReport",
    "four_point_delta",
    "four_point_delta_points",
    "ThinReport",
    "thin_triangle_delta",
    "coarse_components",
    "SeparationReport",
    "coarse_separation_profile",
    "EXHAUSTIVE_CAP",
]

TOL = 1e-9
EXHAUSTIVE_CAP = 120


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class WeightedSpace:
    n: int
    wedges: tuple[tuple[int, int, float], ...] = ()

    def __post_init__(self) -> None:
        for u, v, w in self.wedges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise MetricError(f"edge ({u},{v}) out of range")
            if not w > 0:
                raise MetricError(f"edge ({u},{v}) has non-positive weight {w}")

    @classmethod
    def from_graph(cls, g: Graph, weight: float = 1.0) -> "WeightedSpace":
        return cls(g.n, tuple((u, v, float(weight)) for u, v in g.edges))

    @classmethod
    def from_edges(cls, n: int, wedges: Iterable[Sequence[float]]) -> "WeightedSpace":
        return cls(n, tuple((int(u), int(v), float(w)) for u, v, w in wedges))

    def sparse(self):
        if not self.wedges:
            return coo_matrix((self.n, self.n)).tocsr()
        u, v, w = (np.asarray(c) for c in zip(*self.wedges))
        # keep the lightest of parallel edges
        mat = {}
        for a, b, c in zip(u.tolist(), v.tolist(), w.tolist()):
            if a == b:
                continue
            key = (min(a, b), max(a, b))
            if key not in mat or c < mat[key]:
                mat[key] = c
        rows = [k[0] for k in mat] + [k[1] for k in mat]
        cols = [k[1] for k in mat] + [k[0] for k in mat]
        vals = list(mat.values()) * 2
        return coo_matrix((vals, (rows, cols)), shape=(self.n, self.n)).tocsr()

    def to_json(self) -> dict:
        return {"n": self.n, "wedges": [[u, v, w] for u, v, w in self.wedges]}

    @classmethod
    def from_json(cls, data: dict) -> "WeightedSpace":
        return cls.from_edges(int(data["n"]), data.get("wedges", []))


def all_pairs(ws: WeightedSpace | Graph) -> np.ndarray:
    """Exact shortest-path metric (Dijkstra); error when disconnected."""
    if isinstance(ws, Graph):
        ws = WeightedSpace.from_graph(ws)
    if ws.n == 0:
        return np.zeros((0, 0))
    mat = ws.sparse()
    ncomp, _ = connected_components(mat, directed=False)
    if ncomp > 1:
        raise MetricError("space is disconnected")
    return shortest_path(mat, method="D", directed=False)


def check_metric(dm: np.ndarray, tol: float = TOL) -> list[str]:
    """Violations of the metric axioms, checked on all triples."""
    out = []
    if not np.allclose(dm, dm.T, atol=tol):
        out.append("not symmetric")
    if np.any(np.abs(np.diag(dm)) > tol):
        out.append("nonzero diagonal")
    if np.any(dm < -tol):
        out.append("negative distance")
    n = len(dm)
    for z in range(n):
        if np.any(dm > dm[:, z][:, None] + dm[z][None, :] + tol):
            out.append(f"triangle inequality fails through {z}")
            break
    return out


def gromov_product(dm: np.ndarray, x: int, y: int, z: int) -> float:
    """``<x, y>_z``."""
    return float(dm[x, z] + dm[y, z] - dm[x, y]) / 2.0


def set_gromov_product(dm: np.ndarray, a: Iterable[int], b: Iterable[int], z: int) -> float:
    """Maximum of ``<x, y>_z`` over ``x`` in ``a`` and ``y`` in ``b``."""
    a = np.fromiter(a, dtype=np.int64)
    b = np.fromiter(b, dtype=np.int64)
    if len(a) == 0 or len(b) == 0:
        raise MetricError("empty point set")
    vals = (dm[a, z][:, None] + dm[b, z][None, :] - dm[np.ix_(a, b)]) / 2.0
    return float(vals.max())


# -- four-point hyperbolicity ---------------------------------------------------


@dataclass
class DeltaReport:
    value: float
    exhaustive: bool
    seed: int | None
    quadruples: int
    witness: tuple[int, int, int, int] | None = None

    def to_json(self) -> dict:
        return {
            "delta": self.value,
            "exhaustive": self.exhaustive,
            "seed": self.seed,
            "quadruples": self.quadruples,
            "witness": list(self.witness) if self.witness else None,
        }


def _quad_delta(s1: np.ndarray, s2: np.ndarray, s3: np.ndarray) -> np.ndarray:
    # (largest pair sum - second largest) / 4
    st = np.sort(np.stack([s1, s2, s3]), axis=0)
    return (st[2] - st[1]) / 4.0


def four_point_delta(
    dm: np.ndarray,
    sample_size: int | None = None,
    seed: int = 0,
    exhaustive_cap: int = EXHAUSTIVE_CAP,
) -> DeltaReport:
    """Four-point hyperbolicity constant.

    The value per quadruple is ``(min(<x,y>_w, <y,z>_w) - <x,z>_w) / 2``
    maximised over orderings, i.e. a quarter of the gap between the two
    largest of the three pair sums.  The 4-cycle gives 1/2.
    """
    dm = np.asarray(dm, dtype=float)
    n = len(dm)
    if n < 4:
        return DeltaReport(0.0, True, None, 0)
    if n <= exhaustive_cap and sample_size is None:
        best, wit, count = -1.0, None, 0
        for x in range(n - 3):
            for y in range(x + 1, n - 2):
                rest = np.arange(y + 1, n)
                zi, wi = np.triu_indices(len(rest), 1)
                z, w = rest[zi], rest[wi]
                s1 = dm[x, y] + dm[z, w]
                s2 = dm[x, z] + dm[y, w]
                s3 = dm[x, w] + dm[y, z]
                vals = _quad_delta(s1, s2, s3)
                count += len(vals)
                k = int(np.argmax(vals))
                if vals[k] > best:
                    best, wit = float(vals[k]), (x, y, int(z[k]), int(w[k]))
        return DeltaReport(max(best, 0.0), True, None, count, wit)
    size = int(sample_size or 100000)
    rng = np.random.default_rng(seed)
    best, wit = 0.0, None
    done = 0
    while done < size:
        b = min(size - done, 200000)
        q = rng.integers(0, n, size=(b, 4))
        x, y, z, w = q.T
        vals = _quad_delta(dm[x, y] + dm[z, w], dm[x, z] + dm[y, w], dm[x, w] + dm[y, z])
        k = int(np.argmax(vals))
        if vals[k] > best:
            best, wit = float(vals[k]), tuple(int(t) for t in q[k])
        done += b
    return DeltaReport(best, False, seed, size, wit)


def four_point_delta_points(dm: np.ndarray, pts: Sequence[int]) -> DeltaReport:
    """Exhaustive four-point constant restricted to ``pts``."""
    pts = np.asarray(pts, dtype=np.int64)
    return four_point_delta(dm[np.ix_(pts, pts)], exhaustive_cap=max(len(pts), 4))


# -- thin triangles ---------------------------------------------------------------


@dataclass
class ThinReport:
    value: float
    exact: bool
    triples: int
    geodesic_cap: int
    witness: tuple[int, int, int] | None = None
    note: str = "geodesics are shortest vertex paths; fibres sampled at vertex breakpoints"

    def to_json(self) -> dict:
        return {
            "delta": self.value,
            "exact": self.exact,
            "lowerBoundOnly": not self.exact,
            "triples": self.triples,
            "geodesicCap": self.geodesic_cap,
            "witness": list(self.witness) if self.witness else None,
            "note": self.note,
        }


def _geodesics(adj: list[list[tuple[int, float]]], dm: np.ndarray, s: int, t: int, cap: int):
    """Up to ``cap`` shortest vertex paths from s to t; flag whether truncated."""
    out: list[list[int]] = []
    truncated = False

    def walk(path: list[int]) -> None:
        nonlocal truncated
        if len(out) >= cap:
            truncated = True
            return
        u = path[-1]
        if u == t:
            out.append(list(path))
            return
        for v, w in adj[u]:
            if abs(dm[s, u] + w + dm[v, t] - dm[s, t]) <= TOL and abs(dm[s, v] - dm[s, u] - w) <= TOL:
                path.append(v)
                walk(path)
                path.pop()
                if truncated:
                    return

    walk([s])
    return out, truncated


def _point_at(path: list[int], cum: np.ndarray, t: float) -> tuple[int, int, float, float]:
    """Point at arclength t: (a, b, offset from a, edge length)."""
    k = int(np.searchsorted(cum, t + TOL, side="right")) - 1
    k = min(max(k, 0), len(path) - 1)
    if k == len(path) - 1 or abs(cum[k] - t) <= TOL:
        return path[k], path[k], 0.0, 0.0
    return path[k], path[k + 1], float(t - cum[k]), float(cum[k + 1] - cum[k])


def _pt_dist(dm: np.ndarray, p, q) -> float:
    a, b, s, w = p
    c, e, r, x = q
    ends_p = [(a, s)] if a == b else [(a, s), (b, w - s)]
    ends_q = [(c, r)] if c == e else [(c, r), (e, x - r)]
    best = min(dp + dm[u, v] + dq for u, dp in ends_p for v, dq in ends_q)
    if a != b and (a, b) == (c, e):
        best = min(best, abs(s - r))
    elif a != b and (a, b) == (e, c):
        best = min(best, abs(s - (x - r)))
    return float(best)


def thin_triangle_delta(ws: WeightedSpace | Graph, geodesic_cap: int = 64) -> ThinReport:
    """Largest tripod-fibre diameter over vertex triples and enumerated geodesics."""
    if isinstance(ws, Graph):
        ws = WeightedSpace.from_graph(ws)
    dm = all_pairs(ws)
    n = ws.n
    adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for u, v, w in ws.wedges:
        adj[u].append((v, w))
        adj[v].append((u, w))
    geo: dict[tuple[int, int], list[list[int]]] = {}
    exact = True
    for s in range(n):
        for t in range(n):
            paths, trunc = _geodesics(adj, dm, s, t, geodesic_cap)
            exact &= not trunc
            geo[(s, t)] = paths

    def cumlen(path: list[int]) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum([dm[a, b] for a, b in zip(path, path[1:])])])

    cum = {k: [cumlen(p) for p in v] for k, v in geo.items()}
    best, wit, triples = 0.0, None, 0
    for x in range(n):
        for y in range(n):
            for z in range(y + 1, n):
                if x in (y, z):
                    continue
                triples += 1
                gp = gromov_product(dm, y, z, x)
                for p1, c1 in zip(geo[(x, y)], cum[(x, y)]):
                    for p2, c2 in zip(geo[(x, z)], cum[(x, z)]):
                        ts = np.unique(np.concatenate([c1[c1 <= gp + TOL], c2[c2 <= gp + TOL], [gp]]))
                        for t in ts:
                            d = _pt_dist(dm, _point_at(p1, c1, t), _point_at(p2, c2, t))
                            if d > best + TOL:
                                best, wit = d, (x, y, z)
    return ThinReport(best, exact, triples, geodesic_cap, wit)


# -- coarse connectivity ------------------------------------------------------------


def coarse_components(dm: np.ndarray, pts: Sequence[int], kappa: float) -> list[list[int]]:
    """Classes of ``pts`` joined by chains with steps at most ``kappa``."""
    if kappa <= 0:
        raise MetricError("kappa must be positive")
    pts = np.asarray(sorted(set(int(p) for p in pts)), dtype=np.int64)
    if len(pts) == 0:
        return []
    sub = dm[np.ix_(pts, pts)] <= kappa + TOL
    _, labels = connected_components(coo_matrix(sub.astype(np.int8)), directed=False)
    groups: dict[int, list[int]] = {}
    for p, lab in zip(pts.tolist(), labels.tolist()):
        groups.setdefault(lab, []).append(p)
    return sorted(groups.values(), key=lambda c: c[0])


@dataclass
class SeparationReport:
    components: list[list[int]]
    deep: list[bool]
    depth: list[float]
    kappa: float
    K: float

    @property
    def deep_count(self) -> int:
        return sum(self.deep)

    def to_json(self) -> dict:
        return {
            "kappa": self.kappa,
            "K": self.K,
            "deepCount": self.deep_count,
            "components": [
                {"points": c, "deep": d, "depth": h} for c, d, h in zip(self.components, self.deep, self.depth)
            ],
        }


def coarse_separation_profile(dm: np.ndarray, z: Sequence[int], kappa: float, K: float) -> SeparationReport:
    """Coarse components of the complement of the closed ``kappa``-ball around ``z``.

    A component is deep when it has a point farther than ``K`` from ``z``.
    """
    z = np.asarray(sorted(set(int(p) for p in z)), dtype=np.int64)
    if len(z) == 0:
        raise MetricError("Z must be nonempty")
    dz = dm[:, z].min(axis=1)
    rest = np.flatnonzero(dz > kappa + TOL)
    comps = coarse_components(dm, rest, kappa) if len(rest) else []
    depth = [float(dz[c].max()) for c in comps]
    deep = [h > K + TOL for h in depth]
    return SeparationReport(comps, deep, depth, float(kappa), float(K))
