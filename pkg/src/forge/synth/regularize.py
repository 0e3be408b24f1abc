"""Valence changes: cubic paths for Cayley vertices, and the ``d``-regular blow-up."""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field

import numpy as np

from ..aut import automorphism_group, is_edge_free, is_vertex_free
from ..graph import Graph, LabelledGraph, cliques_of_size, complete_graph
from .tags import GateError

__all__ = [
    "three_regularize",
    "PendantError",
    "Pendant",
    "random_degree_sequence_graph",
    "asymmetric_pendant",
    "PGadget",
    "default_pendant_orders",
    "p_gadget",
    "d_regularize",
]


# -- cubic paths ------------------------------------------------------------------


def _slot_key(v: int, e: tuple[int, int], lab) -> tuple[str, str]:
    if lab.direction is None:
        return ("und", lab.label)
    return ("out" if lab.direction[0] == v else "in", lab.label)


def three_regularize(lg: LabelledGraph) -> LabelledGraph:
    """Replace each vertex of a ``k``-regular labelled graph by a path on ``k-2`` vertices.

    The ``k`` incident slots ``(kind, label)`` are sorted once, globally;
    the path ends take two slots each and internal vertices one.  Path
    edges are labelled ``"1" .. str(k-3)`` and oriented along the path.
    Vertex ``x`` becomes ``x*(k-2) .. x*(k-2)+k-3``.
    """
    g = lg.base
    degs = set(g.degrees)
    if len(degs) != 1:
        raise ValueError("labelled graph is not regular")
    k = degs.pop()
    if k < 3:
        raise ValueError(f"valence {k} < 3 cannot be made cubic")
    if k == 3:
        return lg
    lm = lg.label_map
    slots: list[dict[tuple[str, str], tuple[int, int]]] = [dict() for _ in range(g.n)]
    for e in g.edges:
        lab = lm.get(e)
        if lab is None:
            raise ValueError(f"edge {e} carries no label")
        for v in e:
            key = _slot_key(v, e, lab)
            if key in slots[v]:
                raise ValueError(f"vertex {v} has two {key} slots")
            slots[v][key] = e
    keys = sorted(slots[0])
    for v in range(g.n):
        if sorted(slots[v]) != keys:
            raise ValueError(f"vertex {v} has a different slot set")
    owner = {}
    for i, key in enumerate(keys):
        owner[key] = 0 if i < 2 else (k - 3 if i >= k - 2 else i - 1)
    width = k - 2
    recs = []
    for x in range(g.n):
        for i in range(width - 1):
            recs.append((x * width + i, x * width + i + 1, str(i + 1), True))
    for e in g.edges:
        lab = lm[e]
        u, v = e
        pu = u * width + owner[_slot_key(u, e, lab)]
        pv = v * width + owner[_slot_key(v, e, lab)]
        if lab.direction is None:
            recs.append((pu, pv, lab.label, False))
        else:
            t, _ = lab.direction
            recs.append((pu, pv, lab.label, True) if t == u else (pv, pu, lab.label, True))
    return LabelledGraph.build(g.n * width, recs)


# -- pendants -------------------------------------------------------------------


class PendantError(RuntimeError):
    def __init__(self, msg: str, stats: dict):
        super().__init__(f"{msg}: {stats}")
        self.stats = stats


def _pairing_attempt(degrees: list[int], rng: np.random.Generator) -> set[tuple[int, int]] | None:
    """One pass of stub pairing that re-pairs only the unsuitable stubs."""
    edges: set[tuple[int, int]] = set()
    stubs = [v for v, k in enumerate(degrees) for _ in range(k)]
    while stubs:
        potential: dict[int, int] = defaultdict(int)
        perm = rng.permutation(len(stubs))
        shuffled = [stubs[i] for i in perm]
        for s1, s2 in zip(shuffled[::2], shuffled[1::2]):
            if s1 > s2:
                s1, s2 = s2, s1
            if s1 != s2 and (s1, s2) not in edges:
                edges.add((s1, s2))
            else:
                potential[s1] += 1
                potential[s2] += 1
        if not potential:
            break
        nodes = sorted(potential)
        if not any(
            (a, b) not in edges for i, a in enumerate(nodes) for b in nodes[i + 1 :]
        ):
            return None
        stubs = [v for v in nodes for _ in range(potential[v])]
    return edges


def random_degree_sequence_graph(
    degrees: list[int], rng: np.random.Generator, attempts: int = 1000
) -> Graph | None:
    """Random simple graph with the given degrees, or None.

    Builds the complement instead when that is sparser.
    """
    n = len(degrees)
    if sum(degrees) % 2 or any(k < 0 or k >= n for k in degrees):
        raise ValueError("degree sequence is not graphical")
    comp = [n - 1 - k for k in degrees]
    use_comp = sum(comp) < sum(degrees)
    target = comp if use_comp else degrees
    for _ in range(attempts):
        edges = _pairing_attempt(target, rng)
        if edges is None:
            continue
        if use_comp:
            edges = {(u, v) for u in range(n) for v in range(u + 1, n)} - edges
        return Graph.from_edges(n, sorted(edges))
    return None


@dataclass(frozen=True)
class Pendant:
    graph: Graph
    root: int
    d: int
    stats: dict = field(default_factory=dict)


def asymmetric_pendant(
    d: int, m: int, rng: np.random.Generator | int = 0, retries: int = 1000
) -> Pendant:
    """Rigid connected graph on ``m`` vertices: root 0 of degree ``d-1``, rest ``d``.

    Each retry draws a fresh random graph with that degree profile and
    certifies it: connected, trivial automorphism group, no ``d``-clique.
    """
    if d < 3 or d % 2 == 0:
        raise ValueError("d must be odd and at least 3")
    if m % 2 == 0:
        raise ValueError("m must be odd")
    if m < d + 2:
        raise ValueError(f"m must be at least d+2 = {d + 2}")
    rng = np.random.default_rng(rng)
    degrees = [d - 1] + [d] * (m - 1)
    stats: Counter = Counter()
    for attempt in range(1, retries + 1):
        g = random_degree_sequence_graph(degrees, rng, attempts=1)
        if g is None:
            stats["pairingFailed"] += 1
            continue
        if not g.is_connected():
            stats["disconnected"] += 1
            continue
        if cliques_of_size(g, d):
            stats["hasClique"] += 1
            continue
        if automorphism_group(g).order != 1:
            stats["symmetric"] += 1
            continue
        stats["attempts"] = attempt
        return Pendant(g, 0, d, dict(stats))
    stats["attempts"] = retries
    raise PendantError(f"no rigid pendant with d={d}, m={m} in {retries} retries", dict(stats))


# -- the P gadget ---------------------------------------------------------------


@dataclass(frozen=True)
class PGadget:
    """``K_d`` core on ``0..d-1``; ``u1, u2, u3`` are ``0, 1, 2``."""

    graph: Graph
    d: int
    orders: tuple[int, ...]
    certificate: dict

    @property
    def us(self) -> tuple[int, int, int]:
        return (0, 1, 2)


def default_pendant_orders(d: int) -> tuple[int, ...]:
    return tuple(d + 4 + 2 * i for i in range(d - 3))


def p_gadget(d: int, orders: tuple[int, ...] | None = None, rng: np.random.Generator | int = 0) -> PGadget:
    """Core ``K_d`` with a rigid pendant of distinct order hung on each of ``d-3`` core vertices.

    The three remaining core vertices have degree ``d-1``.  Certified:
    ``|Aut| = 6``, the core is the only ``d``-clique, and only the three
    ``u`` vertices have degree ``d-1``.
    """
    if d < 5 or d % 2 == 0:
        raise ValueError("d must be odd and at least 5")
    orders = tuple(default_pendant_orders(d) if orders is None else orders)
    if len(orders) != d - 3:
        raise ValueError(f"need {d - 3} pendant orders, got {len(orders)}")
    if len(set(orders)) != len(orders):
        raise ValueError("pendant orders must be distinct")
    ss = np.random.SeedSequence(rng if isinstance(rng, int) else int(rng.integers(2**63)))
    edges = list(complete_graph(d).edges)
    n = d
    for i, (m, child) in enumerate(zip(orders, ss.spawn(len(orders)))):
        pend = asymmetric_pendant(d, m, np.random.default_rng(child))
        edges += [(u + n, v + n) for u, v in pend.graph.edges]
        edges.append((3 + i, n + pend.root))
        n += m
    g = Graph.from_edges(n, edges)
    grp = automorphism_group(g)
    cliques = cliques_of_size(g, d)
    low = [v for v, k in enumerate(g.degrees) if k == d - 1]
    cert = {
        "d": d,
        "n": g.n,
        "orders": list(orders),
        "autOrder": grp.order,
        "cliques": [list(c) for c in cliques],
        "lowDegree": low,
        "regularElsewhere": all(k == d for v, k in enumerate(g.degrees) if v not in low),
    }
    cert["passed"] = (
        grp.order == 6
        and cliques == [tuple(range(d))]
        and low == [0, 1, 2]
        and cert["regularElsewhere"]
    )
    if not cert["passed"]:
        raise GateError("P gadget failed certification", cert)
    return PGadget(g, d, orders, cert)


def d_regularize(
    g: Graph,
    d: int,
    rng: np.random.Generator | int = 0,
    *,
    gadget: PGadget | None = None,
    check: bool = True,
) -> Graph:
    """Replace every vertex of a cubic graph by a copy of the P gadget.

    ``u_i`` of the copy at ``v`` is joined across the ``i``-th edge at
    ``v`` in sorted edge order.  Vertex ``local`` of the copy at ``v`` is
    ``v * |P| + local``.
    """
    if not g.is_regular(3):
        raise ValueError("d-regularization needs a 3-regular graph")
    if not g.is_connected():
        raise ValueError("d-regularization needs a connected graph")
    if check:
        grp = automorphism_group(g, cap=max(g.n, 20000))
        if not is_vertex_free(g, grp):
            raise ValueError("graph is not vertex-free")
        if not is_edge_free(g, grp):
            raise ValueError("graph is not edge-free")
    p = gadget if gadget is not None else p_gadget(d, rng=rng)
    if p.d != d:
        raise ValueError("gadget built for a different d")
    size = p.graph.n
    pe = p.graph.edge_array
    blocks = [pe + v * size for v in range(g.n)]
    incident: list[list[tuple[int, int]]] = [[] for _ in range(g.n)]
    for e in g.edges:
        incident[e[0]].append(e)
        incident[e[1]].append(e)
    slot = {}
    for v in range(g.n):
        for i, e in enumerate(sorted(incident[v])):
            slot[(v, e)] = i
    cross = np.array(
        [(u * size + p.us[slot[(u, e)]], v * size + p.us[slot[(v, e)]]) for e in g.edges for u, v in [e]],
        dtype=np.int64,
    ).reshape(-1, 2)
    alle = np.vstack(blocks + [cross])
    return Graph.from_edges(g.n * size, alle.tolist())
