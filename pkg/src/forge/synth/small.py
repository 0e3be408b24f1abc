"""Cubic bases for groups of order 1, 2 and 3, which have no cubic Cayley graph."""

from __future__ import annotations

import numpy as np

from ..aut import automorphism_group, is_edge_free, is_vertex_free
from ..graph import Graph
from .assembly import Assembly, Built
from .blocks import frucht_graph
from .regularize import random_degree_sequence_graph
from .tags import GateError, hang_tag, reserve_words

__all__ = ["small_group_base", "DEFAULT_BUDGET"]

DEFAULT_BUDGET = 100_000
_BASE_SIZES = (8, 10, 12)


def _tag_spec(seed: int, design: str):
    res = reserve_words([("base", False)], seed, design)
    return res.spec("base", "A"), res


def _frucht_base(seed: int, design: str) -> Built:
    spec, res = _tag_spec(seed, design)
    f = frucht_graph()
    asm = Assembly()
    for v in range(f.n):
        asm.vertex(("frucht", v))
    (x, y), rest = f.edges[0], f.edges[1:]
    s = asm.vertex(("subdivision", x, y))
    for u, v in rest:
        asm.edge(u, v)
    asm.edge(x, s)
    asm.edge(s, y)
    hang_tag(asm, s, spec, "t0")
    return asm.build(reservation=res.to_json(), baseEdges=[list(e) for e in f.edges])


def _lift(base: Graph, m: int, volt: np.ndarray, spec, res) -> Built:
    """``Z_m`` voltage lift; the lifts of base edge 0 are subdivided and tagged."""
    asm = Assembly()
    for v in range(base.n):
        for i in range(m):
            asm.vertex(("lift", v, i))
    for j, (u, v) in enumerate(base.edges):
        for i in range(m):
            a, b = u * m + i, v * m + (i + int(volt[j])) % m
            if j == 0:
                s = asm.vertex(("subdivision", i))
                asm.edge(a, s)
                asm.edge(s, b)
                hang_tag(asm, s, spec, f"t{i}")
            else:
                asm.edge(a, b)
    return asm.build(reservation=res.to_json(), baseEdges=[list(e) for e in base.edges], voltages=volt.tolist())


def small_group_base(order: int, seed: int = 0, *, budget: int = DEFAULT_BUDGET, design: str = "ref") -> Built:
    """A connected cubic graph with ``|Aut| = order`` acting freely on vertices and edges.

    Order 1 is the Frucht graph with one edge subdivided and a tag hung on
    the new vertex.  Orders 2 and 3 come from a seeded search over random
    voltage lifts of small random cubic graphs; each candidate is certified
    and the first that passes is returned.
    """
    if order not in (1, 2, 3):
        raise ValueError("small_group_base handles orders 1, 2 and 3")
    if order == 1:
        built = _frucht_base(seed, design)
        grp = automorphism_group(built.graph)
        if grp.order != 1:
            raise GateError("Frucht base is not rigid", {"order": grp.order})
        built.meta["candidates"] = 1
        return built
    spec, res = _tag_spec(seed, design)
    rng = np.random.default_rng([order, seed])
    for cand in range(1, budget + 1):
        nb = _BASE_SIZES[cand % len(_BASE_SIZES)]
        base = random_degree_sequence_graph([3] * nb, rng, attempts=10)
        if base is None or not base.is_connected():
            continue
        volt = rng.integers(0, order, size=base.m)
        built = _lift(base, order, volt, spec, res)
        g = built.graph
        if not g.is_connected():
            continue
        grp = automorphism_group(g)
        if grp.order != order or not is_vertex_free(g, grp) or not is_edge_free(g, grp):
            continue
        built.meta["candidates"] = cand
        return built
    raise GateError(f"no cubic base with |Aut| = {order} in {budget} candidates", {"budget": budget})
