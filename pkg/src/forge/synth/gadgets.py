"""Edge gadgets and the blow-up of a labelled cubic graph."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..aut import automorphism_group, graphs_isomorphic, is_vertex_free, label_preserving_automorphisms
from ..graph import Graph, LabelledGraph
from .assembly import Assembly, Built
from .tags import DIRECTED_ROLES, UNDIRECTED_ROLES, WordReservation, hang_tag

__all__ = [
    "Fragment",
    "gadget_directed",
    "gadget_undirected",
    "certify_gadget",
    "blow_up_labelled",
]


@dataclass(frozen=True)
class Fragment:
    """A gadget with two ports of degree 2 (``a`` joins ``u``, ``b`` joins ``v``)."""

    graph: Graph
    ports: tuple[int, int]
    label: str
    directed: bool


def _place_directed(asm: Assembly, token: str, res: WordReservation, name: str) -> tuple[int, int]:
    specs = [res.spec(token, r) for r in DIRECTED_ROLES]
    region = (name,)
    a = asm.vertex(("gadget", name, "a"), region)
    m = asm.vertex(("gadget", name, "m"), region)
    b = asm.vertex(("gadget", name, "b"), region)
    asm.edge(a, m)
    asm.edge(m, b)
    for host, role, spec in zip((a, m, b), DIRECTED_ROLES, specs):
        hang_tag(asm, host, spec, f"{name}/{role}")
        asm.add_region(name, asm.regions[f"{name}/{role}"])
    return a, b


def _place_undirected(asm: Assembly, token: str, res: WordReservation, name: str) -> tuple[int, int]:
    ta, tb = (res.spec(token, r) for r in UNDIRECTED_ROLES)
    region = (name,)
    a, p1, p2, b, q2, q1 = (asm.vertex(("gadget", name, s), region) for s in ("a", "p1", "p2", "b", "q2", "q1"))
    for x, y in ((a, p1), (p1, p2), (p2, b), (b, q2), (q2, q1), (q1, a)):
        asm.edge(x, y)
    for host, spec, tag in ((p1, ta, "A1"), (q2, ta, "A2"), (p2, tb, "B1"), (q1, tb, "B2")):
        hang_tag(asm, host, spec, f"{name}/{tag}")
        asm.add_region(name, asm.regions[f"{name}/{tag}"])
    return a, b


def gadget_directed(label: str, res: WordReservation) -> Fragment:
    """Path ``a - m - b`` carrying the SRC, MID and TGT tags of ``label``."""
    asm = Assembly()
    ports = _place_directed(asm, label, res, "g")
    return Fragment(asm.build().graph, ports, label, True)


def gadget_undirected(label: str, res: WordReservation) -> Fragment:
    """Six-cycle ``a, p1, p2, b, q2, q1``; tag A on p1 and q2, tag B on p2 and q1."""
    asm = Assembly()
    ports = _place_undirected(asm, label, res, "g")
    return Fragment(asm.build().graph, ports, label, False)


def certify_gadget(frag: Fragment) -> dict:
    """Automorphisms of a fragment with its ports pinned, and with them as a pair.

    Directed gadgets must be rigid in both senses.  Undirected gadgets must
    have exactly one non-trivial symmetry, swapping the ports, moving every
    vertex and inverting no edge.
    """
    g = frag.graph
    a, b = frag.ports
    pinned = ["inner"] * g.n
    pinned[a], pinned[b] = "a", "b"
    paired = ["inner"] * g.n
    paired[a] = paired[b] = "port"
    swapped = list(pinned)
    swapped[a], swapped[b] = "b", "a"
    rep = {
        "label": frag.label,
        "directed": frag.directed,
        "n": g.n,
        "pinnedOrder": automorphism_group(g, pinned).order,
    }
    grp = automorphism_group(g, paired)
    rep["pairedOrder"] = grp.order
    rep["portSwap"] = graphs_isomorphic(g, g, pinned, swapped)[0]
    if frag.directed:
        ok = rep["pinnedOrder"] == 1 and rep["pairedOrder"] == 1 and not rep["portSwap"]
    else:
        ok = rep["pinnedOrder"] == 1 and rep["pairedOrder"] == 2 and rep["portSwap"]
        if grp.order == 2:
            tau = grp.generators[0]
            rep["fixedPoints"] = int(np.sum(tau == np.arange(g.n)))
            e = g.edge_array
            rep["invertedEdges"] = int(np.sum((tau[e[:, 0]] == e[:, 1]) & (tau[e[:, 1]] == e[:, 0])))
            ok = ok and rep["fixedPoints"] == 0 and rep["invertedEdges"] == 0
    rep["passed"] = bool(ok)
    return rep


def blow_up_labelled(
    lg: LabelledGraph, res: WordReservation, *, check: bool = True, require_cubic: bool = True
) -> Built:
    """Replace every labelled edge by its gadget.

    ``require_cubic=False`` admits labelled graphs of other valences; the
    output is then cubic except at the original vertices.  Vertices ``0..n-1`` are the original vertices; gadgets follow in edge
    order, each with its tags.  Regions are named ``e{i}`` per gadget and
    ``e{i}/ROLE`` per tag.
    """
    g = lg.base
    if require_cubic and not g.is_regular(3):
        raise ValueError("blow-up needs a 3-regular labelled graph")
    if not g.is_connected():
        raise ValueError("blow-up needs a connected labelled graph")
    lm = lg.label_map
    for e in g.edges:
        if e not in lm:
            raise ValueError(f"edge {e} carries no label")
    tokens = {(lab.label, lab.direction is not None) for lab in lm.values()}
    table = res.table
    for tok, directed in sorted(tokens):
        roles = DIRECTED_ROLES if directed else UNDIRECTED_ROLES
        for r in roles:
            if (tok, r) not in table:
                raise ValueError(f"no word reserved for label {tok!r} role {r}")
    if check:
        grp = label_preserving_automorphisms(lg)
        if not is_vertex_free(g, grp):
            raise ValueError("labelled graph is not vertex-free")
    asm = Assembly()
    for v in range(g.n):
        asm.vertex(("base", v))
    for i, e in enumerate(g.edges):
        lab = lm[e]
        name = f"e{i}"
        if lab.direction is not None:
            u, v = lab.direction
            a, b = _place_directed(asm, lab.label, res, name)
        else:
            u, v = e
            a, b = _place_undirected(asm, lab.label, res, name)
        asm.edge(u, a)
        asm.edge(b, v)
    return asm.build(labelled_n=g.n)
