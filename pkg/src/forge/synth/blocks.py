"""Hard-coded building blocks: the Frucht graph and the tag block designs.

Bit blocks have two ports of degree 2 (``in`` = 0, ``out`` = 1), every other
vertex has degree 3, and they are 2-connected with no non-trivial
automorphism fixing both ports.  Cap blocks have a single degree-2 port
(vertex 0).  The reference blocks were found by a seeded search and are
re-certified by :func:`forge.synth.tags.verify_block_design`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from ..graph import Graph

__all__ = ["frucht_graph", "BlockDesign", "DESIGNS", "get_design"]

_FRUCHT_LCF = [-5, -2, -4, 2, 5, -2, 2, 5, -2, -5, 4, 2]


@lru_cache(maxsize=None)
def frucht_graph() -> Graph:
    """The Frucht graph: cubic, 12 vertices, trivial automorphism group."""
    n = len(_FRUCHT_LCF)
    edges = [(i, (i + 1) % n) for i in range(n)]
    # each chord appears twice in LCF notation
    edges += [(i, (i + s) % n) for i, s in enumerate(_FRUCHT_LCF) if i < (i + s) % n]
    g = Graph.from_edges(n, edges)
    assert g.m == 18 and g.is_regular(3)
    return g


@dataclass(frozen=True)
class BlockDesign:
    name: str
    bit0: Graph
    bit1: Graph
    cap: Graph

    def bit(self, b: str) -> Graph:
        return self.bit0 if b == "0" else self.bit1


_BIT0 = Graph.from_edges(6, [(0, 2), (0, 4), (1, 3), (1, 4), (2, 3), (2, 5), (3, 5), (4, 5)])
_BIT1 = Graph.from_edges(
    8, [(0, 5), (0, 6), (1, 6), (1, 7), (2, 4), (2, 6), (2, 7), (3, 4), (3, 5), (3, 7), (4, 5)]
)
_CAP = Graph.from_edges(
    9,
    [(0, 6), (0, 8), (1, 2), (1, 4), (1, 6), (2, 3), (2, 4), (3, 5), (3, 7), (4, 7), (5, 6), (5, 8), (7, 8)],
)
# K4 minus an edge: the two inner vertices can be swapped with both ports fixed
_SYMMETRIC_BIT = Graph.from_edges(4, [(0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])

DESIGNS: dict[str, BlockDesign] = {
    "ref": BlockDesign("ref", _BIT0, _BIT1, _CAP),
    "symmetric": BlockDesign("symmetric", _SYMMETRIC_BIT, _SYMMETRIC_BIT, _CAP),
    "equal-bits": BlockDesign("equal-bits", _BIT0, _BIT0, _CAP),
}


def get_design(name: str) -> BlockDesign:
    try:
        return DESIGNS[name]
    except KeyError:
        raise ValueError(f"unregistered block design {name!r}") from None
