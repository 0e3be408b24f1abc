"""Incremental graph assembly with per-vertex provenance and named regions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ..graph import Graph


@dataclass
class Built:
    """A constructed graph with provenance.

    ``provenance[v]`` says where vertex ``v`` came from; ``regions`` maps a
    region name (a tag or a gadget) to its vertex ids.
    """

    graph: Graph
    provenance: list[tuple] = field(default_factory=list)
    regions: dict[str, list[int]] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.graph.n


class Assembly:
    def __init__(self) -> None:
        self.provenance: list[tuple] = []
        self.edges: list[tuple[int, int]] = []
        self.regions: dict[str, list[int]] = {}

    @property
    def n(self) -> int:
        return len(self.provenance)

    def vertex(self, prov: tuple, regions: Sequence[str] = ()) -> int:
        v = len(self.provenance)
        self.provenance.append(prov)
        for r in regions:
            self.regions.setdefault(r, []).append(v)
        return v

    def edge(self, u: int, v: int) -> None:
        self.edges.append((u, v))

    def embed(
        self,
        g: Graph,
        prov: tuple,
        regions: Sequence[str] = (),
        identify: dict[int, int] | None = None,
    ) -> list[int]:
        """Copy ``g`` in; vertices in ``identify`` are glued onto existing ones."""
        identify = identify or {}
        ids = []
        for x in range(g.n):
            if x in identify:
                ids.append(identify[x])
            else:
                ids.append(self.vertex(prov + (x,), regions))
        for u, v in g.edges:
            self.edge(ids[u], ids[v])
        return ids

    def add_region(self, name: str, verts: Iterable[int]) -> None:
        self.regions.setdefault(name, []).extend(verts)

    def build(self, **meta) -> Built:
        g = Graph.from_edges(self.n, self.edges)
        regions = {k: sorted(set(v)) for k, v in self.regions.items()}
        return Built(g, list(self.provenance), regions, dict(meta))
