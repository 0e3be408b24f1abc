"""Finite simplicial graphs, labelled graphs, and structural decompositions.

Vertices are the dense integers ``0..n-1``.  Every construction in the
package produces :class:`Graph` values; labelled intermediates (Cayley
graphs and their regularisations) are :class:`LabelledGraph` values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "GraphError",
    "Graph",
    "EdgeLabel",
    "LabelledGraph",
    "BlockDecomposition",
    "validate_graph",
    "block_decomposition",
    "cliques_of_size",
    "clique_graph",
    "disjoint_union",
    "complete_graph",
    "cycle_graph",
    "path_graph",
]

MAX_CLIQUE_SIZE = 16


class GraphError(ValueError):
    pass


def _norm_edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Undirected simplicial graph on ``0..n-1``.

    ``edges`` is stored sorted with ``u < v`` in every pair.  Use
    :meth:`from_edges` to build from arbitrary input; the constructor
    itself assumes a normalised tuple and only re-checks it.
    """

    n: int
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        seen = set()
        for u, v in self.edges:
            if not (0 <= u < v < self.n):
                raise GraphError(f"bad edge {(u, v)} for n={self.n}")
            if (u, v) in seen:
                raise GraphError(f"duplicate edge {(u, v)}")
            seen.add((u, v))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        out = set()
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise GraphError(f"loop at vertex {u}")
            key = _norm_edge(u, v)
            if key in out:
                raise GraphError(f"duplicate edge {key}")
            out.add(key)
        return cls(int(n), tuple(sorted(out)))

    @cached_property
    def adj(self) -> tuple[tuple[int, ...], ...]:
        nb: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nb[u].append(v)
            nb[v].append(u)
        return tuple(tuple(sorted(x)) for x in nb)

    @cached_property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.adj)

    @cached_property
    def edge_array(self) -> np.ndarray:
        if not self.edges:
            return np.zeros((0, 2), dtype=np.int64)
        return np.asarray(self.edges, dtype=np.int64)

    def has_edge(self, u: int, v: int) -> bool:
        return _norm_edge(u, v) in self.edge_set

    @property
    def m(self) -> int:
        return len(self.edges)

    def is_regular(self, d: int | None = None) -> bool:
        if self.n == 0:
            return True
        degs = set(self.degrees)
        if len(degs) != 1:
            return False
        return d is None or degs == {d}

    def components(self) -> list[list[int]]:
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            stack, comp = [s], []
            while stack:
                x = stack.pop()
                comp.append(x)
                for y in self.adj[x]:
                    if not seen[y]:
                        seen[y] = True
                        stack.append(y)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    def bfs_distances(self, source: int) -> list[int]:
        """Hop distances from ``source``; unreachable vertices get -1."""
        dist = [-1] * self.n
        dist[source] = 0
        frontier = [source]
        while frontier:
            nxt = []
            for x in frontier:
                for y in self.adj[x]:
                    if dist[y] < 0:
                        dist[y] = dist[x] + 1
                        nxt.append(y)
            frontier = nxt
        return dist

    def distance_matrix(self) -> np.ndarray:
        from scipy.sparse import csr_matrix
        from scipy.sparse.csgraph import shortest_path

        if self.m == 0:
            out = np.full((self.n, self.n), np.inf)
            np.fill_diagonal(out, 0.0)
            return out
        e = self.edge_array
        mat = csr_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(self.n, self.n))
        return shortest_path(mat, directed=False, unweighted=True)

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Image of the graph under ``v -> perm[v]``."""
        return Graph.from_edges(self.n, ((perm[u], perm[v]) for u, v in self.edges))

    def induced(self, vertices: Iterable[int]) -> tuple["Graph", list[int]]:
        """Induced subgraph and the list mapping new index -> old vertex."""
        order = sorted(set(vertices))
        index = {v: i for i, v in enumerate(order)}
        edges = [(index[u], index[v]) for u, v in self.edges if u in index and v in index]
        return Graph.from_edges(len(order), edges), order

    def remove_vertex(self, x: int) -> "Graph":
        keep = [v for v in range(self.n) if v != x]
        return self.induced(keep)[0]

    # -- serialisation -------------------------------------------------
    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json(cls, data: dict) -> "Graph":
        try:
            return cls.from_edges(int(data["n"]), data["edges"])
        except (KeyError, TypeError, IndexError) as exc:
            raise GraphError(f"malformed graph JSON: {exc}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    def to_dot(self, name: str = "G") -> str:
        lines = [f"graph {name} {{"]
        lines += [f"  {v};" for v in range(self.n) if not self.adj[v]]
        lines += [f"  {u} -- {v};" for u, v in self.edges]
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class EdgeLabel:
    label: str
    direction: tuple[int, int] | None = None  # (tail, head) or undirected


@dataclass(frozen=True)
class LabelledGraph:
    base: Graph
    labels: tuple[tuple[tuple[int, int], EdgeLabel], ...] = ()

    def __post_init__(self) -> None:
        seen = set()
        for e, lab in self.labels:
            if e not in self.base.edge_set:
                raise GraphError(f"labelled edge {e} not in base graph")
            if e in seen:
                raise GraphError(f"edge {e} labelled twice")
            seen.add(e)
            if lab.direction is not None and tuple(sorted(lab.direction)) != e:
                raise GraphError(f"orientation {lab.direction} does not match edge {e}")

    @classmethod
    def build(cls, n: int, labelled_edges: Iterable[tuple[int, int, str, bool]]) -> "LabelledGraph":
        """From ``(u, v, label, directed)`` records; directed edges point u -> v."""
        recs = list(labelled_edges)
        base = Graph.from_edges(n, ((u, v) for u, v, _, _ in recs))
        labels = []
        for u, v, lab, directed in recs:
            labels.append((_norm_edge(u, v), EdgeLabel(str(lab), (u, v) if directed else None)))
        labels.sort(key=lambda t: t[0])
        return cls(base, tuple(labels))

    @cached_property
    def label_map(self) -> dict[tuple[int, int], EdgeLabel]:
        return dict(self.labels)

    @property
    def n(self) -> int:
        return self.base.n

    def label_tokens(self) -> list[str]:
        return sorted({lab.label for _, lab in self.labels})

    def to_json(self) -> dict:
        out = self.base.to_json()
        out["labels"] = [
            {"edge": list(e), "label": lab.label, "dir": list(lab.direction) if lab.direction else None}
            for e, lab in self.labels
        ]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "LabelledGraph":
        base = Graph.from_json(data)
        labels = []
        for rec in data.get("labels", []):
            e = _norm_edge(*rec["edge"])
            d = rec.get("dir")
            labels.append((e, EdgeLabel(str(rec["label"]), tuple(d) if d else None)))
        labels.sort(key=lambda t: t[0])
        return cls(base, tuple(labels))

    def to_dot(self, name: str = "G") -> str:
        lines = [f"digraph {name} {{"]
        lm = self.label_map
        for u, v in self.base.edges:
            lab = lm.get((u, v))
            if lab is None:
                lines.append(f"  {u} -> {v} [dir=none];")
            elif lab.direction is None:
                lines.append(f'  {u} -> {v} [dir=none, label="{lab.label}"];')
            else:
                t, h = lab.direction
                lines.append(f'  {t} -> {h} [label="{lab.label}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def disjoint_union(*graphs: Graph) -> tuple[Graph, list[int]]:
    """Disjoint union; also returns the index offset of each summand."""
    offsets, edges, n = [], [], 0
    for g in graphs:
        offsets.append(n)
        edges.extend((u + n, v + n) for u, v in g.edges)
        n += g.n
    return Graph(n, tuple(sorted(edges))), offsets


# -- validation --------------------------------------------------------------


def validate_graph(g: Graph | tuple[int, Iterable[Sequence[int]]]) -> dict:
    """Structural report for a graph or a raw ``(n, edge_list)`` pair.

    Never raises on malformed input; problems are listed under
    ``"violations"``.
    """
    if isinstance(g, Graph):
        n, raw = g.n, list(g.edges)
    else:
        n, raw = int(g[0]), [tuple(e) for e in g[1]]
    violations: list[str] = []
    clean: set[tuple[int, int]] = set()
    for e in raw:
        if len(e) != 2:
            violations.append(f"malformed edge {e}")
            continue
        u, v = int(e[0]), int(e[1])
        if u == v:
            violations.append(f"loop at {u}")
            continue
        if not (0 <= u < n and 0 <= v < n):
            violations.append(f"endpoint out of range in {(u, v)}")
            continue
        key = _norm_edge(u, v)
        if key in clean:
            violations.append(f"duplicate edge {key}")
            continue
        clean.add(key)
    h = Graph(n, tuple(sorted(clean)))
    comps = h.components() if n else []
    return {
        "n": n,
        "m": len(clean),
        "simplicial": not violations,
        "connected": len(comps) <= 1,
        "components": len(comps),
        "degrees": list(h.degrees),
        "violations": violations,
    }


# -- blocks --------------------------------------------------------------------


@dataclass(frozen=True)
class BlockDecomposition:
    """Blocks (maximal 2-connected subgraphs or bridges) and the block tree.

    Nodes of ``tree`` are ``("B", i)`` for block ``i`` and ``("C", v)``
    for a cut vertex ``v``; edges join a cut vertex to every block
    containing it.
    """

    blocks: tuple[tuple[int, ...], ...]
    cut_vertices: tuple[int, ...]
    tree: tuple[tuple[tuple[str, int], tuple[str, int]], ...] = field(default=())

    def block_graphs(self, g: Graph) -> list[tuple[Graph, list[int]]]:
        """Each block as an induced subgraph of ``g`` with its vertex map."""
        return [g.induced(b) for b in self.blocks]


def _biconnected(g: Graph) -> tuple[list[list[tuple[int, int]]], set[int]]:
    """Iterative Hopcroft-Tarjan; returns edge lists per block and cut vertices."""
    n = g.n
    disc = [-1] * n
    low = [0] * n
    blocks: list[list[tuple[int, int]]] = []
    cuts: set[int] = set()
    time = 0
    for root in range(n):
        if disc[root] >= 0:
            continue
        disc[root] = low[root] = time
        time += 1
        root_children = 0
        edge_stack: list[tuple[int, int]] = []
        stack = [(root, -1, iter(g.adj[root]))]
        while stack:
            u, parent, it = stack[-1]
            advanced = False
            for w in it:
                if w == parent:
                    continue
                if disc[w] < 0:
                    edge_stack.append((u, w))
                    disc[w] = low[w] = time
                    time += 1
                    if u == root:
                        root_children += 1
                    stack.append((w, u, iter(g.adj[w])))
                    advanced = True
                    break
                if disc[w] < disc[u]:
                    edge_stack.append((u, w))
                    low[u] = min(low[u], disc[w])
            if advanced:
                continue
            stack.pop()
            if parent >= 0:
                low[parent] = min(low[parent], low[u])
                if low[u] >= disc[parent]:
                    if parent != root:
                        cuts.add(parent)
                    blk = []
                    while True:
                        e = edge_stack.pop()
                        blk.append(_norm_edge(*e))
                        if e == (parent, u):
                            break
                    blocks.append(blk)
        if root_children > 1:
            cuts.add(root)
    return blocks, cuts


def block_decomposition(g: Graph) -> BlockDecomposition:
    if not g.is_connected():
        raise GraphError("graph not connected")
    edge_blocks, cuts = _biconnected(g)
    blocks = [tuple(sorted({x for e in blk for x in e})) for blk in edge_blocks]
    if g.n == 1:
        blocks = [(0,)]
    order = sorted(range(len(blocks)), key=lambda i: blocks[i])
    blocks = [blocks[i] for i in order]
    tree = []
    for i, b in enumerate(blocks):
        for v in b:
            if v in cuts:
                tree.append((("C", v), ("B", i)))
    return BlockDecomposition(tuple(blocks), tuple(sorted(cuts)), tuple(sorted(tree)))


# -- cliques -------------------------------------------------------------------


def cliques_of_size(g: Graph, d: int) -> list[tuple[int, ...]]:
    """All vertex sets of size ``d`` that are pairwise adjacent.

    Exhaustive ordered extension: each clique is produced once, from its
    smallest vertex, so there are no duplicates.
    """
    if d < 2:
        raise GraphError("clique size must be at least 2")
    if d > MAX_CLIQUE_SIZE:
        raise GraphError(f"clique size {d} exceeds limit {MAX_CLIQUE_SIZE}")
    higher = [frozenset(w for w in g.adj[v] if w > v) for v in range(g.n)]
    out: list[tuple[int, ...]] = []

    def extend(clique: list[int], cand: frozenset[int]) -> None:
        if len(clique) == d:
            out.append(tuple(clique))
            return
        if len(clique) + len(cand) < d:
            return
        for w in sorted(cand):
            clique.append(w)
            extend(clique, cand & higher[w])
            clique.pop()

    for v in range(g.n):
        if len(higher[v]) >= d - 1:
            extend([v], higher[v])
    out.sort()
    return out


def clique_graph(g: Graph, d: int) -> Graph:
    """Graph on the ``d``-cliques of ``g``.

    Two cliques are adjacent when some vertex of one equals or is adjacent
    to some vertex of the other.  Vertex ``i`` is the ``i``-th clique of
    :func:`cliques_of_size`.
    """
    cliques = cliques_of_size(g, d)
    owner: dict[int, list[int]] = {}
    for i, c in enumerate(cliques):
        for v in c:
            owner.setdefault(v, []).append(i)
    edges = set()
    for i, c in enumerate(cliques):
        near = set(c)
        for v in c:
            near.update(g.adj[v])
        for x in near:
            for j in owner.get(x, ()):
                if j != i:
                    edges.add(_norm_edge(i, j))
    return Graph(len(cliques), tuple(sorted(edges)))


def complete_graph(n: int) -> Graph:
    return Graph(n, tuple(combinations(range(n), 2)))


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((i, (i + 1) % n) for i in range(n)))


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)))
