"""Exact automorphism groups and isomorphism tests for finite graphs.

Individualisation-refinement search.  Cells carry 64-bit labels computed
only from label values (see :class:`_Refiner`), so isomorphisms carry
refined colourings to refined colourings; that is what makes comparing
search nodes across branches, and across two graphs, sound.  The initial
colouring uses user colours, degrees and triangle counts.  Every
candidate automorphism is checked against the edge set before use.

Group orders come from the stabiliser chain along the first path of the
search tree: ``|Aut| = prod_i |orbit of v_i in Stab(v_0..v_{i-1})|``.
Every orbit is settled exactly, either by an automorphism found in the
subtree or by exhausting that subtree.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .graph import Graph, LabelledGraph

__all__ = [
    "AutError",
    "AutTimeout",
    "PermGroup",
    "automorphism_group",
    "label_preserving_automorphisms",
    "is_vertex_free",
    "is_edge_free",
    "graphs_isomorphic",
    "aut_certificate",
    "DEFAULT_VERTEX_CAP",
    "DEFAULT_TIMEOUT",
]

DEFAULT_VERTEX_CAP = 20000
DEFAULT_TIMEOUT = 300.0


class AutError(RuntimeError):
    pass


class AutTimeout(AutError):
    def __init__(self, msg: str, info: dict):
        super().__init__(msg)
        self.info = info


@dataclass(eq=False)
class PermGroup:
    """Permutation group given by generators, with its exact order."""

    degree: int
    generators: list[np.ndarray]
    order: int
    elapsed_ms: float = field(default=0.0, compare=False)
    base: list[int] = field(default_factory=list)
    orbit_sizes: list[int] = field(default_factory=list)

    def generator_lists(self) -> list[list[int]]:
        return [g.tolist() for g in self.generators]

    def vertex_orbits(self) -> np.ndarray:
        """Orbit label of every point."""
        return _orbit_labels(self.degree, self.generators)

    def orbit_of_pairs(self, pairs: np.ndarray) -> np.ndarray:
        """Orbit labels of unordered pairs (rows of ``pairs``) under the group."""
        if len(pairs) == 0:
            return np.zeros(0, dtype=np.int64)
        lo = np.minimum(pairs[:, 0], pairs[:, 1])
        hi = np.maximum(pairs[:, 0], pairs[:, 1])
        keys = lo * self.degree + hi
        order = np.argsort(keys)
        skeys = keys[order]
        src, dst = [], []
        for g in self.generators:
            a, b = g[lo], g[hi]
            mk = np.minimum(a, b) * self.degree + np.maximum(a, b)
            pos = np.searchsorted(skeys, mk)
            if np.any(pos >= len(skeys)) or np.any(skeys[np.minimum(pos, len(skeys) - 1)] != mk):
                raise AutError("pair set is not invariant under the group")
            src.append(np.arange(len(keys)))
            dst.append(order[pos])
        return _components(len(keys), src, dst)

    def elements(self, cap: int = 100000) -> list[np.ndarray]:
        """All group elements by closure (identity first)."""
        if self.order > cap:
            raise AutError(f"group of order {self.order} exceeds enumeration cap {cap}")
        ident = np.arange(self.degree, dtype=np.int64)
        seen = {ident.tobytes(): ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for x in frontier:
                for g in self.generators:
                    y = g[x]
                    k = y.tobytes()
                    if k not in seen:
                        seen[k] = y
                        nxt.append(y)
            frontier = nxt
        out = list(seen.values())
        if len(out) != self.order:
            raise AutError(f"closure has {len(out)} elements, expected {self.order}")
        return out

    def to_json(self) -> dict:
        return {"degree": self.degree, "order": self.order, "generators": self.generator_lists()}


def _components(n: int, src: list[np.ndarray], dst: list[np.ndarray]) -> np.ndarray:
    if not src:
        return np.arange(n, dtype=np.int64)
    s = np.concatenate(src)
    d = np.concatenate(dst)
    mat = coo_matrix((np.ones(len(s), dtype=np.int8), (s, d)), shape=(n, n))
    _, labels = connected_components(mat, directed=True, connection="weak")
    return labels.astype(np.int64)


def _orbit_labels(n: int, gens: Sequence[np.ndarray]) -> np.ndarray:
    idx = np.arange(n, dtype=np.int64)
    return _components(n, [idx for _ in gens], list(gens))


# -- refinement ----------------------------------------------------------------

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_SALT = np.uint64(0x9E3779B97F4A7C15)
_INDIV = np.uint64(0xD6E8FEB86659FD93)


def _mix(x):
    # splitmix64 finaliser; uint64 arithmetic wraps by design
    x = np.asarray(x, dtype=np.uint64)
    with np.errstate(over="ignore"):
        x = x ^ (x >> np.uint64(30))
        x = x * _M1
        x = x ^ (x >> np.uint64(27))
        x = x * _M2
        return x ^ (x >> np.uint64(31))


def _triangle_counts(g: Graph) -> np.ndarray:
    e = g.edge_array
    if len(e) == 0:
        return np.zeros(g.n, dtype=np.int64)
    a = coo_matrix(
        (np.ones(2 * len(e), dtype=np.int64), (np.r_[e[:, 0], e[:, 1]], np.r_[e[:, 1], e[:, 0]])),
        shape=(g.n, g.n),
    ).tocsr()
    tri = (a @ a).multiply(a).sum(axis=1)
    return np.asarray(tri).reshape(-1) // 2


def _initial_rows(g: Graph, colors: Sequence[int] | None) -> np.ndarray:
    cols = [np.asarray(g.degrees, dtype=np.int64), _triangle_counts(g)]
    if colors is not None:
        cols.insert(0, np.asarray(colors, dtype=np.int64))
    return np.column_stack(cols)


@dataclass
class _Node:
    labels: np.ndarray  # uint64 cell label per vertex
    sizes: dict  # cell label -> size
    cells: int

    def copy(self) -> "_Node":
        return _Node(self.labels.copy(), dict(self.sizes), self.cells)


class _Refiner:
    """Incremental colour refinement with hashed, isomorphism-invariant labels.

    Each round only vertices adjacent to a vertex whose label changed are
    re-examined.  A touched vertex is hashed by the multiset of the new
    labels of its changed neighbours; a cell splits along those hashes.
    Members of a cell agree on their neighbour multisets for the previous
    labelling, so this reaches the same stable partition as full
    Weisfeiler-Leman refinement while doing work proportional to the
    changes.  The untouched part of a split cell keeps its label (or, if
    every member was touched, the part with the smallest hash); other
    parts get the label ``mix(old ^ hash)``.  Labels depend only on label
    values, so the procedure commutes with isomorphisms.  A 64-bit hash
    collision can only merge cells, which keeps the search sound because
    leaves are verified.
    """

    def __init__(
        self,
        g: Graph,
        colors: Sequence[int] | None,
        deadline: float,
        initial: np.ndarray | None = None,
    ):
        self.g = g
        self.n = g.n
        self.deadline = deadline
        self.rounds = 0
        e = g.edge_array
        self.m = len(e)
        src = np.r_[e[:, 0], e[:, 1]] if self.m else np.zeros(0, dtype=np.int64)
        dst = np.r_[e[:, 1], e[:, 0]] if self.m else np.zeros(0, dtype=np.int64)
        order = np.argsort(src, kind="stable")
        self.indices = dst[order].astype(np.int64)
        self.indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=self.n), out=self.indptr[1:])
        self.deg = np.diff(self.indptr)
        self.edge_keys = np.sort(e[:, 0] * self.n + e[:, 1]) if self.m else np.zeros(0, dtype=np.int64)
        if initial is None:
            _, inv = np.unique(_initial_rows(g, colors), axis=0, return_inverse=True)
            initial = inv.reshape(-1)
        self.initial = np.asarray(initial, dtype=np.int64)

    def root(self) -> _Node:
        labels = _mix(self.initial.astype(np.uint64) + _SALT)
        vals, counts = np.unique(labels, return_counts=True)
        return _Node(labels, dict(zip(vals.tolist(), counts.tolist())), len(vals))

    def _neighbours(self, verts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Concatenated neighbour lists of ``verts`` with the owning vertex."""
        starts = self.indptr[verts]
        counts = self.deg[verts]
        total = int(counts.sum())
        if total == 0:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        owner = np.repeat(np.arange(len(verts)), counts)
        offs = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        return self.indices[starts[owner] + offs], verts[owner]

    def refine(self, node: _Node, changed: np.ndarray, expect: list[bytes] | None = None):
        """Refine ``node`` in place given the vertices whose label just changed.

        Returns the per-round trace, or ``None`` as soon as a round disagrees
        with ``expect``.
        """
        labels, sizes = node.labels, node.sizes
        trace: list[bytes] = []
        cap = self.n + 2
        while len(changed):
            if time.monotonic() > self.deadline:
                raise AutTimeout(
                    "automorphism search timed out",
                    {"cells": node.cells, "n": self.n, "rounds": self.rounds},
                )
            self.rounds += 1
            if len(trace) > cap:
                break
            tgt, src = self._neighbours(changed)
            if len(tgt) == 0:
                break
            contrib = _mix(labels[src] + _SALT)
            order = np.argsort(tgt, kind="stable")
            tgt, contrib = tgt[order], contrib[order]
            starts = np.flatnonzero(np.r_[True, tgt[1:] != tgt[:-1]])
            touched = tgt[starts]
            h = _mix(np.add.reduceat(contrib, starts))
            lab = labels[touched]
            o2 = np.lexsort((h, lab))
            touched, h, lab = touched[o2], h[o2], lab[o2]
            brk = np.flatnonzero(np.r_[True, (lab[1:] != lab[:-1]) | (h[1:] != h[:-1]), True])
            cell_brk = np.flatnonzero(np.r_[True, lab[1:] != lab[:-1], True])
            grp_start = brk[:-1]
            entries: list[tuple[int, int, int]] = []
            moved_parts: list[np.ndarray] = []
            gi = 0
            lab_list = lab.tolist()
            h_list = h.tolist()
            for ci in range(len(cell_brk) - 1):
                c0, c1 = int(cell_brk[ci]), int(cell_brk[ci + 1])
                cell = lab_list[c0]
                groups = []
                while gi < len(grp_start) and grp_start[gi] < c1:
                    groups.append((int(grp_start[gi]), int(brk[gi + 1])))
                    gi += 1
                untouched = sizes[cell] - (c1 - c0)
                if untouched == 0 and len(groups) == 1:
                    continue
                keep_first = untouched == 0
                for k, (a, b) in enumerate(groups):
                    if keep_first and k == 0:
                        continue
                    hv = h_list[a]
                    new = int(_mix(np.uint64(cell) ^ np.uint64(hv)))
                    labels[touched[a:b]] = np.uint64(new)
                    sizes[cell] -= b - a
                    sizes[new] = sizes.get(new, 0) + (b - a)
                    node.cells += 1
                    moved_parts.append(touched[a:b])
                    entries.append((cell, hv, b - a))
            if not entries:
                break
            d = hashlib.blake2b(np.asarray(entries, dtype=np.uint64).tobytes(), digest_size=16).digest()
            if expect is not None and (len(trace) >= len(expect) or expect[len(trace)] != d):
                return None
            trace.append(d)
            changed = np.concatenate(moved_parts)
        if expect is not None and len(trace) != len(expect):
            return None
        return trace

    def individualize(self, node: _Node, v: int, depth: int) -> _Node:
        """Give ``v`` a fresh label; ``depth`` keeps successive choices apart."""
        out = node.copy()
        old = int(out.labels[v])
        new = int(_mix(np.uint64(old) ^ _INDIV ^ _mix(np.uint64(depth))))
        out.labels[v] = np.uint64(new)
        out.sizes[old] -= 1
        out.sizes[new] = out.sizes.get(new, 0) + 1
        out.cells += 1
        return out

    def target_cell(self, node: _Node) -> np.ndarray | None:
        if node.cells >= self.n:
            return None
        best = None
        for lab, s in node.sizes.items():
            if s > 1 and (best is None or (s, lab) < best):
                best = (s, lab)
        if best is None:
            return None
        return np.flatnonzero(node.labels == np.uint64(best[1]))

    def maps_edges(self, perm: np.ndarray, other: "_Refiner | None" = None) -> bool:
        """Does ``perm`` carry this graph's edges onto ``other``'s (default: itself)?"""
        tgt = self if other is None else other
        if self.m == 0:
            return tgt.m == 0
        e = self.g.edge_array
        a, b = perm[e[:, 0]], perm[e[:, 1]]
        keys = np.minimum(a, b) * tgt.n + np.maximum(a, b)
        pos = np.minimum(np.searchsorted(tgt.edge_keys, keys), tgt.m - 1)
        return bool(np.all(tgt.edge_keys[pos] == keys))


class _FirstPath:
    """The leftmost root-to-leaf path of the search tree."""

    def __init__(self, ref: _Refiner):
        self.nodes: list[_Node] = []  # refined node at depth i
        self.cells: list[np.ndarray] = []
        self.chosen: list[int] = []
        self.traces: list[list[bytes]] = []
        node = ref.root()
        changed = np.arange(ref.n, dtype=np.int64)
        while True:
            self.traces.append(ref.refine(node, changed))
            self.nodes.append(node)
            cell = ref.target_cell(node)
            if cell is None:
                break
            v = int(cell[0])
            self.cells.append(cell)
            self.chosen.append(v)
            node = ref.individualize(node, v, len(self.chosen) - 1)
            changed = np.array([v], dtype=np.int64)
        self.leaf = node.labels
        self.leaf_order = np.argsort(self.leaf)
        self.leaf_sorted = self.leaf[self.leaf_order]


def _leaf_map(first: _FirstPath, labels: np.ndarray) -> np.ndarray | None:
    """Vertex map sending the first leaf's labelling to ``labels``."""
    order = np.argsort(labels)
    if not np.array_equal(labels[order], first.leaf_sorted):
        return None
    perm = np.empty(len(labels), dtype=np.int64)
    perm[first.leaf_order] = order
    return perm


def _search(ref: _Refiner, first: _FirstPath, node: _Node, v: int, depth: int, accept) -> np.ndarray | None:
    """Depth-first search below ``node`` with ``v`` just individualised.

    Nodes whose refinement trace differs from the first path's are pruned.
    """
    if depth >= len(first.traces):
        return None
    if ref.refine(node, np.array([v], dtype=np.int64), first.traces[depth]) is None:
        return None
    if node.cells != first.nodes[depth].cells:
        return None
    cell = ref.target_cell(node)
    if cell is None:
        perm = _leaf_map(first, node.labels)
        return perm if perm is not None and accept(perm) else None
    for x in cell:
        x = int(x)
        found = _search(ref, first, ref.individualize(node, x, depth), x, depth + 1, accept)
        if found is not None:
            return found
    return None


def _search_from(ref: _Refiner, first: _FirstPath, node: _Node, accept) -> np.ndarray | None:
    """Search below an already refined root node."""
    if node.cells != first.nodes[0].cells:
        return None
    cell = ref.target_cell(node)
    if cell is None:
        perm = _leaf_map(first, node.labels)
        return perm if perm is not None and accept(perm) else None
    for x in cell:
        x = int(x)
        found = _search(ref, first, ref.individualize(node, x, 0), x, 1, accept)
        if found is not None:
            return found
    return None


def _check_cap(g: Graph, cap: int) -> None:
    if g.n > cap:
        raise AutError(f"graph has {g.n} vertices, above the cap of {cap}")


def automorphism_group(
    g: Graph,
    colors: Sequence[Hashable] | None = None,
    *,
    cap: int = DEFAULT_VERTEX_CAP,
    timeout: float = DEFAULT_TIMEOUT,
) -> PermGroup:
    """Full (colour-preserving) automorphism group of ``g``.

    Generators are listed deepest stabiliser level first, each verified
    against the edge set before it is accepted.
    """
    _check_cap(g, cap)
    t0 = time.monotonic()
    if g.n == 0:
        return PermGroup(0, [], 1)
    ref = _Refiner(g, _canonical_colors(colors), t0 + timeout)
    first = _FirstPath(ref)
    gens: list[np.ndarray] = []
    orbit_sizes: list[int] = []
    for level in range(len(first.cells) - 1, -1, -1):
        prefix = first.chosen[:level]
        vi = first.chosen[level]
        cell = first.cells[level]
        pre = np.asarray(prefix, dtype=np.int64)

        def fixing(gs):
            return [p for p in gs if np.array_equal(p[pre], pre)]

        failed: list[int] = []
        labels = _orbit_labels(g.n, fixing(gens))
        for w in cell:
            w = int(w)
            if w == vi or labels[w] == labels[vi]:
                continue
            if any(labels[f] == labels[w] for f in failed):
                continue

            def accept(perm, w=w):
                return (
                    perm[vi] == w
                    and np.array_equal(perm[pre], pre)
                    and ref.maps_edges(perm)
                )

            start = ref.individualize(first.nodes[level], w, level)
            found = _search(ref, first, start, w, level + 1, accept)
            if found is None:
                failed.append(w)
            else:
                gens.append(found)
                labels = _orbit_labels(g.n, fixing(gens))
        orbit_sizes.append(int(np.sum(labels[cell] == labels[vi])))
    order = 1
    for s in orbit_sizes:
        order *= s
    elapsed = (time.monotonic() - t0) * 1000.0
    return PermGroup(
        g.n,
        gens,
        order,
        elapsed_ms=elapsed,
        base=list(first.chosen),
        orbit_sizes=orbit_sizes[::-1],
    )


def _canonical_colors(colors: Sequence[Hashable] | None) -> list[int] | None:
    if colors is None:
        return None
    keys = sorted(set(colors), key=repr)
    index = {k: i for i, k in enumerate(keys)}
    return [index[c] for c in colors]


# -- labelled graphs -----------------------------------------------------------


def _labelled_encoding(lg: LabelledGraph) -> tuple[Graph, list]:
    """Subdivide edges so that labels and orientations become vertex colours."""
    n = lg.n
    edges: list[tuple[int, int]] = []
    colors: list = [("orig",)] * n
    nxt = n
    lm = lg.label_map
    for u, v in lg.base.edges:
        lab = lm.get((u, v))
        if lab is None:
            edges += [(u, nxt), (nxt, v)]
            colors.append(("plain",))
            nxt += 1
            continue
        if lab.direction is None:
            a, b, ca, cb = u, v, ("und", lab.label), ("und", lab.label)
        else:
            a, b = lab.direction
            ca, cb = ("tail", lab.label), ("head", lab.label)
        x, y = nxt, nxt + 1
        nxt += 2
        edges += [(a, x), (x, y), (y, b)]
        colors += [ca, cb]
    return Graph.from_edges(nxt, edges), colors


def label_preserving_automorphisms(
    lg: LabelledGraph, *, cap: int = DEFAULT_VERTEX_CAP, timeout: float = DEFAULT_TIMEOUT
) -> PermGroup:
    """Automorphisms preserving labels and orientations, acting on ``0..n-1``."""
    enc, colors = _labelled_encoding(lg)
    grp = automorphism_group(enc, colors, cap=max(cap, enc.n), timeout=timeout)
    n = lg.n
    gens = [p[:n].copy() for p in grp.generators]
    for p in gens:
        if not np.array_equal(np.sort(p), np.arange(n)):
            raise AutError("encoded automorphism does not restrict to a permutation")
    return PermGroup(n, gens, grp.order, elapsed_ms=grp.elapsed_ms)


# -- freeness ------------------------------------------------------------------


def is_vertex_free(g: Graph, group: PermGroup | None = None, **kw) -> bool:
    grp = group if group is not None else automorphism_group(g, **kw)
    labels = grp.vertex_orbits()
    sizes = np.bincount(labels)
    return bool(np.all(sizes[labels] == grp.order))


def is_edge_free(g: Graph, group: PermGroup | None = None, **kw) -> bool:
    """Setwise stabiliser of every edge is trivial (no fixing, no swapping)."""
    grp = group if group is not None else automorphism_group(g, **kw)
    if g.m == 0:
        return True
    if grp.order > g.m:
        return False
    labels = grp.orbit_of_pairs(g.edge_array)
    sizes = np.bincount(labels)
    return bool(np.all(sizes[labels] == grp.order))


# -- isomorphism ---------------------------------------------------------------


def graphs_isomorphic(
    g: Graph,
    h: Graph,
    colors_g: Sequence[Hashable] | None = None,
    colors_h: Sequence[Hashable] | None = None,
    *,
    cap: int = DEFAULT_VERTEX_CAP,
    timeout: float = DEFAULT_TIMEOUT,
) -> tuple[bool, list[int] | None]:
    """Exact isomorphism test; the witness maps vertices of ``g`` to ``h``."""
    _check_cap(g, cap)
    _check_cap(h, cap)
    if g.n != h.n or g.m != h.m or sorted(g.degrees) != sorted(h.degrees):
        return False, None
    if (colors_g is None) != (colors_h is None):
        raise AutError("colours must be given for both graphs or neither")
    if colors_g is not None:
        if sorted(map(repr, colors_g)) != sorted(map(repr, colors_h)):
            return False, None
        keys = sorted(set(colors_g), key=repr)
        index = {k: i for i, k in enumerate(keys)}
        cg = [index[c] for c in colors_g]
        ch = [index[c] for c in colors_h]
    else:
        cg = ch = None
    if g.n == 0:
        return True, []
    deadline = time.monotonic() + timeout
    rows_g, rows_h = _initial_rows(g, cg), _initial_rows(h, ch)
    _, inv = np.unique(np.vstack([rows_g, rows_h]), axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    init_g, init_h = inv[: g.n], inv[g.n :]
    if not np.array_equal(np.sort(init_g), np.sort(init_h)):
        return False, None
    rg = _Refiner(g, None, deadline, initial=init_g)
    rh = _Refiner(h, None, deadline, initial=init_h)
    first = _FirstPath(rg)

    def accept(phi: np.ndarray) -> bool:
        return rg.maps_edges(phi, rh)

    # search h's tree for a leaf matching g's first leaf
    root = rh.root()
    if rh.refine(root, np.arange(h.n, dtype=np.int64), first.traces[0]) is None:
        return False, None
    phi = _search_from(rh, first, root, accept)
    if phi is None:
        return False, None
    return True, phi.tolist()


def aut_certificate(g: Graph, group: PermGroup | None = None, **kw) -> dict:
    grp = group if group is not None else automorphism_group(g, **kw)
    return {
        "order": grp.order,
        "generators": grp.generator_lists(),
        "vertexFree": is_vertex_free(g, grp),
        "edgeFree": is_edge_free(g, grp),
        "elapsedMs": round(grp.elapsed_ms, 3),
    }
