"""Finite groups as multiplication tables, Cayley graphs, group isomorphism.

Elements are ``0..order-1`` with ``0`` the identity.  ``mul[a, b]`` is the
product ``a*b``.  For groups built from permutations, ``a*b`` means "apply
``b`` first, then ``a``" (composition of functions).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .graph import LabelledGraph

__all__ = [
    "GroupError",
    "FiniteGroup",
    "GeneratingSet",
    "group_from_permutations",
    "group_from_table",
    "direct_product",
    "named_group",
    "NAMED_GROUPS",
    "load_group",
    "normalize_generating_set",
    "cayley_graph",
    "groups_isomorphic",
    "group_from_automorphisms",
    "PERM_CLOSURE_CAP",
    "ISO_CAP",
]

PERM_CLOSURE_CAP = 5000
ISO_CAP = 2000


class GroupError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    mul: np.ndarray
    name: str = ""
    default_generators: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        m = np.asarray(self.mul, dtype=np.int64)
        object.__setattr__(self, "mul", m)
        m.setflags(write=False)

    @property
    def order(self) -> int:
        return int(self.mul.shape[0])

    @cached_property
    def inverses(self) -> np.ndarray:
        inv = np.argmax(self.mul == 0, axis=1)
        return inv.astype(np.int64)

    def inverse(self, a: int) -> int:
        return int(self.inverses[a])

    def product(self, a: int, b: int) -> int:
        return int(self.mul[a, b])

    @cached_property
    def element_orders(self) -> np.ndarray:
        n = self.order
        orders = np.zeros(n, dtype=np.int64)
        cur = np.arange(n)
        for k in range(1, n + 1):
            hit = (cur == 0) & (orders == 0)
            orders[hit] = k
            if np.all(orders):
                break
            cur = self.mul[cur, np.arange(n)]
        return orders

    def is_involution(self, a: int) -> bool:
        return a != 0 and self.inverse(a) == a

    def closure(self, gens: Iterable[int]) -> list[int]:
        """Subgroup generated by ``gens`` in breadth-first order from 0."""
        gens = list(gens)
        seen = {0}
        out = [0]
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for s in gens:
                    y = int(self.mul[x, s])
                    if y not in seen:
                        seen.add(y)
                        out.append(y)
                        nxt.append(y)
            frontier = nxt
        return out

    def generates(self, gens: Iterable[int]) -> bool:
        return len(self.closure(gens)) == self.order

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    def order_profile(self) -> tuple[int, ...]:
        return tuple(sorted(self.element_orders.tolist()))

    def small_generating_set(self) -> list[int]:
        """Greedy generating set, preferring elements of large order."""
        order = sorted(range(1, self.order), key=lambda a: (-int(self.element_orders[a]), a))
        gens: list[int] = []
        span = {0}
        for a in order:
            if a in span:
                continue
            gens.append(a)
            span = set(self.closure(gens))
            if len(span) == self.order:
                break
        return gens

    def to_json(self) -> dict:
        return {"kind": "table", "order": self.order, "mul": self.mul.tolist()}


def _check_table(mul: np.ndarray) -> None:
    n = mul.shape[0]
    if mul.shape != (n, n) or n == 0:
        raise GroupError("table must be square and non-empty")
    if mul.min() < 0 or mul.max() >= n:
        raise GroupError("table entries out of range")
    idx = np.arange(n)
    if not (np.array_equal(mul[0], idx) and np.array_equal(mul[:, 0], idx)):
        raise GroupError("element 0 is not a two-sided identity")
    for row in mul:
        if len(np.unique(row)) != n:
            raise GroupError("table is not a Latin square (missing inverse)")
    for col in mul.T:
        if len(np.unique(col)) != n:
            raise GroupError("table is not a Latin square (missing inverse)")
    # Light's test: associativity only needs checking against a generating set
    g = FiniteGroup(mul)
    for a in g.small_generating_set():
        # (x a) y == x (a y) for all x, y
        left = mul[mul[:, a][:, None], idx[None, :]]
        right = mul[idx[:, None], mul[a][None, :]]
        if not np.array_equal(left, right):
            raise GroupError("table is not associative")


def group_from_table(mul: Sequence[Sequence[int]], name: str = "", generators: Sequence[int] = ()) -> FiniteGroup:
    arr = np.asarray(mul, dtype=np.int64)
    _check_table(arr)
    return FiniteGroup(arr, name, tuple(generators))


def group_from_permutations(
    degree: int, gens: Sequence[Sequence[int]], cap: int = PERM_CLOSURE_CAP, name: str = ""
) -> FiniteGroup:
    """Close a set of permutations of ``0..degree-1`` under composition.

    The generators (deduplicated, identity dropped) get the indices right
    after the identity and are recorded as ``default_generators``.
    """
    ident = tuple(range(degree))
    perms = []
    for p in gens:
        p = tuple(int(x) for x in p)
        if sorted(p) != list(ident):
            raise GroupError(f"{p} is not a permutation of 0..{degree - 1}")
        perms.append(p)
    index: dict[tuple[int, ...], int] = {ident: 0}
    elems = [ident]
    gen_idx: list[int] = []
    for p in perms:
        if p not in index:
            index[p] = len(elems)
            elems.append(p)
        if index[p] != 0 and index[p] not in gen_idx:
            gen_idx.append(index[p])
    frontier = list(elems)
    while frontier:
        nxt = []
        for x in frontier:
            for p in perms:
                y = tuple(x[i] for i in p)  # x after p
                if y not in index:
                    if len(elems) >= cap:
                        raise GroupError("group too large")
                    index[y] = len(elems)
                    elems.append(y)
                    nxt.append(y)
        frontier = nxt
    n = len(elems)
    arr = np.asarray(elems, dtype=np.int64).reshape(n, degree)
    mul = np.empty((n, n), dtype=np.int64)
    for a in range(n):
        comp = arr[a][arr]  # row b: a after b
        for b in range(n):
            mul[a, b] = index[tuple(comp[b].tolist())]
    return FiniteGroup(mul, name, tuple(gen_idx))


def cyclic_group(n: int) -> FiniteGroup:
    i = np.arange(n)
    return FiniteGroup((i[:, None] + i[None, :]) % n, f"C{n}", (1,) if n > 1 else ())


def direct_product(g: FiniteGroup, h: FiniteGroup, name: str = "") -> FiniteGroup:
    """Pairs ``(a, b)`` indexed as ``a * |h| + b``."""
    ng, nh = g.order, h.order
    a = np.arange(ng * nh) // nh
    b = np.arange(ng * nh) % nh
    mul = g.mul[a[:, None], a[None, :]] * nh + h.mul[b[:, None], b[None, :]]
    gens = tuple(x * nh for x in g.default_generators) + tuple(y for y in h.default_generators)
    return FiniteGroup(mul, name or f"{g.name}x{h.name}", gens)


def _quaternion_group() -> FiniteGroup:
    # elements (sign, unit) with unit in 1, i, j, k; index = 4*sign + unit
    table = {
        (0, 0): (0, 0), (0, 1): (0, 1), (0, 2): (0, 2), (0, 3): (0, 3),
        (1, 0): (0, 1), (1, 1): (1, 0), (1, 2): (0, 3), (1, 3): (1, 2),
        (2, 0): (0, 2), (2, 1): (1, 3), (2, 2): (1, 0), (2, 3): (0, 1),
        (3, 0): (0, 3), (3, 1): (0, 2), (3, 2): (1, 1), (3, 3): (1, 0),
    }  # unit product -> (sign flip, unit)
    mul = np.empty((8, 8), dtype=np.int64)
    for x in range(8):
        for y in range(8):
            s1, u1 = divmod(x, 4)
            s2, u2 = divmod(y, 4)
            flip, u = table[(u1, u2)]
            mul[x, y] = 4 * ((s1 + s2 + flip) % 2) + u
    return FiniteGroup(mul, "Q8", (1, 2))


def _builtin(name: str) -> FiniteGroup:
    if name == "trivial":
        return FiniteGroup(np.zeros((1, 1), dtype=np.int64), "trivial", ())
    if name.startswith("C") and name[1:].isdigit():
        n = int(name[1:])
        if 2 <= n <= 12:
            return cyclic_group(n)
    if name == "S3":
        return group_from_permutations(3, [(1, 0, 2), (1, 2, 0)], name="S3")
    if name == "D4":
        return group_from_permutations(4, [(1, 2, 3, 0), (0, 3, 2, 1)], name="D4")
    if name == "Q8":
        return _quaternion_group()
    if name == "C2xC2":
        return direct_product(cyclic_group(2), cyclic_group(2), "C2xC2")
    raise GroupError(f"unknown group {name!r}")


NAMED_GROUPS = ("trivial",) + tuple(f"C{n}" for n in range(2, 13)) + ("S3", "D4", "Q8", "C2xC2")


def named_group(name: str) -> FiniteGroup:
    return _builtin(name)


def load_group(spec: str | dict) -> FiniteGroup:
    """A built-in name, a JSON file path, or a parsed JSON object."""
    if isinstance(spec, str):
        if spec in NAMED_GROUPS:
            return named_group(spec)
        try:
            with open(spec) as fh:
                spec = json.load(fh)
        except FileNotFoundError:
            raise GroupError(f"unknown group {spec!r} (not a built-in name or file)") from None
    kind = spec.get("kind")
    if kind == "table":
        mul = spec["mul"]
        if "order" in spec and len(mul) != spec["order"]:
            raise GroupError("table size does not match order")
        return group_from_table(mul, spec.get("name", ""), spec.get("generators", ()))
    if kind == "perm":
        return group_from_permutations(spec["degree"], spec["gens"], name=spec.get("name", ""))
    raise GroupError(f"unknown group kind {kind!r}")


# -- generating sets and Cayley graphs -----------------------------------------


@dataclass(frozen=True)
class GeneratingSet:
    gens: tuple[int, ...]
    involutions: tuple[int, ...] = field(default=())
    non_involutions: tuple[int, ...] = field(default=())

    @property
    def degree(self) -> int:
        """Valence of the Cayley graph: ``|I| + 2|T|``."""
        return len(self.involutions) + 2 * len(self.non_involutions)


def _split(g: FiniteGroup, gens: Sequence[int]) -> GeneratingSet:
    inv = tuple(s for s in gens if g.is_involution(s))
    non = tuple(s for s in gens if not g.is_involution(s))
    return GeneratingSet(tuple(gens), inv, non)


def normalize_generating_set(g: FiniteGroup, s0: Sequence[int] | None = None) -> GeneratingSet:
    """Drop one of every inverse pair, then pad until the Cayley degree is at least 3.

    Padding takes the smallest-index element whose inverse is not already
    present.  Cyclic groups of order 4 and 5 have no inverse-pair-free set
    of three elements, so the target is the valence, not the set size.
    """
    if g.order < 4:
        raise GroupError("use small-group path")
    s0 = list(g.default_generators if s0 is None else s0)
    for s in s0:
        if not 0 < s < g.order:
            raise GroupError(f"generator {s} is not a non-identity element")
    if not g.generates(s0):
        raise GroupError("S0 does not generate the group")
    kept: list[int] = []
    for s in s0:
        if s in kept or g.inverse(s) in kept:
            continue
        kept.append(s)
    for c in range(1, g.order):
        if _split(g, kept).degree >= 3:
            break
        if c in kept or g.inverse(c) in kept:
            continue
        kept.append(c)
    out = _split(g, kept)
    if out.degree < 3:
        raise GroupError("cannot reach Cayley degree 3")
    return out


def cayley_graph(g: FiniteGroup, s: GeneratingSet) -> LabelledGraph:
    """Edges ``x -> x*s`` labelled ``s``; involutions give undirected edges."""
    for a in s.gens:
        if g.inverse(a) in s.gens and not g.is_involution(a):
            raise GroupError(f"inverse pair {a}, {g.inverse(a)} in generating set")
    recs = []
    seen: set[tuple[int, int]] = set()
    for x in range(g.order):
        for a in s.gens:
            y = int(g.mul[x, a])
            e = (min(x, y), max(x, y))
            if g.is_involution(a):
                if x > y:
                    continue
                directed = False
            else:
                directed = True
            if e in seen:
                raise GroupError("not simplicial")
            seen.add(e)
            recs.append((x, y, f"s{a}", directed))
    return LabelledGraph.build(g.order, recs)


# -- isomorphism ----------------------------------------------------------------


def groups_isomorphic(
    g: FiniteGroup, h: FiniteGroup, cap: int = ISO_CAP
) -> tuple[bool, list[int] | None]:
    """Exact isomorphism test by backtracking over images of a generating set.

    Returns ``(True, phi)`` with ``phi[a]`` the image of ``a`` in ``h``.
    """
    if g.order > cap or h.order > cap:
        raise GroupError(f"group order beyond isomorphism cap {cap}")
    if g.order != h.order or g.order_profile() != h.order_profile():
        return False, None
    n = g.order
    gens = g.small_generating_set()
    # words: each element reached from an earlier one by one generator
    parent = {0: (None, None)}
    bfs = [0]
    for x in bfs:
        for s in gens:
            y = int(g.mul[x, s])
            if y not in parent:
                parent[y] = (x, s)
                bfs.append(y)
    cands = [[b for b in range(n) if h.element_orders[b] == g.element_orders[s]] for s in gens]

    def extend(images: list[int]) -> list[int] | None:
        if len(images) < len(gens):
            for b in cands[len(images)]:
                if b in images:
                    continue
                res = extend(images + [b])
                if res is not None:
                    return res
            return None
        img = dict(zip(gens, images))
        phi = np.full(n, -1, dtype=np.int64)
        phi[0] = 0
        for y in bfs[1:]:
            x, s = parent[y]
            phi[y] = h.mul[phi[x], img[s]]
        if len(np.unique(phi)) != n:
            return None
        if not np.array_equal(phi[g.mul], h.mul[phi[:, None], phi[None, :]]):
            return None
        return phi.tolist()

    phi = extend([])
    return (phi is not None), phi


def group_from_automorphisms(perms: Sequence[np.ndarray], name: str = "Aut") -> FiniteGroup:
    """Multiplication table of an explicitly enumerated permutation group."""
    perms = [np.asarray(p, dtype=np.int64) for p in perms]
    if not perms:
        raise GroupError("no elements")
    degree = len(perms[0])
    ident = np.arange(degree)
    keys = [p.tobytes() for p in perms]
    index = {k: i for i, k in enumerate(keys)}
    if ident.tobytes() not in index:
        raise GroupError("identity missing")
    # put identity first
    i0 = index[ident.tobytes()]
    order = [i0] + [i for i in range(len(perms)) if i != i0]
    perms = [perms[i] for i in order]
    index = {p.tobytes(): i for i, p in enumerate(perms)}
    n = len(perms)
    mul = np.empty((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            k = perms[a][perms[b]].tobytes()
            if k not in index:
                raise GroupError("element set is not closed")
            mul[a, b] = index[k]
    return FiniteGroup(mul, name)
