"""Tag graphs: rigid pendant chains spelling a binary word, and word reservations."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from ..aut import automorphism_group, graphs_isomorphic
from ..graph import Graph
from .assembly import Assembly
from .blocks import BlockDesign, get_design

__all__ = [
    "GateError",
    "TagSpec",
    "Tag",
    "tag_graph",
    "hang_tag",
    "tag_size",
    "verify_block_design",
    "verify_tag_family",
    "DIRECTED_ROLES",
    "UNDIRECTED_ROLES",
    "WordReservation",
    "reserve_words",
]


class GateError(RuntimeError):
    """A certification gate failed.  ``report`` says which check and where."""

    def __init__(self, msg: str, report: dict | None = None):
        super().__init__(msg)
        self.report = report or {}


@dataclass(frozen=True)
class TagSpec:
    word: str
    design: str = "ref"

    def __post_init__(self) -> None:
        if not self.word or set(self.word) - {"0", "1"}:
            raise ValueError(f"tag word must be a nonempty binary string, got {self.word!r}")
        get_design(self.design)


@dataclass(frozen=True)
class Tag:
    graph: Graph
    leaf: int
    spec: TagSpec


def _chain(asm: Assembly, anchor: int, word: str, design: BlockDesign, prov: tuple, regions) -> None:
    """Append the block chain for ``word`` below ``anchor`` (the leaf position)."""
    prev = anchor
    for i, b in enumerate(word):
        blk = design.bit(b)
        ids = asm.embed(blk, prov + (f"bit{i}:{b}",), regions)
        asm.edge(prev, ids[0])
        prev = ids[1]
    ids = asm.embed(design.cap, prov + ("cap",), regions)
    asm.edge(prev, ids[0])


def tag_graph(spec: TagSpec) -> Tag:
    """Leaf (vertex 0), then the bit blocks in word order, then the cap."""
    asm = Assembly()
    leaf = asm.vertex(("leaf",))
    _chain(asm, leaf, spec.word, get_design(spec.design), (), ())
    return Tag(asm.build().graph, leaf, spec)


def hang_tag(asm: Assembly, host: int, spec: TagSpec, name: str) -> None:
    """Attach a tag whose leaf is identified with ``host``."""
    _chain(asm, host, spec.word, get_design(spec.design), ("tag", name), (name,))


def tag_size(word: str, design: str = "ref") -> int:
    """Vertices a hung tag adds (the leaf is shared with its host)."""
    d = get_design(design)
    return sum(d.bit(b).n for b in word) + d.cap.n


# -- gates ----------------------------------------------------------------------


def verify_block_design(design: str) -> dict:
    """Bit blocks rigid with ports pinned and distinguishable; cap rigid."""
    d = get_design(design)
    out: dict = {"design": design}
    for name, blk in (("bit0", d.bit0), ("bit1", d.bit1)):
        cols = ["in", "out"] + ["inner"] * (blk.n - 2)
        out[name] = automorphism_group(blk, cols).order
    cap_cols = ["port"] + ["inner"] * (d.cap.n - 1)
    out["cap"] = automorphism_group(d.cap, cap_cols).order
    if d.bit0.n == d.bit1.n:
        c = ["in", "out"] + ["inner"] * (d.bit0.n - 2)
        out["bitsIsomorphic"] = graphs_isomorphic(d.bit0, d.bit1, c, c)[0]
    else:
        out["bitsIsomorphic"] = False
    out["passed"] = out["bit0"] == out["bit1"] == out["cap"] == 1 and not out["bitsIsomorphic"]
    return out


def verify_tag_family(words: Sequence[str], design: str = "ref") -> dict:
    """Certify a family of tags: each rigid with one leaf, pairwise non-isomorphic.

    Raises :class:`GateError` naming the offending words.
    """
    seen: dict[str, int] = {}
    for w in words:
        if w in seen:
            raise GateError(f"duplicate word {w!r}", {"check": "duplicate", "words": [w]})
        seen[w] = 1
    tags = [tag_graph(TagSpec(w, design)) for w in words]
    orders = {}
    for w, t in zip(words, tags):
        leaves = [v for v, k in enumerate(t.graph.degrees) if k == 1]
        if leaves != [t.leaf] or any(k not in (1, 3) for k in t.graph.degrees):
            raise GateError(f"tag {w!r} does not have a unique leaf", {"check": "leaf", "words": [w]})
        orders[w] = automorphism_group(t.graph).order
        if orders[w] != 1:
            raise GateError(
                f"tag {w!r} has a symmetry (|Aut| = {orders[w]})",
                {"check": "asymmetry", "words": [w], "order": orders[w]},
            )
    pairs = 0
    for (w1, t1), (w2, t2) in combinations(zip(words, tags), 2):
        if t1.graph.n != t2.graph.n or t1.graph.m != t2.graph.m:
            continue
        pairs += 1
        if graphs_isomorphic(t1.graph, t2.graph)[0]:
            raise GateError(
                f"tags {w1!r} and {w2!r} are isomorphic",
                {"check": "non-isomorphism", "words": [w1, w2]},
            )
    return {
        "design": design,
        "words": list(words),
        "autOrders": orders,
        "isomorphismTests": pairs,
        "passed": True,
    }


# -- word reservation ---------------------------------------------------------------

DIRECTED_ROLES = ("SRC", "MID", "TGT")
UNDIRECTED_ROLES = ("A", "B")


@dataclass(frozen=True)
class WordReservation:
    """Injective map ``(label token, role) -> word``, none of them all-ones."""

    words: tuple[tuple[tuple[str, str], str], ...]
    length: int
    seed: int = 0
    design: str = "ref"

    def __post_init__(self) -> None:
        vals = [w for _, w in self.words]
        if len(set(vals)) != len(vals):
            raise ValueError("reservation is not injective")
        for w in vals:
            if len(w) != self.length or set(w) == {"1"}:
                raise ValueError(f"bad reserved word {w!r}")

    @property
    def table(self) -> dict[tuple[str, str], str]:
        return dict(self.words)

    def word(self, token: str, role: str) -> str:
        try:
            return self.table[(token, role)]
        except KeyError:
            raise KeyError(f"no word reserved for label {token!r} role {role}") from None

    def spec(self, token: str, role: str) -> TagSpec:
        return TagSpec(self.word(token, role), self.design)

    def to_json(self) -> dict:
        return {
            "length": self.length,
            "seed": self.seed,
            "design": self.design,
            "words": [[t, r, w] for (t, r), w in self.words],
        }


def reserve_words(
    labels: Iterable[tuple[str, bool]], seed: int = 0, design: str = "ref"
) -> WordReservation:
    """Reserve words for every ``(token, directed)`` label.

    All words share one length ``L``.  Candidates are the ``L``-bit words
    other than all-ones, ordered by (number of ones, value); seed ``s``
    takes the ``s``-th run of ``P`` candidates, so different seeds never
    share a word.
    """
    if seed < 0:
        raise ValueError("seed must be non-negative")
    pairs: list[tuple[str, str]] = []
    for token, directed in sorted(set(labels)):
        roles = DIRECTED_ROLES if directed else UNDIRECTED_ROLES
        pairs += [(token, r) for r in roles]
    p = len(pairs)
    if p == 0:
        return WordReservation((), 1, seed, design)
    length = max(1, math.ceil(math.log2(p))) + 1
    while (seed + 1) * p > 2**length - 1:
        length += 1
    cands = sorted(range(2**length - 1), key=lambda x: (bin(x).count("1"), x))
    chosen = cands[seed * p : (seed + 1) * p]
    words = tuple((pr, format(x, f"0{length}b")) for pr, x in zip(pairs, chosen))
    return WordReservation(words, length, seed, design)
