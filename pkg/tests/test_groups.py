from itertools import combinations, permutations, product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from forge.aut import label_preserving_automorphisms
from forge.groups import (
    NAMED_GROUPS,
    GroupError,
    cayley_graph,
    cyclic_group,
    direct_product,
    group_from_permutations,
    group_from_table,
    groups_isomorphic,
    load_group,
    named_group,
    normalize_generating_set,
)


def brute_closure(degree, gens):
    ident = tuple(range(degree))
    seen = {ident}
    todo = [ident]
    while todo:
        p = todo.pop()
        for g in gens:
            q = tuple(g[p[i]] for i in range(degree))
            if q not in seen:
                seen.add(q)
                todo.append(q)
    return seen


def brute_iso(g, h):
    """Search all bijections fixing the identity (small orders only)."""
    n = g.order
    if n != h.order:
        return False
    for rest in permutations(range(1, n)):
        phi = (0,) + rest
        if all(phi[g.mul[a, b]] == h.mul[phi[a], phi[b]] for a in range(n) for b in range(n)):
            return True
    return False


def test_perm_closure_examples():
    assert group_from_permutations(2, [[1, 0]]).order == 2
    s3 = group_from_permutations(3, [[1, 0, 2], [1, 2, 0]])
    assert s3.order == 6 == len(brute_closure(3, [(1, 0, 2), (1, 2, 0)]))
    assert groups_isomorphic(s3, named_group("S3"))[0]
    assert group_from_permutations(3, []).order == 1


def test_perm_closure_cap():
    # S7 has 5040 elements
    with pytest.raises(GroupError, match="group too large"):
        group_from_permutations(7, [[1, 0, 2, 3, 4, 5, 6], [1, 2, 3, 4, 5, 6, 0]])


def test_perm_rejects_non_bijection():
    with pytest.raises(GroupError):
        group_from_permutations(3, [[0, 0, 1]])


@pytest.mark.parametrize("name", NAMED_GROUPS)
def test_named_groups_are_groups(name):
    g = named_group(name)
    n = g.order
    m = g.mul
    assert np.array_equal(m[0], np.arange(n)) and np.array_equal(m[:, 0], np.arange(n))
    for a, b, c in product(range(n), repeat=3):
        assert m[m[a, b], c] == m[a, m[b, c]]
    assert all((m[a] == 0).any() for a in range(n))


@pytest.mark.parametrize("degree,gens", [
    (3, [(1, 0, 2), (1, 2, 0)]),
    (4, [(1, 2, 3, 0), (3, 2, 1, 0)]),
    (4, [(1, 0, 3, 2), (2, 3, 0, 1)]),
    (5, [(1, 2, 3, 4, 0)]),
])
def test_perm_group_orders_match_brute_force(degree, gens):
    assert group_from_permutations(degree, gens).order == len(brute_closure(degree, gens))


def test_table_rejects_non_group():
    with pytest.raises(GroupError):
        group_from_table([[0, 1], [1, 1]])


def test_load_group_forms():
    assert load_group("S3").order == 6
    assert load_group({"kind": "perm", "degree": 3, "gens": [[1, 0, 2]]}).order == 2
    c3 = cyclic_group(3)
    assert load_group({"kind": "table", "order": 3, "mul": c3.mul.tolist()}).order == 3


def _valid(g, s):
    return all(g.inverse(a) not in s or g.is_involution(a) for a in s)


def _oracle_padding(g, s0):
    """Smallest, then lexicographically least, inverse-pair-free superset of valence >= 3."""
    kept = []
    for a in s0:
        if a not in kept and g.inverse(a) not in kept:
            kept.append(a)
    others = [c for c in range(1, g.order) if c not in kept]
    for k in range(0, len(others) + 1):
        for extra in combinations(others, k):
            s = kept + list(extra)
            if not _valid(g, s):
                continue
            deg = sum(1 if g.is_involution(a) else 2 for a in s)
            if deg >= 3:
                return sorted(s)
    return None


def test_normalize_c5_example():
    g = named_group("C5")
    gs = normalize_generating_set(g, [1, 4])
    assert sorted(gs.gens) == _oracle_padding(g, [1, 4]) == [1, 2]
    assert gs.degree == 4


@pytest.mark.parametrize("name", ["C4", "C5", "C6", "C7", "C8", "S3", "D4", "Q8", "C2xC2", "C12"])
def test_normalize_matches_oracle(name):
    g = named_group(name)
    gs = normalize_generating_set(g)
    assert _valid(g, gs.gens)
    assert g.generates(gs.gens)
    assert gs.degree >= 3
    assert sorted(gs.gens) == _oracle_padding(g, list(g.default_generators))


def test_normalize_involutions_unchanged():
    g = named_group("C2xC2")
    invs = [a for a in range(1, 4)]
    assert sorted(normalize_generating_set(g, invs).gens) == invs


def test_normalize_errors():
    with pytest.raises(GroupError):
        normalize_generating_set(named_group("S3"), [1])
    with pytest.raises(GroupError, match="use small-group path"):
        normalize_generating_set(named_group("C3"), [1])


def test_cayley_examples():
    c3 = named_group("C3")
    from forge.groups import GeneratingSet

    lg = cayley_graph(c3, GeneratingSet((1,), (), (1,)))
    assert lg.base.m == 3 and all(l.direction is not None for _, l in lg.labels)
    lg = cayley_graph(named_group("C2"), GeneratingSet((1,), (1,), ()))
    assert lg.base.m == 1 and lg.labels[0][1].direction is None
    s3 = group_from_permutations(3, [[1, 0, 2], [1, 2, 0]])
    gs = normalize_generating_set(s3, list(s3.default_generators))
    lg = cayley_graph(s3, gs)
    undirected = sum(1 for _, l in lg.labels if l.direction is None)
    assert (lg.n, undirected, lg.base.m - undirected) == (6, 3, 6)


@pytest.mark.parametrize("name", ["C4", "C5", "C6", "S3", "D4", "Q8", "C2xC2", "C9"])
def test_cayley_degree_and_translations(name):
    g = named_group(name)
    gs = normalize_generating_set(g)
    lg = cayley_graph(g, gs)
    assert set(lg.base.degrees) == {gs.degree}
    for x in range(g.order):
        for a in gs.gens:
            y = int(g.mul[x, a])
            lab = lg.label_map[(min(x, y), max(x, y))]
            assert lab.label == f"s{a}"
            if not g.is_involution(a):
                assert lab.direction == (x, y)
    assert label_preserving_automorphisms(lg).order == g.order


def test_isomorphism_examples():
    assert groups_isomorphic(named_group("C4"), named_group("C2xC2")) == (False, None)
    d3 = group_from_permutations(3, [[0, 2, 1], [1, 2, 0]])
    ok, phi = groups_isomorphic(named_group("S3"), d3)
    assert ok and brute_iso(named_group("S3"), d3)
    s3 = named_group("S3")
    assert all(phi[s3.mul[a, b]] == d3.mul[phi[a], phi[b]] for a in range(6) for b in range(6))
    ok, phi = groups_isomorphic(s3, s3)
    assert ok and sorted(phi) == list(range(6))


def test_isomorphism_cap():
    with pytest.raises(GroupError):
        groups_isomorphic(cyclic_group(10), cyclic_group(10), cap=5)


SMALL = ["trivial", "C2", "C3", "C4", "C2xC2", "C5", "C6", "S3", "C7", "C8", "D4", "Q8"]


@pytest.mark.parametrize("a,b", list(combinations(SMALL, 2)))
def test_isomorphism_matches_brute_force(a, b):
    g, h = named_group(a), named_group(b)
    assert groups_isomorphic(g, h)[0] == brute_iso(g, h)
    assert groups_isomorphic(h, g)[0] == groups_isomorphic(g, h)[0]


def test_direct_product_c2_c3_is_c6():
    assert groups_isomorphic(direct_product(cyclic_group(2), cyclic_group(3)), cyclic_group(6))[0]


@given(st.sampled_from(SMALL), st.randoms(use_true_random=False))
def test_isomorphism_under_relabelling(name, rnd):
    g = named_group(name)
    n = g.order
    perm = [0] + rnd.sample(range(1, n), n - 1)
    inv = np.argsort(perm)
    mul = [[perm[g.mul[inv[a], inv[b]]] for b in range(n)] for a in range(n)]
    h = group_from_table(mul)
    ok, phi = groups_isomorphic(g, h)
    assert ok
    assert all(phi[g.mul[a, b]] == h.mul[phi[a], phi[b]] for a in range(n) for b in range(n))
