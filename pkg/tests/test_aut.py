import math
import random

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from networkx.algorithms.isomorphism import GraphMatcher

from conftest import from_nx, graphs, to_nx
from forge.aut import (
    AutError,
    aut_certificate,
    automorphism_group,
    graphs_isomorphic,
    is_edge_free,
    is_vertex_free,
    label_preserving_automorphisms,
)
from forge.graph import Graph, LabelledGraph, complete_graph, cycle_graph
from forge.groups import GeneratingSet, cayley_graph, group_from_permutations, named_group, normalize_generating_set
from forge.synth.blocks import frucht_graph


def nx_aut_count(g: Graph) -> int:
    h = to_nx(g)
    return sum(1 for _ in GraphMatcher(h, h).isomorphisms_iter())


def is_automorphism(g: Graph, p) -> bool:
    return {tuple(sorted((int(p[u]), int(p[v])))) for u, v in g.edges} == set(g.edges)


def test_examples():
    assert automorphism_group(cycle_graph(5)).order == 10
    assert automorphism_group(complete_graph(4)).order == 24
    frucht = frucht_graph()
    assert automorphism_group(frucht).order == 1 == nx_aut_count(frucht)


@pytest.mark.parametrize("name,h,order", [
    ("petersen", nx.petersen_graph(), 120),
    ("cube", nx.hypercube_graph(3), 48),
    ("heawood", nx.heawood_graph(), 336),
    ("dodecahedron", nx.dodecahedral_graph(), 120),
    ("K33", nx.complete_bipartite_graph(3, 3), 72),
    ("desargues", nx.desargues_graph(), 240),
    ("Q4", nx.hypercube_graph(4), 384),
    ("empty4", nx.empty_graph(4), 24),
])
def test_known_orders(name, h, order):
    grp = automorphism_group(from_nx(h))
    assert grp.order == order


@pytest.mark.parametrize("n", [3, 4, 7, 10, 13])
def test_closed_forms(n):
    assert automorphism_group(cycle_graph(n)).order == 2 * n
    if n <= 7:
        assert automorphism_group(complete_graph(n)).order == math.factorial(n)


@given(graphs(max_n=8))
def test_order_matches_networkx(g):
    grp = automorphism_group(g)
    assert grp.order == nx_aut_count(g)
    assert all(is_automorphism(g, p) for p in grp.generators)
    assert math.factorial(g.n) % grp.order == 0


@given(graphs(min_n=2, max_n=8))
def test_orbit_stabilizer(g):
    grp = automorphism_group(g)
    orbits = grp.vertex_orbits()
    elems = grp.elements()
    for v in range(g.n):
        stab = sum(1 for p in elems if p[v] == v)
        assert int(np.sum(orbits == orbits[v])) * stab == grp.order


def test_randomized_self_test():
    rnd = random.Random(0)
    for seed in range(100):
        n = rnd.randint(2, 40)
        h = nx.gnp_random_graph(n, rnd.uniform(0.05, 0.5), seed=seed)
        g = from_nx(h)
        perm = list(range(n))
        rnd.shuffle(perm)
        pg = g.relabel(perm)
        ok, phi = graphs_isomorphic(g, pg)
        assert ok
        assert {tuple(sorted((phi[u], phi[v]))) for u, v in g.edges} == set(pg.edges)
        assert automorphism_group(g).order == automorphism_group(pg).order


def test_isomorphism_examples():
    two_triangles = Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    assert graphs_isomorphic(cycle_graph(6), two_triangles) == (False, None)
    kneser = nx.kneser_graph(5, 2)
    ok, _ = graphs_isomorphic(from_nx(nx.petersen_graph()), from_nx(kneser))
    assert ok and nx.is_isomorphic(nx.petersen_graph(), kneser)


def test_isomorphism_vs_networkx():
    bad = 0
    for seed in range(150):
        rnd = random.Random(seed)
        n = rnd.randint(1, 9)
        p = rnd.random()
        a = nx.gnp_random_graph(n, p, seed=seed)
        b = nx.gnp_random_graph(n, p, seed=seed + 1000)
        bad += graphs_isomorphic(from_nx(a), from_nx(b))[0] != nx.is_isomorphic(a, b)
    assert bad == 0


def test_labelled_examples():
    c4 = named_group("C4")
    lg = cayley_graph(c4, GeneratingSet((1,), (), (1,)))
    assert label_preserving_automorphisms(lg).order == 4
    plain = LabelledGraph(cycle_graph(4))
    assert label_preserving_automorphisms(plain).order == 8
    s3 = group_from_permutations(3, [[1, 0, 2], [1, 2, 0]])
    lg = cayley_graph(s3, normalize_generating_set(s3, [1, 2]))
    assert label_preserving_automorphisms(lg).order == 6


def test_orientation_matters():
    # directed triangle keeps only rotations; undirected labels keep reflections too
    directed = LabelledGraph.build(3, [(0, 1, "a", True), (1, 2, "a", True), (2, 0, "a", True)])
    undirected = LabelledGraph.build(3, [(0, 1, "a", False), (1, 2, "a", False), (2, 0, "a", False)])
    assert label_preserving_automorphisms(directed).order == 3
    assert label_preserving_automorphisms(undirected).order == 6


def test_freeness_examples():
    frucht = frucht_graph()
    assert is_vertex_free(frucht) and is_edge_free(frucht)
    assert not is_vertex_free(cycle_graph(4))
    k2 = Graph.from_edges(2, [(0, 1)])
    assert not is_edge_free(k2)


@given(graphs(min_n=2, max_n=7))
def test_freeness_by_enumeration(g):
    grp = automorphism_group(g)
    elems = grp.elements()
    nontrivial = [p for p in elems if not np.array_equal(p, np.arange(g.n))]
    vfree = all(p[v] != v for p in nontrivial for v in range(g.n))
    efree = all({p[u], p[v]} != {u, v} for p in nontrivial for u, v in g.edges)
    assert is_vertex_free(g, grp) == vfree
    assert is_edge_free(g, grp) == efree


def test_certificate_json():
    cert = aut_certificate(cycle_graph(5))
    assert cert["order"] == 10
    assert set(cert) == {"order", "generators", "vertexFree", "edgeFree", "elapsedMs"}


def test_vertex_cap():
    with pytest.raises(AutError):
        automorphism_group(cycle_graph(50), cap=10)


def test_colours_restrict_group():
    assert automorphism_group(cycle_graph(6), colors=[0, 1, 0, 1, 0, 1]).order == 6
    assert automorphism_group(cycle_graph(6), colors=[1, 0, 0, 0, 0, 0]).order == 2


def test_generators_deterministic():
    h = from_nx(nx.petersen_graph())
    a = automorphism_group(h).generator_lists()
    b = automorphism_group(h).generator_lists()
    assert a == b


def test_large_random_regular():
    g = from_nx(nx.random_regular_graph(3, 2000, seed=3))
    grp = automorphism_group(g)
    assert all(is_automorphism(g, p) for p in grp.generators)
    assert grp.order == 1
