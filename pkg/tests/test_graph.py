import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import from_nx, graphs, to_nx
from forge.graph import (
    Graph,
    GraphError,
    LabelledGraph,
    block_decomposition,
    clique_graph,
    cliques_of_size,
    complete_graph,
    cycle_graph,
    path_graph,
    validate_graph,
)
from forge.synth.blocks import frucht_graph

clique_d = st.integers(2, 5)


def test_validate_triangle():
    rep = validate_graph(complete_graph(3))
    assert rep["simplicial"] and rep["connected"]
    assert rep["degrees"] == [2, 2, 2]
    assert rep["violations"] == []


def test_validate_duplicate_edge():
    rep = validate_graph((2, [(0, 1), (1, 0)]))
    assert not rep["simplicial"]
    assert any("duplicate edge" in v for v in rep["violations"])


def test_validate_loop_and_range():
    rep = validate_graph((3, [(0, 0), (1, 5)]))
    assert len(rep["violations"]) == 2


def test_validate_disjoint_edges():
    rep = validate_graph((4, [(0, 1), (2, 3)]))
    assert rep["connected"] is False
    assert rep["components"] == 2


def test_graph_rejects_loops():
    with pytest.raises(GraphError):
        Graph.from_edges(2, [(1, 1)])


def test_blocks_bowtie():
    g = Graph.from_edges(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])
    bd = block_decomposition(g)
    assert len(bd.blocks) == 2
    assert bd.cut_vertices == (2,)


def test_blocks_path():
    bd = block_decomposition(path_graph(4))
    assert len(bd.blocks) == 3
    assert all(len(b) == 2 for b in bd.blocks)


def test_blocks_frucht_single_block():
    g = frucht_graph()
    bd = block_decomposition(g)
    assert len(bd.blocks) == 1
    # independent check: no vertex deletion disconnects it
    assert all(g.remove_vertex(x).is_connected() for x in range(g.n))
    assert nx.is_biconnected(to_nx(g))


def test_blocks_disconnected():
    with pytest.raises(GraphError, match="graph not connected"):
        block_decomposition(Graph.from_edges(4, [(0, 1), (2, 3)]))


@given(graphs(min_n=2, max_n=10, connected=True))
def test_blocks_match_networkx(g):
    bd = block_decomposition(g)
    ours = sorted(tuple(sorted(b)) for b in bd.blocks)
    ref = sorted(tuple(sorted(c)) for c in nx.biconnected_components(to_nx(g)))
    assert ours == ref
    assert set(bd.cut_vertices) == set(nx.articulation_points(to_nx(g)))
    covered = set()
    for b in bd.blocks:
        sb = set(b)
        covered |= {e for e in g.edges if e[0] in sb and e[1] in sb}
    assert covered == set(g.edges)


@given(graphs(min_n=3, max_n=10, connected=True))
def test_cut_vertex_property(g):
    bd = block_decomposition(g)
    for x in range(g.n):
        comps = len(g.remove_vertex(x).components())
        assert (comps > 1) == (x in bd.cut_vertices)


def test_cliques_examples():
    assert cliques_of_size(complete_graph(4), 4) == [(0, 1, 2, 3)]
    assert cliques_of_size(cycle_graph(5), 3) == []
    assert len(cliques_of_size(complete_graph(4), 3)) == 4


def test_clique_size_bounds():
    with pytest.raises(GraphError):
        cliques_of_size(complete_graph(3), 1)
    with pytest.raises(GraphError):
        cliques_of_size(complete_graph(3), 17)


@given(graphs(max_n=9), clique_d)
def test_cliques_match_networkx(g, d):
    ours = sorted(cliques_of_size(g, d))
    ref = set()
    for c in nx.enumerate_all_cliques(to_nx(g)):
        if len(c) == d:
            ref.add(tuple(sorted(c)))
    assert ours == sorted(ref)
    assert len(set(ours)) == len(ours)


def test_clique_graph_two_k4():
    edges = list(complete_graph(4).edges) + [(u + 4, v + 4) for u, v in complete_graph(4).edges] + [(3, 4)]
    cg = clique_graph(Graph.from_edges(8, edges), 4)
    assert cg.n == 2 and cg.edges == ((0, 1),)


def test_clique_graph_empty():
    assert clique_graph(cycle_graph(6), 3).n == 0


@given(graphs(max_n=9), clique_d)
def test_clique_graph_edges_witnessed(g, d):
    cl = cliques_of_size(g, d)
    cg = clique_graph(g, d)
    assert cg.n == len(cl)
    for i in range(len(cl)):
        for j in range(i + 1, len(cl)):
            linked = any(a == b or g.has_edge(a, b) for a in cl[i] for b in cl[j])
            assert cg.has_edge(i, j) == linked


@given(graphs(max_n=10))
def test_json_round_trip(g):
    assert Graph.from_json(g.to_json()) == g
    data = g.to_json()
    assert data["edges"] == sorted(data["edges"])
    assert all(u < v for u, v in data["edges"])


def test_labelled_json_and_dot():
    lg = LabelledGraph.build(3, [(1, 0, "a", True), (1, 2, "b", False)])
    data = lg.to_json()
    assert data["labels"][0] == {"edge": [0, 1], "label": "a", "dir": [1, 0]}
    assert LabelledGraph.from_json(data) == lg
    dot = lg.to_dot()
    assert "1 -> 0" in dot and "dir=none" in dot


def test_labelled_orientation_must_match():
    base = Graph.from_edges(3, [(0, 1)])
    from forge.graph import EdgeLabel

    with pytest.raises(GraphError):
        LabelledGraph(base, (((0, 1), EdgeLabel("a", (0, 2))),))
    with pytest.raises(GraphError):
        LabelledGraph(base, (((1, 2), EdgeLabel("a")),))


def test_distance_matrix_matches_networkx():
    h = nx.petersen_graph()
    g = from_nx(h)
    dm = g.distance_matrix()
    ref = dict(nx.all_pairs_shortest_path_length(h))
    assert all(dm[u, v] == ref[u][v] for u in range(10) for v in range(10))
