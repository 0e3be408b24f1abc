import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from networkx.algorithms.isomorphism import GraphMatcher

from conftest import to_nx
from forge.aut import automorphism_group, graphs_isomorphic, is_edge_free, is_vertex_free, label_preserving_automorphisms
from forge.graph import Graph, block_decomposition, clique_graph, cliques_of_size
from forge.groups import GeneratingSet, cayley_graph, named_group, normalize_generating_set
from forge.synth import (
    DESIGNS,
    GateError,
    PendantError,
    TagSpec,
    asymmetric_pendant,
    blow_up_labelled,
    build_rigid_graph,
    certify_gadget,
    check_degree,
    d_regularize,
    default_pendant_orders,
    frucht_graph,
    gadget_directed,
    gadget_undirected,
    p_gadget,
    reserve_words,
    small_group_base,
    tag_graph,
    three_regularize,
    verify_block_design,
    verify_tag_family,
    verify_graph,
)
from forge.synth.regularize import random_degree_sequence_graph
from forge.synth.tags import tag_size


def nx_aut_count(g: Graph, colors=None) -> int:
    h = to_nx(g)
    if colors is not None:
        nx.set_node_attributes(h, dict(enumerate(colors)), "c")
        gm = GraphMatcher(h, h, node_match=lambda a, b: a["c"] == b["c"])
    else:
        gm = GraphMatcher(h, h)
    return sum(1 for _ in gm.isomorphisms_iter())


def test_frucht_is_rigid_cubic():
    g = frucht_graph()
    assert g.n == 12 and g.is_regular(3)
    assert nx.is_isomorphic(to_nx(g), nx.frucht_graph())


def test_reference_design_blocks():
    rep = verify_block_design("ref")
    assert rep["passed"] and not rep["bitsIsomorphic"]
    d = DESIGNS["ref"]
    # rigid once the ports are pinned
    for blk in (d.bit0, d.bit1):
        assert nx_aut_count(blk, ["in", "out"] + ["x"] * (blk.n - 2)) == 1
    assert nx_aut_count(d.cap, ["port"] + ["x"] * (d.cap.n - 1)) == 1
    assert (d.bit0.n, d.bit1.n, d.cap.n) == (6, 8, 9)


def test_symmetric_design_is_rejected():
    with pytest.raises(GateError) as err:
        verify_tag_family(["0000", "0101"], "symmetric")
    assert err.value.report["check"] == "asymmetry"


def test_tag_family_duplicates_rejected():
    with pytest.raises(GateError, match="duplicate"):
        verify_tag_family(["0101", "0101"])


def test_tag_structure():
    tag = tag_graph(TagSpec("0110"))
    g = tag.graph
    # tag_size excludes the leaf, which a hung tag shares with its host
    assert g.n == 1 + tag_size("0110") == 1 + 2 * 6 + 2 * 8 + 9
    assert [v for v in range(g.n) if g.degrees[v] == 1] == [tag.leaf]
    assert g.is_connected()


def test_single_bit_tag():
    tag = tag_graph(TagSpec("1"))
    assert tag.graph.n == 1 + 8 + 9
    assert [v for v in range(tag.graph.n) if tag.graph.degrees[v] == 1] == [tag.leaf]
    assert all(k == 3 for v, k in enumerate(tag.graph.degrees) if v != tag.leaf)


def test_reversed_words_give_distinct_tags():
    a, b = tag_graph(TagSpec("01")).graph, tag_graph(TagSpec("10")).graph
    assert not graphs_isomorphic(a, b)[0]
    assert not nx.is_isomorphic(to_nx(a), to_nx(b))


def test_tag_spec_rejects_bad_words():
    with pytest.raises(ValueError):
        TagSpec("01a")
    with pytest.raises(ValueError):
        TagSpec("")


def test_tag_family_against_networkx():
    words = [format(i, "04b") for i in range(16)]
    rep = verify_tag_family(words)
    assert rep["passed"]
    graphs = [tag_graph(TagSpec(w)).graph for w in words]
    assert all(nx_aut_count(g) == 1 for g in graphs)
    hs = [to_nx(g) for g in graphs]
    for i in range(16):
        for j in range(i + 1, 16):
            assert not nx.is_isomorphic(hs[i], hs[j])


@given(st.lists(st.tuples(st.sampled_from("abcdefgh"), st.booleans()), min_size=1, max_size=8), st.integers(0, 4))
def test_reservation_properties(labels, seed):
    res = reserve_words(labels, seed)
    words = [w for _, w in res.words]
    p = len(words)
    assert len(set(words)) == p
    assert all(len(w) == res.length and w != "1" * res.length for w in words)
    assert res.length >= int(np.ceil(np.log2(p))) + 1
    assert (seed + 1) * p <= 2**res.length - 1
    toks = sorted(set(labels))
    assert p == sum(3 if directed else 2 for _, directed in toks)


def test_reservation_seeds_disjoint():
    labels = [("a", True), ("b", False)]
    a, b = reserve_words(labels, 0), reserve_words(labels, 1)
    assert a.length == b.length == 4
    assert not {w for _, w in a.words} & {w for _, w in b.words}


def test_reservation_example():
    res = reserve_words([("a", True), ("b", False)], 0)
    assert res.to_json()["words"] == [
        ["a", "SRC", "0000"], ["a", "MID", "0001"], ["a", "TGT", "0010"], ["b", "A", "0100"], ["b", "B", "1000"]
    ]


def test_gadgets_certify():
    res = reserve_words([("a", True), ("b", False)], 0)
    d = gadget_directed("a", res)
    u = gadget_undirected("b", res)
    rd, ru = certify_gadget(d), certify_gadget(u)
    assert rd["passed"] and ru["passed"]
    assert (rd["pairedOrder"], ru["pairedOrder"]) == (1, 2)
    assert ru["portSwap"] and ru["fixedPoints"] == 0 and ru["invertedEdges"] == 0
    # independent count with the ports pinned and with the ports as a pair
    for frag, paired in ((d, 1), (u, 2)):
        a, b = frag.ports
        pin = ["x"] * frag.graph.n
        pin[a], pin[b] = "a", "b"
        pair = ["x"] * frag.graph.n
        pair[a] = pair[b] = "p"
        assert nx_aut_count(frag.graph, pin) == 1
        assert nx_aut_count(frag.graph, pair) == paired
        degs = frag.graph.degrees
        assert degs[a] == degs[b] == 2
        assert all(k == 3 for v, k in enumerate(degs) if v not in frag.ports)


def test_three_regularize_c7():
    # valence 6 from three non-involutions; each vertex becomes a path of 4
    g = named_group("C7")
    lg = cayley_graph(g, GeneratingSet((1, 2, 3), (), (1, 2, 3)))
    l3 = three_regularize(lg)
    assert l3.n == 7 * 4 and l3.base.is_regular(3)
    grp = label_preserving_automorphisms(l3)
    assert grp.order == 7 and is_vertex_free(l3.base, grp)
    assert set(l3.label_tokens()) == {"1", "2", "3", "s1", "s2", "s3"}
    # vertex x maps to x*4 .. x*4+3, joined by path edges
    for x in range(7):
        for i in range(3):
            assert l3.base.has_edge(4 * x + i, 4 * x + i + 1)


def test_three_regularize_cubic_unchanged():
    g = named_group("S3")
    lg = cayley_graph(g, normalize_generating_set(g))
    assert three_regularize(lg) is lg


def test_three_regularize_rejects_low_valence():
    g = named_group("C4")
    lg = cayley_graph(g, GeneratingSet((1,), (), (1,)))
    with pytest.raises(ValueError):
        three_regularize(lg)


def test_blow_up_cycle_c4():
    # 2-regular input: original vertices keep degree 2
    g = named_group("C4")
    lg = cayley_graph(g, GeneratingSet((1,), (), (1,)))
    res = reserve_words([("s1", True)], 0)
    built = blow_up_labelled(lg, res, require_cubic=False)
    out = built.graph
    grp = automorphism_group(out)
    assert grp.order == 4
    assert is_vertex_free(out, grp) and is_edge_free(out, grp)
    assert [out.degrees[v] for v in range(4)] == [2, 2, 2, 2]
    with pytest.raises(ValueError):
        blow_up_labelled(lg, res)


def test_blow_up_missing_word():
    g = named_group("S3")
    lg = cayley_graph(g, normalize_generating_set(g))
    with pytest.raises(ValueError, match="no word reserved"):
        blow_up_labelled(lg, reserve_words([("zz", True)], 0))


@pytest.mark.parametrize("order", [1, 2, 3])
def test_small_group_base(order):
    built = small_group_base(order, 0)
    g = built.graph
    grp = automorphism_group(g)
    assert grp.order == order
    assert g.is_regular(3) and g.is_connected()
    assert is_vertex_free(g, grp) and is_edge_free(g, grp)
    if g.n <= 80:
        assert nx_aut_count(g) == order


def test_random_degree_sequence():
    rng = np.random.default_rng(1)
    g = random_degree_sequence_graph([3] * 10, rng, attempts=50)
    assert g is not None and g.is_regular(3)
    with pytest.raises(ValueError, match="not graphical"):
        random_degree_sequence_graph([3, 3, 3], rng, attempts=5)


def test_pendant_small():
    p = asymmetric_pendant(5, 9, 0)
    g = p.graph
    assert g.n == 9 and g.degrees[p.root] == 4
    assert all(k == 5 for v, k in enumerate(g.degrees) if v != p.root)
    assert g.is_connected()
    assert not cliques_of_size(g, 5)
    assert nx_aut_count(g) == 1


def test_pendant_errors():
    with pytest.raises(ValueError, match="odd"):
        asymmetric_pendant(5, 10)
    with pytest.raises(ValueError, match="at least"):
        asymmetric_pendant(5, 5)


def test_pendant_d_plus_two_is_impossible():
    # the complement of a (d-1, d, ..., d) graph on d+2 vertices is a perfect
    # matching plus an isolated vertex, so the graph always has symmetries
    with pytest.raises(PendantError) as err:
        asymmetric_pendant(5, 7, 0, retries=50)
    assert "attempts" in err.value.stats
    assert err.value.stats.get("symmetric", 0) + err.value.stats.get("pairingFailed", 0) == 50


def test_p_gadget_d5():
    p = p_gadget(5)
    cert = p.certificate
    assert cert["passed"] and cert["autOrder"] == 6
    assert cert["lowDegree"] == [0, 1, 2] and cert["cliques"] == [[0, 1, 2, 3, 4]]
    assert default_pendant_orders(5) == (9, 11)
    assert p.graph.n == 5 + 9 + 11
    assert p.us == (0, 1, 2)


def test_d_regularize_d5():
    base = small_group_base(2, 0).graph
    p = p_gadget(5)
    out = d_regularize(base, 5, gadget=p)
    assert out.n == base.n * p.graph.n and out.is_regular(5)
    grp = automorphism_group(out)
    assert grp.order == 2 and is_edge_free(out, grp)
    assert graphs_isomorphic(clique_graph(out, 5), base)[0]


@pytest.mark.parametrize("d", [4, 6, 10])
def test_even_degree_rejected(d):
    with pytest.raises(ValueError, match="parity obstruction"):
        check_degree(d)


def test_pipeline_c5_and_verify():
    group = named_group("C5")
    g, cert = build_rigid_graph(group, 3, 0)
    assert cert.passed and not cert.failed_gates
    rep = verify_graph(group, g)
    assert rep["passed"] and rep["witness"]["isomorphic"]
    assert not verify_graph(named_group("C6"), g)["passed"]
    assert cert.to_json() == build_rigid_graph(group, 3, 0)[1].to_json()


def test_pipeline_ledger_blocks_lie_in_regions():
    g, cert = build_rigid_graph(named_group("C2xC2"), 3, 0)
    led = cert.hyperbolicity
    assert led["allExhaustive"] and led["max"] <= 10
    assert led["blocks"] and all(b["exhaustive"] for b in led["blocks"])
    bd = block_decomposition(g)
    assert len(bd.blocks) >= len(led["blocks"])


def test_pipeline_group_cap():
    from forge.groups import cyclic_group

    with pytest.raises(ValueError):
        build_rigid_graph(cyclic_group(65), 3, 0)
