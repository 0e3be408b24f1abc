from itertools import permutations

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import from_nx, graphs, to_nx
from forge.graph import complete_graph, cycle_graph, path_graph
from forge.metric import (
    MetricError,
    WeightedSpace,
    all_pairs,
    check_metric,
    coarse_components,
    coarse_separation_profile,
    four_point_delta,
    gromov_product,
    set_gromov_product,
    thin_triangle_delta,
)


def gp(dm, x, y, z):
    return (dm[x][z] + dm[y][z] - dm[x][y]) / 2


def brute_delta4(dm):
    """Direct scan over ordered quadruples."""
    n = len(dm)
    best = 0.0
    for x, y, z, w in permutations(range(n), 4):
        best = max(best, (min(gp(dm, x, y, w), gp(dm, y, z, w)) - gp(dm, x, z, w)) / 2)
    return best


def brute_thin(g):
    """Tripod fibres on the half-subdivided unit graph, all geodesics from networkx."""
    h = nx.Graph()
    for u, v in g.edges:
        h.add_edge(u, ("m", u, v))
        h.add_edge(("m", u, v), v)
    h.add_nodes_from(range(g.n))
    d2 = dict(nx.all_pairs_shortest_path_length(h))
    best = 0.0
    for x in range(g.n):
        for y in range(g.n):
            for z in range(y + 1, g.n):
                if x in (y, z):
                    continue
                k = d2[x][y] + d2[x][z] - d2[y][z]  # twice the Gromov product, in half-edges
                k //= 2
                for p in nx.all_shortest_paths(h, x, y):
                    for q in nx.all_shortest_paths(h, x, z):
                        for t in range(k + 1):
                            best = max(best, d2[p[t]][q[t]] / 2)
    return best


def tree_metrics():
    return st.integers(2, 12).flatmap(
        lambda n: st.lists(st.integers(0, 10**6), min_size=n - 1, max_size=n - 1).map(
            lambda ps: WeightedSpace.from_edges(n, [(i + 1, p % (i + 1), 1.0 + (p % 7) / 3) for i, p in enumerate(ps)])
        )
    )


def test_all_pairs_examples():
    assert all_pairs(path_graph(3))[0, 2] == 2
    tri = WeightedSpace.from_edges(3, [(0, 1, 1), (1, 2, 1), (0, 2, 5)])
    assert all_pairs(tri)[0, 2] == 2
    star = from_nx(nx.star_graph(4))
    dm = all_pairs(star)
    assert all(dm[a, b] == 2 for a in range(1, 5) for b in range(1, 5) if a != b)


def test_all_pairs_disconnected():
    with pytest.raises(MetricError):
        all_pairs(WeightedSpace.from_edges(3, [(0, 1, 1.0)]))


def test_weights_must_be_positive():
    with pytest.raises(MetricError):
        WeightedSpace.from_edges(2, [(0, 1, 0.0)])


@given(graphs(min_n=2, max_n=10, connected=True))
def test_all_pairs_matches_networkx(g):
    dm = all_pairs(g)
    ref = dict(nx.all_pairs_shortest_path_length(to_nx(g)))
    assert all(dm[u, v] == ref[u][v] for u in range(g.n) for v in range(g.n))
    assert check_metric(dm) == []


def test_json_round_trip():
    ws = WeightedSpace.from_edges(3, [(0, 1, 1.5), (1, 2, 2.0)])
    assert WeightedSpace.from_json(ws.to_json()).to_json() == ws.to_json()


def test_gromov_examples():
    dm = all_pairs(path_graph(4))
    assert gromov_product(dm, 0, 3, 0) == 0
    # binary tree of depth 2 rooted at 0: leaves 3,4 share parent 1
    tree = from_nx(nx.balanced_tree(2, 2))
    dt = all_pairs(tree)
    assert gromov_product(dt, 3, 5, 0) == 0
    assert gromov_product(dt, 3, 4, 0) == 1


@given(graphs(min_n=3, max_n=9, connected=True), st.data())
def test_gromov_identity_and_range(g, data):
    dm = all_pairs(g)
    x, y, z = (data.draw(st.integers(0, g.n - 1)) for _ in range(3))
    assert gromov_product(dm, x, y, z) + gromov_product(dm, x, z, y) == pytest.approx(dm[y, z], abs=1e-12)
    v = gromov_product(dm, x, y, z)
    assert -1e-12 <= v <= min(dm[x, z], dm[y, z]) + 1e-12


def test_set_gromov_examples():
    tree = from_nx(nx.balanced_tree(3, 3))
    dm = all_pairs(tree)
    assert set_gromov_product(dm, [0], [0], 0) == 0
    # rays 0-1-4-13 and 0-2-7-22 diverge at the root
    assert set_gromov_product(dm, [1, 4, 13], [2, 7, 22], 0) == 0
    # rays sharing the first edge 0-1
    assert set_gromov_product(dm, [1, 4, 13], [1, 5, 16], 0) == 1
    # sharing two edges
    assert set_gromov_product(dm, [1, 4, 13], [1, 4, 14], 0) == 2


def test_delta_examples():
    assert four_point_delta(all_pairs(from_nx(nx.balanced_tree(2, 3)))).value == 0
    rep = four_point_delta(all_pairs(cycle_graph(4)))
    assert rep.value == 0.5 == brute_delta4(all_pairs(cycle_graph(4)))
    assert rep.exhaustive


# frozen by brute_delta4 on C_n
CYCLE_DELTA4 = {4: 0.5, 5: 0.25, 6: 0.5, 7: 0.5, 8: 1.0, 9: 0.75, 10: 1.0, 12: 1.5, 18: 2.0, 24: 3.0}


@pytest.mark.parametrize("n", sorted(CYCLE_DELTA4))
def test_cycle_delta_frozen(n):
    dm = all_pairs(cycle_graph(n))
    assert four_point_delta(dm).value == CYCLE_DELTA4[n]
    if n <= 10:
        assert brute_delta4(dm) == CYCLE_DELTA4[n]


def test_cycle_delta_increasing_on_sweep_family():
    vals = [four_point_delta(all_pairs(cycle_graph(n))).value for n in (6, 12, 18, 24)]
    assert vals == sorted(set(vals))


def test_delta_small_n():
    assert four_point_delta(all_pairs(path_graph(3))).value == 0


def test_delta_sampled_report():
    dm = all_pairs(cycle_graph(150))
    rep = four_point_delta(dm, sample_size=2000, seed=7)
    assert not rep.exhaustive and rep.seed == 7 and rep.quadruples == 2000
    assert rep.value <= four_point_delta(dm, exhaustive_cap=200).value
    assert four_point_delta(dm, sample_size=2000, seed=7).value == rep.value


@given(graphs(min_n=4, max_n=8, connected=True))
def test_delta_matches_brute_force(g):
    dm = all_pairs(g)
    assert four_point_delta(dm).value == pytest.approx(brute_delta4(dm), abs=1e-12)


@given(tree_metrics())
def test_tree_metrics_are_zero_hyperbolic(ws):
    assert four_point_delta(all_pairs(ws)).value <= 1e-9


@given(graphs(min_n=4, max_n=9, connected=True), st.randoms(use_true_random=False))
def test_delta_relabel_invariant(g, rnd):
    dm = all_pairs(g)
    perm = list(range(g.n))
    rnd.shuffle(perm)
    assert four_point_delta(dm[np.ix_(perm, perm)]).value == four_point_delta(dm).value


def test_thin_examples():
    assert thin_triangle_delta(from_nx(nx.balanced_tree(2, 2))).value == 0
    k3 = thin_triangle_delta(complete_graph(3))
    assert k3.value == brute_thin(complete_graph(3)) == 1.0
    c4 = thin_triangle_delta(cycle_graph(4))
    assert c4.value == brute_thin(cycle_graph(4)) == 2.0
    assert c4.exact


def test_thin_cap_flag():
    rep = thin_triangle_delta(from_nx(nx.hypercube_graph(4)), geodesic_cap=2)
    assert not rep.exact and rep.to_json()["lowerBoundOnly"]


@given(graphs(min_n=3, max_n=7, connected=True))
def test_thin_matches_brute_force(g):
    assert thin_triangle_delta(g).value == pytest.approx(brute_thin(g), abs=1e-12)


@given(graphs(min_n=4, max_n=8, connected=True))
def test_four_point_below_twice_thin(g):
    thin = thin_triangle_delta(g)
    assert thin.exact
    assert four_point_delta(all_pairs(g)).value <= 2 * thin.value + 1e-9


def test_coarse_components_examples():
    line = WeightedSpace.from_edges(12, [(i, i + 1, 1.0) for i in range(11)])
    dm = all_pairs(line)
    parts = coarse_components(dm, [0, 1, 2, 10, 11], 1)
    assert sorted(map(sorted, parts)) == [[0, 1, 2], [10, 11]]
    assert len(coarse_components(dm, [0, 1, 2, 10, 11], 11)) == 1
    assert len(coarse_components(dm, [0, 1, 2, 10, 11], 0.5)) == 5


@given(graphs(min_n=2, max_n=9, connected=True), st.floats(0.5, 4))
def test_coarse_components_match_networkx(g, kappa):
    dm = all_pairs(g)
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from((u, v) for u in range(g.n) for v in range(u + 1, g.n) if dm[u, v] <= kappa)
    ref = sorted(sorted(c) for c in nx.connected_components(h))
    assert sorted(map(sorted, coarse_components(dm, range(g.n), kappa))) == ref


def test_separation_line():
    dm = all_pairs(path_graph(101))
    rep = coarse_separation_profile(dm, [50], 1, 10)
    assert len(rep.components) == 2 and rep.deep_count == 2


def _oracle_deep(dm, z, kappa, K):
    dz = dm[:, z].min(axis=1)
    rest = [p for p in range(len(dm)) if dz[p] > kappa]
    h = nx.Graph()
    h.add_nodes_from(rest)
    h.add_edges_from((a, b) for a in rest for b in rest if a < b and dm[a, b] <= kappa)
    return sum(1 for c in nx.connected_components(h) if max(dz[p] for p in c) > K)


def test_separation_spider_one_leg():
    # the leg contains the root, so the other 8 legs fall apart
    from forge.gos.spiders import leg_points, spider_space

    ws = spider_space(9, 10)
    dm = all_pairs(ws)
    z = leg_points(10, 0)
    rep = coarse_separation_profile(dm, z, 1, 5)
    assert rep.deep_count == _oracle_deep(dm, z, 1, 5) == 8


@given(graphs(min_n=3, max_n=9, connected=True), st.data())
def test_separation_matches_oracle(g, data):
    dm = all_pairs(g)
    z = data.draw(st.lists(st.integers(0, g.n - 1), min_size=1, max_size=3, unique=True))
    kappa = data.draw(st.sampled_from([0.5, 1.0, 2.0]))
    K = data.draw(st.sampled_from([0.0, 1.0, 2.0]))
    assert coarse_separation_profile(dm, z, kappa, K).deep_count == _oracle_deep(dm, z, kappa, K)


def test_separation_everything():
    dm = all_pairs(path_graph(5))
    assert coarse_separation_profile(dm, range(5), 1, 1).components == []
