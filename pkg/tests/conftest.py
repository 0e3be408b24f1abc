import networkx as nx
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from forge.graph import Graph

settings.register_profile("forge", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("forge")


def from_nx(h: nx.Graph) -> Graph:
    h = nx.convert_node_labels_to_integers(h)
    return Graph.from_edges(h.number_of_nodes(), list(h.edges()))


def to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


@st.composite
def graphs(draw, min_n=1, max_n=9, connected=False):
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges = [p for p, keep in zip(pairs, mask) if keep]
    if connected:
        edges += [(i, i + 1) for i in range(n - 1)]
    return Graph.from_edges(n, set(edges))


@pytest.fixture
def nxg():
    return from_nx
