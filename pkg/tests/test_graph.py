import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st

from majcert import graph as gr
from majcert.graph import GraphError, build_graph, growth_profile


def test_single_edge():
    g = build_graph(2, [(0, 1)])
    assert g.n == 2 and g.m == 1
    assert g.neighbors(0) == (1,)


def test_cycle_c4_degrees():
    g = build_graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert [g.degree(v) for v in range(4)] == [2, 2, 2, 2]


@pytest.mark.parametrize(
    "n, edges",
    [
        (3, [(0, 1)]),  # disconnected
        (2, [(0, 0), (0, 1)]),  # loop
        (2, [(0, 1), (1, 0)]),  # duplicate
        (2, [(0, 2)]),  # out of range
    ],
)
def test_build_graph_rejects(n, edges):
    with pytest.raises(GraphError):
        build_graph(n, edges)


def test_ids_must_be_distinct():
    with pytest.raises(GraphError):
        build_graph(2, [(0, 1)], ids=[5, 5])


def test_default_ids():
    g = gr.path_graph(3)
    assert g.ids == (1, 2, 3)


def test_growth_profile_examples():
    assert growth_profile(gr.cycle_graph(8), 3, 4).boundary_sizes == (1, 2, 2, 2, 1)
    assert growth_profile(gr.path_graph(5), 2, 2).boundary_sizes == (1, 2, 2)
    assert growth_profile(gr.single_edge(), 0, 1).boundary_sizes == (1, 1)


def test_text_round_trip(tmp_path):
    g = gr.grid_graph(3, 4)
    p = tmp_path / "g.txt"
    gr.write_graph(g, p)
    h = gr.read_graph(p)
    assert h.n == g.n and h.edges == g.edges


def test_parse_with_comments():
    g = gr.parse_graph("# triangle\n3 3\n0 1\n1 2 # spoke\n2 0\n")
    assert g.m == 3


def test_parse_edge_count_mismatch():
    with pytest.raises((GraphError, ValueError)):
        gr.parse_graph("3 3\n0 1\n1 2\n")


def test_generators_match_networkx():
    assert nx.is_isomorphic(gr.torus_graph(4, 5).to_networkx(), nx.grid_2d_graph(4, 5, periodic=True))
    assert nx.is_isomorphic(gr.grid_graph(3, 3).to_networkx(), nx.grid_2d_graph(3, 3))
    assert gr.complete_graph(5).m == 10


def test_random_cubic_is_cubic(rng):
    g = gr.random_cubic(20, rng)
    assert set(g.degrees.tolist()) == {3}


def test_bounded_degree(rng):
    g = gr.random_bounded_degree(30, 4, rng)
    assert g.max_degree <= 4


@st.composite
def connected_graphs(draw, max_n=12):
    n = draw(st.integers(2, max_n))
    parents = [draw(st.integers(0, v - 1)) for v in range(1, n)]
    edges = {(p, v) for v, p in zip(range(1, n), parents)}
    extra = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=2 * n))
    for u, v in extra:
        if u != v:
            edges.add((min(u, v), max(u, v)))
    return build_graph(n, sorted(edges))


@given(connected_graphs(), st.data())
def test_profile_invariants(g, data):
    v = data.draw(st.integers(0, g.n - 1))
    prof = growth_profile(g, v, g.eccentricity(v))
    assert prof.boundary_sizes[0] == 1
    assert sum(prof.boundary_sizes) == g.n
    if g.n > 1:
        assert prof.boundary_sizes[1] == g.degree(v)


@given(connected_graphs())
def test_adjacency_symmetric_and_degree_bound(g):
    for u in range(g.n):
        for v in g.neighbors(u):
            assert u in g.neighbors(v)
    assert max(growth_profile(g, v, 1).boundary_sizes[1] for v in range(g.n)) == g.max_degree


def test_matrix_is_adjacency():
    g = gr.cycle_graph(5)
    A = g.matrix.toarray()
    assert np.array_equal(A, A.T) and A.sum() == 10 and np.trace(A) == 0
