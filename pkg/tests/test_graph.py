import numpy as np
import pytest
from hypothesis import given

from coising.catalog import NAMES, catalog_get
from coising.graph import (
    Graph,
    GraphError,
    VertexPermutation,
    adjacency_power,
    are_isomorphic,
    disjoint_union,
    parse_graph,
    path_graph,
    relabel,
)
from strategies import graph_and_perm, graphs


def test_parse_single_pair():
    assert parse_graph("[(1,2)]", n=2) == Graph(2, [(1, 2)])


def test_parse_g13_listing():
    g = catalog_get("G13")
    assert (g.n, g.num_edges) == (13, 15)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("[(1,1)]", "self-loop"),
        ("[(1,2)]\n[(2,1)]", "line 2"),
        ("n 3\n1 2\n1 4", "line 3"),
        ("[(1,2), (3 4)]", "malformed"),
        ("n 3\n1 x", "non-integer"),
    ],
)
def test_parse_errors_name_the_problem(text, fragment):
    with pytest.raises(GraphError, match=fragment):
        parse_graph(text)


def test_text_and_json_round_trip():
    g = catalog_get("G17p")
    assert parse_graph(g.to_text()) == g
    assert parse_graph(g.to_json()) == g


def test_isolated_trailing_vertex_survives_round_trip():
    g = Graph(5, [(1, 2)])
    assert parse_graph(g.to_text()) == g
    assert parse_graph(g.to_json()) == g


def test_relabel_identity_and_k2():
    g = catalog_get("G13")
    assert relabel(g, VertexPermutation.identity(13)) == g
    assert relabel(Graph(2, [(1, 2)]), [2, 1]) == Graph(2, [(1, 2)])


def test_relabel_length_mismatch():
    with pytest.raises(GraphError):
        relabel(Graph(3, [(1, 2)]), [1, 2])


def test_seeded_relabel_changes_edges_but_not_class():
    g = catalog_get("G13")
    h = relabel(g, VertexPermutation.random(13, 7))
    assert h != g
    found, p = are_isomorphic(g, h)
    assert found and relabel(g, p) == h


@pytest.mark.parametrize("a, b", [("G13", "G13p"), ("G25p1", "G25p3"), ("G27", "G27p")])
def test_catalog_pairs_not_isomorphic(a, b):
    assert are_isomorphic(catalog_get(a), catalog_get(b)) == (False, None)


def test_adjacency_power_examples():
    assert adjacency_power(Graph(2, [(1, 2)]), 2).tolist() == [[1, 0], [0, 1]]
    a2 = adjacency_power(path_graph(3), 2)
    assert np.diag(a2).tolist() == [1, 2, 1]
    assert a2[0, 2] == 1


def test_fixed_vertex_isomorphism():
    p3 = path_graph(3)
    assert are_isomorphic(p3, p3, fixed=(1, 3))[0]
    assert not are_isomorphic(p3, p3, fixed=(1, 2))[0]


def test_disjoint_union_shifts_labels():
    u = disjoint_union(Graph(2, [(1, 2)]), Graph(2, [(1, 2)]))
    assert u == Graph(4, [(1, 2), (3, 4)])


@given(graph_and_perm())
def test_relabel_inverse(gp):
    g, p = gp
    assert relabel(relabel(g, p), p.inverse()) == g


@given(graph_and_perm(max_n=12))
def test_isomorphic_to_relabeling_with_witness(gp):
    g, p = gp
    h = relabel(g, p)
    found, w = are_isomorphic(g, h)
    assert found and relabel(g, w) == h


@given(graphs(max_n=8), graphs(max_n=8))
def test_isomorphism_symmetric(g1, g2):
    assert are_isomorphic(g1, g2)[0] == are_isomorphic(g2, g1)[0]


@given(graphs(max_n=9))
def test_square_trace_is_twice_edges(g):
    a1 = adjacency_power(g, 1)
    assert (a1 == a1.T).all() and a1.sum() == 2 * g.num_edges
    assert np.trace(adjacency_power(g, 2)) == 2 * g.num_edges


def test_catalog_graphs_isomorphic_to_relabelings():
    rng = np.random.default_rng(11)
    for name in NAMES:
        g = catalog_get(name)
        for _ in range(3):
            assert are_isomorphic(g, relabel(g, VertexPermutation.random(g.n, rng)))[0]
