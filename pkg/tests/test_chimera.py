import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coising.catalog import catalog_get
from coising.chimera import (
    EmbeddingMap,
    chimera_graph,
    count_embeddings,
    find_native_embeddings,
    verify_embedding,
)
from coising.graph import Graph, VertexPermutation, complete_graph, path_graph, relabel


@pytest.mark.parametrize("m, qubits, couplers", [(1, 8, 16), (2, 32, 80), (16, 2048, 6016)])
def test_sizes(m, qubits, couplers):
    topo = chimera_graph(m)
    assert topo.num_qubits == qubits
    assert len(topo.couplers) == len(set(topo.couplers)) == couplers == 16 * m * m + 8 * m * (m - 1)


def test_unit_cell_is_k44():
    G = nx.Graph(chimera_graph(1).couplers)
    assert nx.is_bipartite(G)
    assert nx.is_isomorphic(G, nx.complete_bipartite_graph(4, 4))


def test_matches_independent_construction():
    # build C_m from cell coordinates with the stated wiring, without sharing code
    m = 3
    edges = set()
    for r in range(m):
        for c in range(m):
            base = 8 * (m * r + c)
            edges |= {(base + u, base + v) for u in range(4) for v in range(4, 8)}
            if r + 1 < m:
                edges |= {(base + u, base + 8 * m + u) for u in range(4)}
            if c + 1 < m:
                edges |= {(base + u, base + 8 + u) for u in range(4, 8)}
    assert set(chimera_graph(m).couplers) == edges


def test_degree_bound():
    topo = chimera_graph(4)
    deg = [len(x) for x in topo.neighbor_sets()]
    assert max(deg) == 6
    interior = topo.qubit(1, 2, 3)
    assert deg[interior] == 6


def test_coords_round_trip():
    topo = chimera_graph(5)
    for q in range(topo.num_qubits):
        assert topo.qubit(*topo.coords(q)) == q


def test_k2_embedding_count():
    topo = chimera_graph(1)
    assert count_embeddings(Graph(2, [(1, 2)]), topo) == 32
    res = find_native_embeddings(Graph(2, [(1, 2)]), topo, 5)
    assert len(res.embeddings) == 5 and not res.exhausted


def test_c4_count_matches_networkx():
    # ordered 4-cycles in K_{4,4}
    topo = chimera_graph(1)
    cyc = Graph(4, [(1, 2), (2, 3), (3, 4), (1, 4)])
    gm = nx.algorithms.isomorphism.GraphMatcher(nx.Graph(topo.couplers), nx.cycle_graph(4))
    assert count_embeddings(cyc, topo) == sum(1 for _ in gm.subgraph_monomorphisms_iter()) == 288


def test_k5_and_triangle_not_native():
    topo = chimera_graph(2)
    assert count_embeddings(complete_graph(5), topo) == 0
    assert count_embeddings(complete_graph(3), topo) == 0
    res = find_native_embeddings(complete_graph(5), topo, 1)
    assert res.embeddings == [] and not res.exhausted


@pytest.mark.parametrize("name", ["G13", "G25p4", "G33p2"])
def test_catalog_embeddings(name):
    g = catalog_get(name)
    topo = chimera_graph(16)
    res = find_native_embeddings(g, topo, 5, seed=1, name=name)
    assert len(res.embeddings) == 5
    assert len({e.key() for e in res.embeddings}) == 5
    assert all(verify_embedding(g, topo, e) for e in res.embeddings)


def test_verify_rejects_bad_maps():
    g = path_graph(3)
    topo = chimera_graph(1)
    good = EmbeddingMap({1: 0, 2: 4, 3: 1})
    assert verify_embedding(g, topo, good)
    assert not verify_embedding(g, topo, EmbeddingMap({1: 0, 2: 4, 3: 0}))  # not injective
    assert not verify_embedding(g, topo, EmbeddingMap({1: 0, 2: 1, 3: 4}))  # 0-1 is no coupler
    assert not verify_embedding(g, topo, EmbeddingMap({1: 0, 2: 4}))  # vertex missing


def test_swapping_qubits_usually_breaks_embedding():
    g = catalog_get("G13")
    topo = chimera_graph(16)
    e = find_native_embeddings(g, topo, 1)[0][0]
    a = dict(e.assignment)
    a[1], a[2] = a[2], a[1]
    assert not verify_embedding(g, topo, EmbeddingMap(a))


def test_json_round_trip():
    e = find_native_embeddings(catalog_get("G17"), chimera_graph(16), 1, name="G17").embeddings[0]
    assert EmbeddingMap.from_json(e.to_json()) == e


def test_deterministic():
    g = catalog_get("G27")
    topo = chimera_graph(16)
    a = find_native_embeddings(g, topo, 3, seed=5)
    b = find_native_embeddings(g, topo, 3, seed=5)
    assert [e.key() for e in a.embeddings] == [e.key() for e in b.embeddings]


@settings(max_examples=20)
@given(st.permutations(range(1, 14)))
def test_relabeled_embedding_valid(perm):
    g = catalog_get("G13")
    topo = chimera_graph(16)
    e = find_native_embeddings(g, topo, 1, seed=2).embeddings[0]
    p = VertexPermutation(perm)
    assert verify_embedding(relabel(g, p), topo, e.relabeled(p))
