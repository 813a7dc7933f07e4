import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forestminors.generators import complete_graph, cycle_graph, path_graph
from forestminors.graph import (
    Graph,
    RootedGraph,
    Separation,
    bfs_distances,
    connected_components,
    contract_edge,
    delete_vertices,
    disjoint_union,
    induced_subgraph,
    validate_separation,
)


@st.composite
def graphs(draw, max_n=9):
    n = draw(st.integers(0, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph(n, chosen)


def test_constructor_rejects_loops_and_bad_ids():
    with pytest.raises(ValueError):
        Graph(3, [(1, 1)])
    with pytest.raises(ValueError):
        Graph(3, [(0, 3)])


def test_adjacency_is_symmetric_and_sorted():
    g = Graph(5, [(3, 1), (1, 0), (4, 1), (0, 1)])
    assert g.m == 3
    assert g.adjacency[1] == (0, 3, 4)
    for u in range(g.n):
        for v in g.adjacency[u]:
            assert u in g.adjacency[v]


def test_rooted_graph_rejects_repeated_or_bad_roots():
    with pytest.raises(ValueError):
        RootedGraph(path_graph(3), (0, 0))
    with pytest.raises(ValueError):
        RootedGraph(path_graph(3), (5,))


def test_induced_subgraph_examples():
    k2, mp = induced_subgraph(complete_graph(3), {0, 1})
    assert k2 == complete_graph(2) and mp == {0: 0, 1: 1}
    sub, mp = induced_subgraph(cycle_graph(5), {0, 2, 4})
    assert sub.edges() == [(mp[0], mp[4])]
    empty, mp = induced_subgraph(cycle_graph(5), set())
    assert empty.n == 0 and mp == {}
    with pytest.raises(ValueError):
        induced_subgraph(cycle_graph(5), {7})


def test_contract_edge_examples():
    assert contract_edge(complete_graph(3), 0, 2)[0] == complete_graph(2)
    assert contract_edge(cycle_graph(4), 1, 2)[0] == complete_graph(3)
    assert contract_edge(path_graph(3), 0, 1)[0] == complete_graph(2)
    with pytest.raises(ValueError):
        contract_edge(path_graph(3), 0, 2)


def test_components_examples():
    two = disjoint_union(complete_graph(3), complete_graph(3))
    assert connected_components(two) == [[0, 1, 2], [3, 4, 5]]
    assert connected_components(Graph(0)) == []
    assert connected_components(cycle_graph(6)) == [list(range(6))]


def test_validate_separation_examples():
    p3 = path_graph(3)
    assert validate_separation(p3, Separation({0, 1}, {1, 2}))
    assert not validate_separation(complete_graph(3), Separation({0}, {1, 2}))
    assert validate_separation(p3, Separation({0, 1, 2}, {0, 1, 2}))
    assert not validate_separation(p3, Separation({0}, {2}))
    assert Separation({0, 1}, {1, 2}).order == 1


def test_bfs_examples():
    assert bfs_distances(path_graph(4), 0) == {0: 0, 1: 1, 2: 2, 3: 3}
    assert bfs_distances(Graph(2), 0) == {0: 0}
    assert max(bfs_distances(complete_graph(4), 2).values()) <= 1
    with pytest.raises(ValueError):
        bfs_distances(path_graph(2), 2)


@given(graphs())
@settings(max_examples=150, deadline=None)
def test_contraction_drops_one_vertex_and_stays_simple(g):
    for u, v in g.edges()[:4]:
        h, mp = contract_edge(g, u, v)
        assert h.n == g.n - 1
        assert mp[u] == mp[v]
        for x, y in h.edges():
            assert x != y and y in h.adjacency[x]
        assert len(set(h.edges())) == h.m


@given(graphs())
@settings(max_examples=150, deadline=None)
def test_components_partition_vertices(g):
    comps = connected_components(g)
    flat = [v for c in comps for v in c]
    assert sorted(flat) == list(range(g.n))
    assert [c[0] for c in comps] == sorted(c[0] for c in comps)
    for c in comps:
        assert c == sorted(c)
        assert g.is_connected_mask(sum(1 << v for v in c))


@given(graphs(), st.randoms(use_true_random=False))
@settings(max_examples=150, deadline=None)
def test_deletion_is_induced_subgraph_of_complement(g, rnd):
    gone = {v for v in range(g.n) if rnd.random() < 0.3}
    h, mp = delete_vertices(g, gone)
    assert h.n == g.n - len(gone)
    for u, v in g.edges():
        if u not in gone and v not in gone:
            assert h.has_edge(mp[u], mp[v])
    assert h.m == sum(1 for u, v in g.edges() if u not in gone and v not in gone)


def test_random_separations_from_cuts_validate():
    rng = random.Random(3)
    for _ in range(200):
        n = rng.randint(1, 9)
        g = Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.3])
        cut = {v for v in range(n) if rng.random() < 0.4}
        rest = [c for c in g.component_masks(g.full & ~sum(1 << v for v in cut))]
        left = set(cut)
        for c in rest:
            if rng.random() < 0.5:
                left |= {v for v in range(n) if c >> v & 1}
        right = (set(range(n)) - left) | cut
        assert validate_separation(g, Separation(left, right))
