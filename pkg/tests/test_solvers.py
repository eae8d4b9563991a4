import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matchkernel import Graph, WeightedGraph
from matchkernel.solvers import (
    BipartiteGraph, Digraph, OracleGuardError, blossom_mcm, brute_force_mcm, brute_force_mwm,
    brute_force_vc, hopcroft_karp, kosaraju_scc,
)

from graphgen import complete, complete_bipartite, cycle, graphs, petersen, random_suite, star


def bipartite_as_graph(b):
    return Graph(
        [(i, b.n_left + j) for i, nb in enumerate(b.adj) for j in nb],
        vertices=range(b.n_left + b.n_right),
    )


@st.composite
def bipartite_graphs(draw, max_side=8):
    nl = draw(st.integers(0, max_side))
    nr = draw(st.integers(0, max_side))
    adj = [draw(st.lists(st.integers(0, nr - 1), max_size=nr)) if nr else [] for _ in range(nl)]
    return BipartiteGraph(nl, nr, adj)


def test_hopcroft_karp_examples():
    assert len(hopcroft_karp(BipartiteGraph(2, 2, [[0, 1], [0, 1]]))) == 2
    assert len(hopcroft_karp(BipartiteGraph(1, 5, [[0, 1, 2, 3, 4]]))) == 1


def test_hopcroft_karp_labels():
    b = BipartiteGraph.from_edges(["a", "b"], ["x"], [("a", "x"), ("b", "x")])
    assert hopcroft_karp(b) == {"a": "x"}


@settings(max_examples=150)
@given(bipartite_graphs())
def test_hopcroft_karp_matches_brute_force(b):
    mate = hopcroft_karp(b)
    assert len(set(mate.values())) == len(mate)
    for i, j in mate.items():
        assert j in b.adj[i]
    assert len(mate) == brute_force_mcm(bipartite_as_graph(b))[0]


def test_kosaraju_examples():
    assert kosaraju_scc(Digraph(arcs=[("a", "b"), ("b", "c")])) == [["c"], ["b"], ["a"]]
    comps = kosaraju_scc(Digraph(arcs=[(0, 1), (1, 2), (2, 0)]))
    assert [sorted(c) for c in comps] == [[0, 1, 2]]
    comps = kosaraju_scc(Digraph(arcs=[(0, 1), (1, 0), (2, 3), (3, 2), (0, 2)]))
    assert [sorted(c) for c in comps] == [[2, 3], [0, 1]]


@given(st.integers(1, 12).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))))
))
def test_kosaraju_order_and_partition(data):
    n, arcs = data
    d = Digraph(range(n), arcs)
    comps = kosaraju_scc(d)
    where = {v: i for i, c in enumerate(comps) for v in c}
    assert sorted(where) == list(range(n))
    for a, b in arcs:
        assert where[b] <= where[a]
    # vertices in one component reach each other
    reach = {v: {v} for v in range(n)}
    for _ in range(n):
        for a, b in arcs:
            reach[a] |= reach[b]
    for c in comps:
        for v in c:
            assert set(c) <= reach[v]
    for a in range(n):
        for b in reach[a]:
            if a in reach[b]:
                assert where[a] == where[b]


@pytest.mark.parametrize("g, size", [(cycle(5), 2), (petersen(), 5), (complete(4), 2),
                                     (complete_bipartite(3, 5), 3), (cycle(4), 2)])
def test_known_matching_numbers(g, size):
    assert blossom_mcm(g).size == size
    assert brute_force_mcm(g)[0] == size


def test_blossom_against_brute_force_sweep():
    for g in random_suite(11, 300, 14):
        m = blossom_mcm(g).validate(g)
        size, witness = brute_force_mcm(g)
        witness.validate(g)
        assert m.size == size == witness.size


@settings(max_examples=100)
@given(graphs(max_n=10, weighted=True))
def test_brute_force_mwm_witness(g):
    w, m = brute_force_mwm(g)
    m.validate(g)
    assert m.weight(g) == w


def test_brute_force_mwm_examples():
    assert brute_force_mwm(WeightedGraph([(0, 1, 7)]))[0] == 7
    assert brute_force_mwm(WeightedGraph([(0, 1, 2), (1, 2, 5)]))[0] == 5
    fig = WeightedGraph([(0, 1, 5), (1, 2, 6), (1, 3, 9), (1, 4, 3), (3, 4, 4)])
    w, m = brute_force_mwm(fig)
    assert w == 10 and m == {(1, 2), (3, 4)}


@pytest.mark.parametrize("g, tau", [(cycle(5), 3), (star(3), 1), (complete(4), 3),
                                    (complete_bipartite(3, 5), 3), (petersen(), 6)])
def test_vertex_cover_numbers(g, tau):
    assert brute_force_vc(g) == tau


def test_guards():
    big = cycle(21)
    with pytest.raises(OracleGuardError):
        brute_force_mcm(big)
    with pytest.raises(OracleGuardError):
        brute_force_vc(big)
    w = WeightedGraph([(i, i + 1, 1) for i in range(19)])
    with pytest.raises(OracleGuardError):
        brute_force_mwm(w)
    # components are solved separately, so two small ones pass
    two = WeightedGraph([(i, i + 1, 1) for i in range(9)] + [(i, i + 1, 1) for i in range(10, 19)])
    assert brute_force_mwm(two)[0] == 5 + 5


def test_random_vertex_cover_is_a_cover_bound():
    rng = random.Random(3)
    for g in random_suite(rng.randint(0, 99), 50, 10):
        tau = brute_force_vc(g)
        assert blossom_mcm(g).size <= tau <= 2 * blossom_mcm(g).size
