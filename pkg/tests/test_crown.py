import pytest
from hypothesis import given, settings

from matchkernel import (
    Crown, Graph, RelaxedCrown, ValidationError, apply_crown, apply_lp_rule, apply_relaxed_crown,
    build_bipartite_double, crown_kernelize, find_crown_bruteforce, find_relaxed_crown_bruteforce,
    konig_vertex_cover, lift_matching_crown, lp_solution_from_cover, maximal_persistency,
)
from matchkernel.crown import kernelize_unweighted, lp_persistency
from matchkernel.solvers import blossom_mcm, brute_force_mcm, brute_force_vc

from graphgen import complete_bipartite, cycle, graphs, path, petersen, random_suite, star

# Two-vertex independent set {i1, i2} with head {h1, h2, h3} and outer vertices u1..u5.
NAMES = "i1 i2 h1 h2 h3 u1 u2 u3 u4 u5".split()
FIG_EDGES = ("i1h1 i1h2 i2h1 i2h2 i2h3 h2h3 h1u1 h1u2 h2u2 h2u3 h2u4 h3u2 h3u4 h3u5 "
             "u1u2 u3u4 u4u5").split()


def relaxed_crown_graph():
    ix = {s: i for i, s in enumerate(NAMES)}
    return Graph([(ix[e[:2]], ix[e[2:]]) for e in FIG_EDGES])


def star_plus_c5():
    g = star(3)
    for u, v in cycle(5, start=10).edges():
        g.add_edge(u, v)
    return g


def test_double_examples():
    bd = build_bipartite_double(Graph([(0, 1)]))
    assert (bd.n, bd.m) == (4, 2)
    tri = build_bipartite_double(cycle(3))
    assert (tri.n, tri.m) == (6, 6)
    empty = build_bipartite_double(Graph(vertices=[0, 1]))
    assert (empty.n, empty.m) == (4, 0)


@given(graphs(max_n=10))
def test_double_is_symmetric(g):
    bd = build_bipartite_double(g)
    edges = {(a[0], b[0]) for a, b in bd.edges()}
    assert len(edges) == 2 * g.m
    assert all((b, a) in edges for a, b in edges)


@pytest.mark.parametrize("g, size", [(Graph([(0, 1)]), 2), (star(2), 2), (Graph(vertices=[0, 1]), 0)])
def test_konig_examples(g, size):
    bd = build_bipartite_double(g)
    cover = konig_vertex_cover(bd, bd.maximum_matching())
    assert len(cover) == size
    if g.n == 3:
        assert cover == {(0, "L"), (0, "R")}


def test_konig_rejects_non_maximum():
    bd = build_bipartite_double(Graph([(0, 1)]))
    with pytest.raises(ValidationError):
        konig_vertex_cover(bd, [-1, -1])


@given(graphs(max_n=10))
def test_konig_cover_is_minimum_and_valid(g):
    bd = build_bipartite_double(g)
    mate = bd.maximum_matching()
    cover = konig_vertex_cover(bd, mate)
    assert len(cover) == sum(1 for j in mate if j != -1)
    sol = lp_solution_from_cover(bd, cover)
    sol.check_feasible(g)
    assert 2 * sol.objective == len(cover)


def test_lp_from_cover_examples():
    bd = build_bipartite_double(Graph([(0, 1)]))
    sol = lp_solution_from_cover(bd, {(0, "L"), (0, "R")})
    assert sol.one == {0} and sol.zero == {1}
    c4 = cycle(4)
    bd = build_bipartite_double(c4)
    half = lp_solution_from_cover(bd, {(v, "L") for v in c4.vertices()})
    assert half.half == set(c4.vertices())
    assert lp_solution_from_cover(build_bipartite_double(Graph(vertices=[3])), set()).zero == {3}
    with pytest.raises(ValidationError):
        lp_solution_from_cover(build_bipartite_double(Graph([(0, 1)])), set())


def test_persistency_examples():
    sol = lp_persistency(star(3))
    assert (sol.one, sol.zero, sol.half) == ({0}, {1, 2, 3}, set())
    assert lp_persistency(cycle(5)).half == set(range(5))
    k35 = complete_bipartite(3, 5)
    sol = lp_persistency(k35)
    assert (sol.one, sol.zero) == ({0, 1, 2}, {3, 4, 5, 6, 7})


@settings(max_examples=150)
@given(graphs(max_n=12))
def test_persistency_is_optimal_feasible_and_crown_free(g):
    bd = build_bipartite_double(g)
    mate = bd.maximum_matching()
    sol = maximal_persistency(bd, mate)
    sol.check_feasible(g)
    assert sol.objective == lp_solution_from_cover(bd, konig_vertex_cover(bd, mate)).objective
    assert 2 * sol.objective <= g.n
    kernel, trace = apply_lp_rule(g, sol)
    assert find_crown_bruteforce(kernel) is None
    assert brute_force_mcm(g)[0] == brute_force_mcm(kernel)[0] + len(sol.one)


@pytest.mark.parametrize("g, n_left, offset", [
    (star(3), 0, 1), (cycle(5), 5, 0), (complete_bipartite(3, 5), 0, 3),
])
def test_lp_rule_examples(g, n_left, offset):
    kernel, trace = apply_lp_rule(g)
    assert kernel.n == n_left and trace.cardinality_offset == offset


@pytest.mark.parametrize("g, independent, left, offset", [
    (cycle(4), {0, 2}, 0, 2),
    (star(3), {1, 2, 3}, 0, 1),
    (star_plus_c5(), {1, 2, 3}, 5, 1),
])
def test_apply_crown_examples(g, independent, left, offset):
    crown = Crown.from_independent(g, independent)
    kernel, trace = apply_crown(g, crown)
    assert kernel.n == left and trace.cardinality_offset == offset
    lifted = lift_matching_crown(trace, blossom_mcm(kernel), kernel).validate(g)
    assert lifted.size == brute_force_mcm(g)[0]


def test_crown_witness_rejected():
    g = cycle(4)
    with pytest.raises(ValidationError):
        apply_crown(g, Crown(frozenset({1}), frozenset({0}), ((0, 1),)))
    with pytest.raises(ValidationError):
        apply_crown(g, Crown(frozenset({1, 3}), frozenset({0, 2}), ((0, 1),)))
    with pytest.raises(ValidationError):
        Crown.from_independent(g, {0, 1})


def test_crown_oracle_examples():
    assert find_crown_bruteforce(cycle(5)) is None
    c = find_crown_bruteforce(star(3))
    assert c.head == {0} and c.independent == {1, 2, 3}
    c = find_crown_bruteforce(cycle(4))
    assert len(c.head) == 2


@settings(max_examples=100)
@given(graphs(max_n=9))
def test_crown_oracle_is_complete(g):
    """Cross-check against a plain enumeration of independent sets."""
    from itertools import combinations
    found = find_crown_bruteforce(g)
    vs = g.vertices()
    exists = False
    for r in range(1, len(vs) + 1):
        for sub in combinations(vs, r):
            s = set(sub)
            if any(x in s for v in s for x in g.neighbors(v)):
                continue
            try:
                Crown.from_independent(g, s)
                exists = True
            except ValidationError:
                pass
            if exists:
                break
        if exists:
            break
    assert (found is not None) == exists
    if found is not None:
        found.validate(g)


def test_relaxed_crown_c5():
    g = cycle(5)
    rc = RelaxedCrown.from_independent(g, {0, 2})
    assert rc.head == {1, 3, 4}
    kernel, trace = apply_relaxed_crown(g, rc)
    assert (kernel.n, kernel.m, trace.cardinality_offset) == (1, 0, 2)
    lifted = lift_matching_crown(trace, [], kernel).validate(g)
    assert lifted.size == 2


def test_relaxed_crown_needs_crown_free_graph():
    # P3 is itself a crown ({b}, {a, c}), so the rule does not apply there
    g = path(3)
    rc = RelaxedCrown.from_independent(g, {0, 2})
    with pytest.raises(ValidationError):
        apply_relaxed_crown(g, rc)


def test_relaxed_crown_ten_vertex_instance():
    g = relaxed_crown_graph()
    assert brute_force_mcm(g)[0] == 5
    # this graph is not crown-free, so the caller has to vouch for it
    assert find_crown_bruteforce(g) is not None
    with pytest.raises(ValidationError):
        apply_relaxed_crown(g, RelaxedCrown.from_independent(g, {0, 1}))
    rc = RelaxedCrown.from_independent(g, {0, 1})
    assert rc.head == {2, 3, 4}
    kernel, trace = apply_relaxed_crown(g, rc, assume_crown_free=True)
    (w,) = [v for v in kernel.vertices() if v not in g]
    assert sorted(kernel.neighbors(w)) == [5, 6, 7, 8, 9]
    assert brute_force_mcm(kernel)[0] == 3 and trace.cardinality_offset == 2
    lifted = lift_matching_crown(trace, brute_force_mcm(kernel)[1], kernel).validate(g)
    assert lifted.size == 5


def test_relaxed_crown_witness_checks():
    g = cycle(5)
    with pytest.raises(ValidationError):
        RelaxedCrown(frozenset({1, 4}), frozenset({0}), {1: (), 4: ()}).validate(g)
    with pytest.raises(ValidationError):
        RelaxedCrown.from_independent(g, {0, 1})
    with pytest.raises(ValidationError):
        apply_relaxed_crown(cycle(25), RelaxedCrown.from_independent(cycle(25), {0, 2}))


def test_relaxed_crowns_on_random_crown_free_graphs():
    checked = 0
    for g in random_suite(31, 400, 11):
        kernel, _ = crown_kernelize(g)
        if kernel.n == 0:
            continue
        rc = find_relaxed_crown_bruteforce(kernel)
        if rc is None:
            continue
        reduced, trace = apply_relaxed_crown(kernel, rc)
        before = brute_force_mcm(kernel)[0]
        assert before == brute_force_mcm(reduced)[0] + len(rc.head) - 1
        lifted = lift_matching_crown(trace, blossom_mcm(reduced), reduced).validate(kernel)
        assert lifted.size == before
        checked += 1
    assert checked >= 10


def test_crown_kernelize_examples():
    k35 = complete_bipartite(3, 5)
    degree_only, _ = kernelize_unweighted(k35, "degree")
    assert degree_only == k35
    kernel, trace = crown_kernelize(k35)
    assert kernel.n == 0 and trace.cardinality_offset == 3
    assert lift_matching_crown(trace, [], kernel).validate(k35).size == 3
    for n in (5, 7):
        kernel, trace = crown_kernelize(cycle(n))
        assert kernel.n == 0 and "LP" not in trace.counts()
    p = petersen()
    kernel, trace = crown_kernelize(p)
    assert kernel == p and find_crown_bruteforce(kernel) is None


@settings(max_examples=120)
@given(graphs(max_n=12))
def test_crown_kernel_properties(g):
    kernel, trace = crown_kernelize(g)
    assert all(kernel.degree(v) >= 3 for v in kernel.vertices())
    assert find_crown_bruteforce(kernel) is None
    assert kernel.n <= 2 * brute_force_vc(g)
    assert brute_force_mcm(g)[0] == brute_force_mcm(kernel)[0] + trace.cardinality_offset
    lifted = lift_matching_crown(trace, blossom_mcm(kernel), kernel).validate(g)
    assert lifted.size == brute_force_mcm(g)[0]
