import random

import pytest
from hypothesis import given

from matchkernel import (
    Graph, KernelBoundError, apply_degree_rules_exhaustive, check_fes_kernel_bound,
    lift_matching_unweighted,
)
from matchkernel.solvers import blossom_mcm, brute_force_mcm
from matchkernel.trace import Deg0Delete, Deg1Match, Deg2Merge

from graphgen import complete, cycle, graphs, path, random_forest, random_suite


def reduce_and_lift(g):
    kernel, trace = apply_degree_rules_exhaustive(g)
    lifted = lift_matching_unweighted(trace, blossom_mcm(kernel), kernel).validate(g)
    return kernel, trace, lifted


def test_forest_reduces_to_nothing():
    rng = random.Random(5)
    for _ in range(30):
        g = random_forest(rng, rng.randint(1, 20))
        kernel, trace, lifted = reduce_and_lift(g)
        assert kernel.n == 0
        assert trace.cardinality_offset == blossom_mcm(g).size == lifted.size


def test_c5_solved_by_merges():
    kernel, trace, lifted = reduce_and_lift(cycle(5))
    assert kernel.n == 0 and trace.cardinality_offset == 2
    assert lifted.size == 2
    assert trace.counts()["DEG2"] == 2


def test_k4_untouched():
    kernel, trace = apply_degree_rules_exhaustive(complete(4))
    assert kernel == complete(4) and trace.cardinality_offset == 0 and len(trace) == 0


def test_p3_matches_first_leaf():
    kernel, trace, lifted = reduce_and_lift(path(3))
    assert trace.events == [Deg1Match(0, 1), Deg0Delete(2)]
    assert lifted == {(0, 1)}


def test_c4_lifts_to_perfect_matching():
    _, trace, lifted = reduce_and_lift(cycle(4))
    assert lifted.size == 2


def test_triangle_tip_merge():
    # 0 has degree 2 and its neighbors 1, 2 are adjacent
    g = Graph([(0, 1), (0, 2), (1, 2), (1, 3), (2, 4), (3, 4), (3, 5), (4, 5)])
    kernel, trace, lifted = reduce_and_lift(g)
    assert isinstance(trace.events[0], Deg2Merge)
    assert lifted.size == brute_force_mcm(g)[0]


def test_input_is_not_mutated():
    g = cycle(5)
    apply_degree_rules_exhaustive(g)
    assert g == cycle(5)


@given(graphs(max_n=13))
def test_kernel_properties(g):
    kernel, trace, lifted = reduce_and_lift(g)
    assert all(kernel.degree(v) >= 3 for v in kernel.vertices())
    assert brute_force_mcm(g)[0] == brute_force_mcm(kernel)[0] + trace.cardinality_offset
    assert lifted.size == brute_force_mcm(g)[0]
    again, trace2 = apply_degree_rules_exhaustive(kernel)
    assert again == kernel and trace2.cardinality_offset == 0
    kernel.check_invariants()
    check_fes_kernel_bound(g, kernel)


def test_bound_report_examples():
    r = check_fes_kernel_bound(path(4), Graph())
    assert (r.k, r.vertex_bound, r.edge_bound) == (0, 0, 0)
    r = check_fes_kernel_bound(cycle(5), apply_degree_rules_exhaustive(cycle(5))[0])
    assert (r.vertex_bound, r.edge_bound, r.kernel_n) == (2, 3, 0)
    r = check_fes_kernel_bound(complete(4), complete(4))
    assert (r.kernel_n, r.kernel_m, r.vertex_bound, r.edge_bound) == (4, 6, 6, 9)
    with pytest.raises(KernelBoundError):
        check_fes_kernel_bound(path(4), path(4))


def test_sweep_matches_oracle():
    for g in random_suite(21, 200, 14):
        kernel, trace, lifted = reduce_and_lift(g)
        assert lifted.size == brute_force_mcm(g)[0]
