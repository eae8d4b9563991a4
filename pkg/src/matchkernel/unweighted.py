"""Degree-0/1/2 reduction rules for maximum-cardinality matching.

A degree-0 vertex is deleted.  A degree-1 vertex ``v`` with neighbor ``u``
is matched to ``u`` and both disappear.  A degree-2 vertex ``v`` with
neighbors ``u``, ``w`` is removed and ``u``, ``w`` are merged; some maximum
matching uses exactly one of ``vu``/``vw``, so the optimum drops by one.

Degree-0/1 work is always drained before the next merge, and every
worklist is processed in ascending vertex id.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .graph import Graph, GraphError, feedback_edge_number, merge_vertices
from .trace import Deg0Delete, Deg1Match, Deg2Merge, ReductionTrace, lift_matching


class KernelBoundError(GraphError, AssertionError):
    """A kernel is larger than its proven bound (always an implementation bug)."""


def apply_degree_rules_exhaustive(g: Graph, trace: ReductionTrace | None = None,
                                  inplace: bool = False):
    """Apply the degree rules until the minimum degree is at least three.

    Returns ``(kernel, trace)``; ``mm(g) = mm(kernel) + trace.cardinality_offset``.
    Pass ``inplace=True`` to reduce ``g`` itself instead of a copy.
    """
    if trace is None:
        trace = ReductionTrace()
    if not inplace:
        g = g.copy()
    low: list[int] = []
    two: list[int] = []
    for v in g.vertices():
        d = g.degree(v)
        if d <= 1:
            low.append(v)
        elif d == 2:
            two.append(v)
    heapq.heapify(low)
    heapq.heapify(two)

    def touch(x: int) -> None:
        d = g.degree(x)
        if d <= 1:
            heapq.heappush(low, x)
        elif d == 2:
            heapq.heappush(two, x)

    while low or two:
        if low:
            v = heapq.heappop(low)
            if v not in g:
                continue
            d = g.degree(v)
            if d == 0:
                g.remove_vertex(v)
                trace.record(Deg0Delete(v))
            elif d == 1:
                (u,) = g.neighbors(v)
                others = [x for x in g.neighbors(u) if x != v]
                g.remove_vertex(v)
                g.remove_vertex(u)
                trace.record(Deg1Match(v, u))
                for x in others:
                    touch(x)
            continue
        v = heapq.heappop(two)
        if v not in g or g.degree(v) != 2:
            continue
        u, w = sorted(g.neighbors(v))
        g.remove_vertex(v)
        z, prov = merge_vertices(g, u, w)
        trace.record(Deg2Merge(v, u, w, z, prov))
        touch(z)
        for x in g.neighbors(z):
            touch(x)
    return g, trace


def lift_matching_unweighted(trace: ReductionTrace, kernel_matching, kernel: Graph | None = None):
    """Lift a kernel matching through degree-rule events (see :func:`lift_matching`)."""
    return lift_matching(trace, kernel_matching, kernel)


@dataclass(frozen=True)
class FesBoundReport:
    k: int
    n: int
    m: int
    kernel_n: int
    kernel_m: int

    @property
    def vertex_bound(self) -> int:
        return 2 * self.k

    @property
    def edge_bound(self) -> int:
        return 3 * self.k

    @property
    def vertex_slack(self) -> int:
        return self.vertex_bound - self.kernel_n

    @property
    def edge_slack(self) -> int:
        return self.edge_bound - self.kernel_m

    @property
    def ok(self) -> bool:
        return self.vertex_slack >= 0 and self.edge_slack >= 0


def check_fes_kernel_bound(g: Graph, kernel: Graph) -> FesBoundReport:
    """Check that a degree-rule kernel has at most 2k vertices and 3k edges.

    ``k`` is the feedback edge number of the input ``g``.  Raises
    :class:`KernelBoundError` on violation.
    """
    report = FesBoundReport(feedback_edge_number(g), g.n, g.m, kernel.n, kernel.m)
    if not report.ok:
        raise KernelBoundError(
            f"kernel ({kernel.n} vertices, {kernel.m} edges) exceeds "
            f"({report.vertex_bound}, {report.edge_bound}) for k={report.k}"
        )
    return report
