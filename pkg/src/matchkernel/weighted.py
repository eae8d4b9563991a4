"""Reduction rules for maximum-weight matching.

* zero rules: weight-0 edges and isolated vertices never help, drop them;
* degree-one rule: for a leaf ``v`` with neighbor ``u``, take ``w(uv)`` into
  the offset, delete ``v`` and lower every other edge at ``u`` by ``w(uv)``
  (clamped at 0).  The exhaustive version defers the lowering through
  per-vertex counters so a whole sweep costs linear time;
* pending cycle: a cycle hanging off a single vertex ``u`` becomes one edge
  ``uz``;
* maximal path: a chain of at least two degree-2 vertices between ``u`` and
  ``v`` becomes the triangle ``u z v``.

Paths and cycles themselves are solved by a linear DP.  Among equally heavy
witnesses the DP picks the one whose sorted edge-index list is
lexicographically smallest; zero-weight edges are never part of a witness.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .graph import Graph, GraphError, ValidationError, connected_components, feedback_edge_number
from .trace import (
    IsolatedComponent, MaxPath, PendCycle, ReductionTrace, WDeg1, WDeg1Rewrite, WZeroDelete,
    lift_matching,
)
from .unweighted import KernelBoundError


# -- dynamic programs -------------------------------------------------------

def _path_best(weights, offset: int = 0) -> tuple[int, tuple[int, ...]]:
    """Best matching of a path with edge weights ``weights`` (edge ``i`` joins
    vertices ``i`` and ``i + 1``); witness edges are indices shifted by ``offset``."""
    k = len(weights)
    best = [0] * (k + 2)
    for i in range(k - 1, -1, -1):
        best[i] = max(best[i + 1], weights[i] + best[i + 2])
    picked = []
    i = 0
    while i < k:
        if weights[i] > 0 and weights[i] + best[i + 2] >= best[i + 1]:
            picked.append(i + offset)
            i += 2
        else:
            i += 1
    return best[0], tuple(picked)


@dataclass(frozen=True)
class PathSolution:
    """Optimal matchings of a path and of the path minus its ends.

    Each field is ``(weight, edge indices)``; ``minus_u`` drops the first
    vertex, ``minus_v`` the last one.
    """

    full: tuple
    minus_u: tuple
    minus_v: tuple
    minus_uv: tuple


def mwm_on_path(weights) -> PathSolution:
    weights = list(weights)
    k = len(weights)
    if k == 0:
        empty = (0, ())
        return PathSolution(empty, empty, empty, empty)
    return PathSolution(
        _path_best(weights),
        _path_best(weights[1:], 1),
        _path_best(weights[:-1]),
        _path_best(weights[1:-1], 1),
    )


@dataclass(frozen=True)
class CycleSolution:
    """``full`` is the cycle optimum, ``minus_u`` the optimum without vertex 0."""

    full: tuple
    minus_u: tuple


def mwm_on_cycle(weights) -> CycleSolution:
    """Edge ``i`` joins cycle vertices ``i`` and ``i + 1 (mod k)``; vertex 0 is the anchor.

    Either edge 0 is matched (then edges 1 and k-1 are not) or it is not,
    which leaves a path in both cases.
    """
    weights = list(weights)
    k = len(weights)
    if k < 3:
        raise ValidationError(f"a cycle needs at least 3 edges, got {k}")
    without = _path_best(weights[1:], 1)
    w0, rest = _path_best(weights[2:-1], 2)
    candidates = [without]
    if weights[0] > 0:
        candidates.append((weights[0] + w0, (0,) + rest))
    best_w = max(c[0] for c in candidates)
    full = min((c for c in candidates if c[0] == best_w), key=lambda c: c[1])
    return CycleSolution(full, _path_best(weights[1:-1], 1))


# -- structures ---------------------------------------------------------------

@dataclass(frozen=True)
class PathSpec:
    """Maximal path ``vertices[0] .. vertices[-1]`` with at least two inner vertices."""

    vertices: tuple

    @property
    def u(self) -> int:
        return self.vertices[0]

    @property
    def v(self) -> int:
        return self.vertices[-1]

    def weights(self, g: Graph) -> list[int]:
        vs = self.vertices
        return [g.weight(vs[i], vs[i + 1]) for i in range(len(vs) - 1)]

    def validate(self, g: Graph) -> PathSpec:
        vs = self.vertices
        if len(vs) < 4:
            raise ValidationError("a maximal path needs at least 3 edges")
        if len(set(vs)) != len(vs):
            raise ValidationError("path repeats a vertex (use a pending cycle)")
        for x in vs:
            if x not in g:
                raise ValidationError(f"unknown vertex {x}")
        for a, b in zip(vs, vs[1:]):
            if not g.has_edge(a, b):
                raise ValidationError(f"path edge {a}-{b} missing")
        for x in vs[1:-1]:
            if g.degree(x) != 2:
                raise ValidationError(f"inner vertex {x} has degree {g.degree(x)}")
        for x in (vs[0], vs[-1]):
            if g.degree(x) == 2:
                raise ValidationError(f"endpoint {x} has degree 2, path is not maximal")
        return self


@dataclass(frozen=True)
class CycleSpec:
    """Pending cycle ``vertices`` (anchor first, then around the cycle)."""

    vertices: tuple

    @property
    def anchor(self) -> int:
        return self.vertices[0]

    def weights(self, g: Graph) -> list[int]:
        vs = self.vertices
        k = len(vs)
        return [g.weight(vs[i], vs[(i + 1) % k]) for i in range(k)]

    def validate(self, g: Graph) -> CycleSpec:
        vs = self.vertices
        if len(vs) < 3 or len(set(vs)) != len(vs):
            raise ValidationError("a cycle needs at least 3 distinct vertices")
        for x in vs:
            if x not in g:
                raise ValidationError(f"unknown vertex {x}")
        for i in range(len(vs)):
            if not g.has_edge(vs[i], vs[(i + 1) % len(vs)]):
                raise ValidationError(f"cycle edge {vs[i]}-{vs[(i + 1) % len(vs)]} missing")
        for x in vs[1:]:
            if g.degree(x) != 2:
                raise ValidationError(f"cycle vertex {x} has degree {g.degree(x)}")
        if g.degree(vs[0]) == 2:
            raise ValidationError("cycle has no anchor (it is a whole component)")
        return self


def find_structures(g: Graph) -> tuple[list[PathSpec], list[CycleSpec]]:
    """All maximal paths (at least 3 edges) and pending cycles of ``g``.

    Each chain of degree-2 vertices is walked from its smaller-id end; the
    result is sorted for determinism.
    """
    paths: dict[frozenset, PathSpec] = {}
    cycles: dict[frozenset, CycleSpec] = {}
    for a in g.vertices():
        if g.degree(a) == 2:
            continue
        for b in sorted(g.neighbors(a)):
            if g.degree(b) != 2:
                continue
            chain = [a, b]
            prev, cur = a, b
            while g.degree(cur) == 2:
                x, y = g.neighbors(cur)
                prev, cur = cur, (y if x == prev else x)
                chain.append(cur)
            inner = frozenset(chain[1:-1])
            if chain[-1] == a:
                if inner not in cycles:
                    cycles[inner] = CycleSpec(tuple(chain[:-1]))
            elif len(chain) >= 4 and inner not in paths:
                if chain[-1] < a:
                    chain.reverse()
                paths[inner] = PathSpec(tuple(chain))
    return (
        sorted(paths.values(), key=lambda p: p.vertices),
        sorted(cycles.values(), key=lambda c: c.vertices),
    )


def _edges_of(vertices, indices, cyclic: bool = False) -> tuple:
    k = len(vertices)
    return tuple(
        tuple(sorted((vertices[i], vertices[(i + 1) % k] if cyclic else vertices[i + 1])))
        for i in indices
    )


# -- rules ------------------------------------------------------------------

def _start(g, trace, inplace):
    if trace is None:
        trace = ReductionTrace()
    if not inplace:
        g = g.copy()
    return g, trace


def apply_zero_rules(g: Graph, trace: ReductionTrace | None = None, inplace: bool = False):
    """Delete weight-0 edges, then degree-0 vertices."""
    g, trace = _start(g, trace, inplace)
    for u, v, w in list(g.weighted_edges()):
        if w == 0:
            ev = trace.record(WZeroDelete(u, v))
            ev.replay(g)
    for v in g.vertices():
        if g.degree(v) == 0:
            ev = trace.record(WZeroDelete(v))
            ev.replay(g)
    return g, trace


def apply_deg1_weighted_once(g: Graph, v: int, trace: ReductionTrace | None = None,
                             inplace: bool = False):
    """One application of the degree-one rule at leaf ``v``, done literally.

    Every other edge at the neighbor ``u`` is reweighted immediately, so a
    sweep over a star costs quadratic time; :func:`apply_deg1_weighted_exhaustive`
    is the linear version.
    """
    g, trace = _start(g, trace, inplace)
    if v not in g or g.degree(v) != 1:
        raise ValidationError(f"vertex {v} does not have degree one")
    (u,) = g.neighbors(v)
    d = g.weight(u, v)
    g.remove_vertex(v)
    trace.record(WDeg1(v, u, d, d))
    weights = {tuple(sorted((u, x))): g.weight(u, x) for x in g.neighbors(u)}
    ev = trace.record(WDeg1Rewrite({u: d} if d else {}, weights))
    ev.replay(g)
    return g, trace


def apply_deg1_weighted_naive(g: Graph, trace: ReductionTrace | None = None,
                              inplace: bool = False):
    """Reference: repeat :func:`apply_deg1_weighted_once` on the smallest leaf."""
    g, trace = _start(g, trace, inplace)
    while True:
        leaves = [v for v in g.vertices() if g.degree(v) == 1]
        if not leaves:
            return g, trace
        apply_deg1_weighted_once(g, leaves[0], trace, inplace=True)


def apply_deg1_weighted_exhaustive(g: Graph, trace: ReductionTrace | None = None,
                                   inplace: bool = False, check: bool = False):
    """Remove all degree-one vertices in one linear sweep.

    Counter ``c(x)`` records how much has been taken off every edge at
    ``x``, so the current weight of ``ab`` is ``max(0, w(ab) - c(a) - c(b))``
    without touching it.  Leaves are handled in ascending id order (a
    vertex that becomes a leaf joins the queue); at the end the surviving
    edges at vertices with a positive counter are rewritten once.
    ``check=True`` asserts that invariant against a literal reweighting
    after every step (quadratic; for tests only).
    """
    g, trace = _start(g, trace, inplace)
    counter: dict[int, int] = {}
    queue = [v for v in g.vertices() if g.degree(v) == 1]
    heapq.heapify(queue)
    shadow = g.copy() if check else None
    removed_any = False
    adj = g._adj  # hot loop: read adjacency directly
    pop, push, record = heapq.heappop, heapq.heappush, trace.record
    while queue:
        v = pop(queue)
        nb = adj.get(v)
        if nb is None or len(nb) != 1:
            continue
        ((u, w0),) = nb.items()
        cu = counter.get(u, 0)
        d = w0 - cu - counter.get(v, 0)
        if d > 0:
            counter[u] = cu + d
        else:
            d = 0
        g.remove_vertex(v)
        record(WDeg1(v, u, w0, d))
        removed_any = True
        if shadow is not None:
            _check_counters(shadow, g, counter, v, u, d)
        if len(adj[u]) == 1:
            push(queue, u)
    if removed_any:
        weights = {}
        for x in sorted(counter):
            if x in g:
                for y in g.neighbors(x):
                    weights[(min(x, y), max(x, y))] = g.weight(x, y)
        ev = trace.record(WDeg1Rewrite({x: c for x, c in counter.items() if c > 0}, weights))
        ev.replay(g)
    return g, trace


def _check_counters(shadow: Graph, g: Graph, counter, v, u, d) -> None:
    assert shadow.weight(u, v) == d, "decrement differs from the current edge weight"
    shadow.remove_vertex(v)
    for x in list(shadow.neighbors(u)):
        shadow.set_weight(u, x, max(0, shadow.weight(u, x) - d))
    for a, b, w in shadow.weighted_edges():
        eff = max(0, g.weight(a, b) - counter.get(a, 0) - counter.get(b, 0))
        assert eff == w, f"counter invariant broken on {a}-{b}: {eff} != {w}"


def solve_isolated_paths_cycles(g: Graph, trace: ReductionTrace | None = None,
                                inplace: bool = False):
    """Solve and remove every component whose maximum degree is at most 2."""
    g, trace = _start(g, trace, inplace)
    for comp in connected_components(g):
        if any(g.degree(x) > 2 for x in comp):
            continue
        order = _walk_component(g, comp)
        if len(comp) >= 3 and all(g.degree(x) == 2 for x in comp):
            weights = [g.weight(order[i], order[(i + 1) % len(order)]) for i in range(len(order))]
            weight, idx = mwm_on_cycle(weights).full
            matching = _edges_of(order, idx, cyclic=True)
        else:
            weights = [g.weight(a, b) for a, b in zip(order, order[1:])]
            weight, idx = _path_best(weights)
            matching = _edges_of(order, idx)
        ev = trace.record(IsolatedComponent(tuple(order), tuple(sorted(matching)), weight))
        ev.replay(g)
    return g, trace


def _walk_component(g: Graph, comp: list[int]) -> list[int]:
    ends = [x for x in comp if g.degree(x) <= 1]
    start = min(ends) if ends else min(comp)
    order = [start]
    prev = None
    cur = start
    while True:
        nxt = [x for x in sorted(g.neighbors(cur)) if x != prev and x != start]
        if not nxt:
            return order
        prev, cur = cur, nxt[0]
        order.append(cur)


def apply_pending_cycle(g: Graph, cycle: CycleSpec, trace: ReductionTrace | None = None,
                        inplace: bool = False):
    """Replace a pending cycle by the edge ``uz``, ``w(uz) = w(C) - w(C - u)``."""
    cycle.validate(g)
    g, trace = _start(g, trace, inplace)
    vs = cycle.vertices
    sol = mwm_on_cycle(cycle.weights(g))
    z = g.next_id
    ev = PendCycle(
        vs,
        z,
        sol.full[0] - sol.minus_u[0],
        tuple(sorted(_edges_of(vs, sol.full[1], cyclic=True))),
        tuple(sorted(_edges_of(vs, sol.minus_u[1], cyclic=True))),
        sol.minus_u[0],
    )
    trace.record(ev)
    ev.replay(g)
    return g, trace


def apply_max_path(g: Graph, path: PathSpec, trace: ReductionTrace | None = None,
                   inplace: bool = False):
    """Replace a maximal path ``u .. v`` by a new vertex ``z`` adjacent to both.

    ``w(uz) = w(P-v) - w(P-u-v)``, ``w(vz) = w(P-u) - w(P-u-v)`` and
    ``w(uv) = max(w(uv), w(P) - w(P-u-v))`` with ``w(uv) = 0`` when absent.
    """
    path.validate(g)
    g, trace = _start(g, trace, inplace)
    vs = path.vertices
    sol = mwm_on_path(path.weights(g))
    u, v = path.u, path.v
    base = sol.minus_uv[0]
    before = g.weight(u, v) if g.has_edge(u, v) else None
    ev = MaxPath(
        vs,
        g.next_id,
        sol.minus_v[0] - base,
        sol.minus_u[0] - base,
        before,
        max(before or 0, sol.full[0] - base),
        sol.full[0],
        base,
        tuple(sorted(_edges_of(vs, sol.full[1]))),
        tuple(sorted(_edges_of(vs, sol.minus_u[1]))),
        tuple(sorted(_edges_of(vs, sol.minus_v[1]))),
        tuple(sorted(_edges_of(vs, sol.minus_uv[1]))),
    )
    trace.record(ev)
    ev.replay(g)
    return g, trace


def apply_structures(g: Graph, trace: ReductionTrace | None = None, inplace: bool = False,
                     repeat: bool = True):
    """Enumerate first, then replace all maximal paths, then all pending cycles.

    A replaced cycle lowers the degree of its anchor, which can turn the
    anchor into the inner vertex of a new maximal path.  With ``repeat``
    the pass runs again until nothing is found; every replacement removes
    at least one vertex and adds no edge, so size bounds still hold.
    """
    g, trace = _start(g, trace, inplace)
    while True:
        paths, cycles = find_structures(g)
        for p in paths:
            apply_max_path(g, p, trace, inplace=True)
        for c in cycles:
            apply_pending_cycle(g, c, trace, inplace=True)
        if not repeat or not (paths or cycles):
            return g, trace


MODES = ("prescribed", "exhaustive")


def weighted_kernel_pipeline(g: Graph, mode: str = "prescribed", trace: ReductionTrace | None = None,
                             inplace: bool = False, first: str = "deg1"):
    """Weighted kernelization.

    ``prescribed``: zero rules, the degree-one sweep, isolated paths/cycles,
    then maximal paths and pending cycles until none is left; the kernel has at
    most ``7k`` vertices and ``9k`` edges for feedback edge number ``k >= 1``.
    ``exhaustive``: repeat all rules until none applies.  ``first`` picks
    whether the degree-one sweep (``"deg1"``) or the path/cycle pass
    (``"paths"``) runs first in each exhaustive round.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    if first not in ("deg1", "paths"):
        raise ValueError(f"unknown rule order {first!r}")
    g, trace = _start(g, trace, inplace)
    if mode == "prescribed":
        apply_zero_rules(g, trace, inplace=True)
        apply_deg1_weighted_exhaustive(g, trace, inplace=True)
        solve_isolated_paths_cycles(g, trace, inplace=True)
        apply_structures(g, trace, inplace=True)
        return g, trace
    while True:
        before = len(trace)
        apply_zero_rules(g, trace, inplace=True)
        if first == "paths":
            apply_structures(g, trace, inplace=True)
        apply_deg1_weighted_exhaustive(g, trace, inplace=True)
        apply_zero_rules(g, trace, inplace=True)
        solve_isolated_paths_cycles(g, trace, inplace=True)
        if first == "deg1":
            apply_structures(g, trace, inplace=True)
        if len(trace) == before:
            return g, trace


def lift_matching_weighted(trace: ReductionTrace, kernel_matching, kernel: Graph | None = None):
    return lift_matching(trace, kernel_matching, kernel)


@dataclass(frozen=True)
class WeightedBoundReport:
    k: int
    n: int
    m: int
    kernel_n: int
    kernel_m: int

    @property
    def vertex_bound(self) -> int:
        return 7 * self.k

    @property
    def edge_bound(self) -> int:
        return 9 * self.k

    @property
    def ok(self) -> bool:
        return self.kernel_n <= self.vertex_bound and self.kernel_m <= self.edge_bound


def check_weighted_kernel_bound(g: Graph, kernel: Graph) -> WeightedBoundReport:
    """Check ``|V| <= 7k`` and ``|E| <= 9k`` (an empty kernel when ``k = 0``)."""
    report = WeightedBoundReport(feedback_edge_number(g), g.n, g.m, kernel.n, kernel.m)
    if not report.ok:
        raise KernelBoundError(
            f"weighted kernel ({kernel.n} vertices, {kernel.m} edges) exceeds "
            f"({report.vertex_bound}, {report.edge_bound}) for k={report.k}"
        )
    return report


__all__ = [
    "GraphError", "PathSolution", "CycleSolution", "PathSpec", "CycleSpec", "mwm_on_path",
    "mwm_on_cycle", "find_structures", "apply_zero_rules", "apply_deg1_weighted_once",
    "apply_deg1_weighted_naive", "apply_deg1_weighted_exhaustive", "solve_isolated_paths_cycles",
    "apply_pending_cycle", "apply_max_path", "apply_structures", "weighted_kernel_pipeline",
    "lift_matching_weighted", "check_weighted_kernel_bound", "WeightedBoundReport", "MODES",
]
