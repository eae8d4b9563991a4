"""Crown reductions driven by the vertex-cover LP.

A crown ``(H, I)`` is an independent set ``I`` with ``H = N(I)`` and a
matching that saturates ``H`` into ``I``.  Deleting ``H | I`` lowers the
maximum matching size by exactly ``|H|``.

Crowns are found in bulk through the half-integral vertex-cover LP.  On
the bipartite double of ``G`` a maximum matching gives a minimum cover and
hence an optimal LP solution; the strongly connected components of the
matching's residual network then split every variable into "always 0",
"always 1" or "1/2 in the most integral optimum".  The vertices fixed to
0 and 1 form a crown, and after removing them no crown is left.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graph import Graph, ValidationError, edge_key
from .solvers import BipartiteGraph, OracleGuardError, hopcroft_karp, hopcroft_karp_indexed, kosaraju_indexed
from .trace import CrownRemove, LpRemove, RelaxedCrownReplace, ReductionTrace, lift_matching
from .unweighted import apply_degree_rules_exhaustive


class BipartiteDouble:
    """Bipartite double cover: ``v_L u_R`` and ``u_L v_R`` for every edge ``uv``.

    Left and right copies of the ``i``-th vertex (ascending id) both have
    index ``i`` in :attr:`bipartite`.
    """

    def __init__(self, g: Graph):
        self.vertices: list[int] = g.vertices()
        self.index = {v: i for i, v in enumerate(self.vertices)}
        adj = [[self.index[u] for u in g.neighbors(v)] for v in self.vertices]
        self.bipartite = BipartiteGraph(len(self.vertices), len(self.vertices), adj)

    @property
    def n(self) -> int:
        return 2 * len(self.vertices)

    @property
    def m(self) -> int:
        return self.bipartite.m

    def edges(self):
        """Edges as ``((v, "L"), (u, "R"))`` pairs."""
        vs = self.vertices
        for i, nb in enumerate(self.bipartite.adj):
            for j in nb:
                yield (vs[i], "L"), (vs[j], "R")

    def maximum_matching(self) -> list[int]:
        """Hopcroft-Karp matching as ``mate_left[i]`` (right index or -1)."""
        return hopcroft_karp_indexed(self.bipartite)


def build_bipartite_double(g: Graph) -> BipartiteDouble:
    return BipartiteDouble(g)


def _as_mate_left(bd: BipartiteDouble, matching) -> list[int]:
    if isinstance(matching, list):
        return matching
    mate = [-1] * len(bd.vertices)
    for (a, _), (b, _) in matching:
        mate[bd.index[a]] = bd.index[b]
    return mate


def konig_vertex_cover(bd: BipartiteDouble, matching) -> frozenset:
    """Minimum vertex cover of the double from a maximum matching.

    ``matching`` is either ``mate_left`` as returned by
    :meth:`BipartiteDouble.maximum_matching` or an iterable of
    ``((v, "L"), (u, "R"))`` pairs.  The cover is a set of ``(v, side)``.
    Raises :class:`ValidationError` if the matching is not maximum.
    """
    mate_l = _as_mate_left(bd, matching)
    k = len(bd.vertices)
    adj = bd.bipartite.adj
    mate_r = [-1] * k
    for i, j in enumerate(mate_l):
        if j != -1:
            if mate_r[j] != -1 or j not in adj[i]:
                raise ValidationError("not a matching of the bipartite double")
            mate_r[j] = i
    seen_l = [False] * k
    seen_r = [False] * k
    stack = [i for i in range(k) if mate_l[i] == -1]
    for i in stack:
        seen_l[i] = True
    while stack:
        i = stack.pop()
        for j in adj[i]:
            if j == mate_l[i] or seen_r[j]:
                continue
            seen_r[j] = True
            nxt = mate_r[j]
            if nxt == -1:
                raise ValidationError("matching is not maximum: augmenting path found")
            if not seen_l[nxt]:
                seen_l[nxt] = True
                stack.append(nxt)
    vs = bd.vertices
    cover = {(vs[i], "L") for i in range(k) if not seen_l[i]}
    cover |= {(vs[j], "R") for j in range(k) if seen_r[j]}
    return frozenset(cover)


@dataclass(frozen=True)
class LPSolution:
    """Half-integral vertex-cover LP solution ``x`` split by value."""

    zero: frozenset
    half: frozenset
    one: frozenset

    @property
    def objective(self) -> Fraction:
        return len(self.one) + Fraction(len(self.half), 2)

    def value(self, v) -> Fraction:
        if v in self.one:
            return Fraction(1)
        if v in self.zero:
            return Fraction(0)
        return Fraction(1, 2)

    def check_feasible(self, g: Graph) -> None:
        for u, v in g.edges():
            if self.value(u) + self.value(v) < 1:
                raise ValidationError(f"LP solution leaves edge {u}-{v} uncovered")


def lp_solution_from_cover(bd: BipartiteDouble, cover) -> LPSolution:
    """``x_v = 1`` if both copies are in the cover, 0 if neither, 1/2 otherwise."""
    cover = frozenset(cover)
    for a, b in bd.edges():
        if a not in cover and b not in cover:
            raise ValidationError(f"{a}-{b} of the double is not covered")
    zero, half, one = set(), set(), set()
    for v in bd.vertices:
        c = ((v, "L") in cover) + ((v, "R") in cover)
        (zero, half, one)[c].add(v)
    return LPSolution(frozenset(zero), frozenset(half), frozenset(one))


def maximal_persistency(bd: BipartiteDouble, matching=None) -> LPSolution:
    """Optimal LP solution with as few half-valued variables as possible.

    Model the double as a flow network ``s -> v_L -> u_R -> t`` (unit
    capacities at ``s`` and ``t``).  Averaging the maximum flow of
    ``matching`` with its mirror image (swap L/R, reverse arcs) gives a
    maximum flow whose residual network is skew-symmetric, with ``v_L`` and
    ``v_R`` playing the roles of a literal and its negation.  Minimum cuts
    are then exactly the implication-closed "true" sets of a 2-SAT
    instance: ``v`` is half-valued iff ``v_L`` and ``v_R`` share a
    strongly connected component, and otherwise the usual 2-SAT choice
    (the literal whose component is nearer the sinks is true) yields one
    consistent minimum cut, read back as ``x_v = 0`` when ``v_L`` is on
    the source side and ``x_v = 1`` when ``v_R`` is.
    """
    if matching is None:
        mate_l = bd.maximum_matching()
    else:
        mate_l = _as_mate_left(bd, matching)
        konig_vertex_cover(bd, mate_l)  # validates maximality
    k = len(bd.vertices)
    adj = bd.bipartite.adj
    mate_r = [-1] * k
    for i, j in enumerate(mate_l):
        if j != -1:
            mate_r[j] = i
    S, T = 0, 1

    def L(i):
        return 2 + 2 * i

    def R(i):
        return 3 + 2 * i

    succ: list[list[int]] = [[] for _ in range(2 + 2 * k)]
    succ[T].append(S)
    for i in range(k):
        both_matched = mate_l[i] != -1 and mate_r[i] != -1
        any_matched = mate_l[i] != -1 or mate_r[i] != -1
        if not both_matched:
            succ[S].append(L(i))
            succ[R(i)].append(T)
        if any_matched:
            succ[L(i)].append(S)
            succ[T].append(R(i))
        for j in adj[i]:
            succ[L(i)].append(R(j))
            if mate_l[i] == j or mate_l[j] == i:
                succ[R(j)].append(L(i))
    comps = kosaraju_indexed(len(succ), succ)
    position = [0] * len(succ)
    for pos, comp in enumerate(comps):
        for x in comp:
            position[x] = pos
    if position[S] == position[T]:
        raise ValidationError("matching is not maximum: source and sink are connected")
    zero, half, one = set(), set(), set()
    for i, v in enumerate(bd.vertices):
        pl, pr = position[L(i)], position[R(i)]
        if pl == pr:
            half.add(v)
        elif pl < pr:
            zero.add(v)
        else:
            one.add(v)
    return LPSolution(frozenset(zero), frozenset(half), frozenset(one))


def lp_persistency(g: Graph) -> LPSolution:
    return maximal_persistency(build_bipartite_double(g))


def _saturating_matching(g: Graph, heads, tails) -> list[tuple[int, int]]:
    heads = sorted(heads)
    tails = sorted(tails)
    tail_set = set(tails)
    edges = [(h, t) for h in heads for t in sorted(g.neighbors(h)) if t in tail_set]
    b = BipartiteGraph.from_edges(heads, tails, edges)
    return sorted(hopcroft_karp(b).items())


def apply_lp_rule(g: Graph, sol: LPSolution | None = None, trace: ReductionTrace | None = None,
                  inplace: bool = False):
    """Remove ``V0 | V1`` and raise the cardinality offset by ``|V1|``."""
    if trace is None:
        trace = ReductionTrace()
    if sol is None:
        sol = lp_persistency(g)
    if not inplace:
        g = g.copy()
    if not sol.one and not sol.zero:
        return g, trace
    matching = _saturating_matching(g, sol.one, sol.zero)
    if len(matching) != len(sol.one):
        raise ValidationError(
            f"LP rule: only {len(matching)} of {len(sol.one)} one-valued vertices "
            "can be matched into the zero-valued ones"
        )
    ev = LpRemove(sol.one, sol.zero, tuple(matching))
    trace.record(ev)
    ev.replay(g)
    return g, trace


@dataclass(frozen=True)
class Crown:
    head: frozenset
    independent: frozenset
    matching: tuple

    def validate(self, g: Graph) -> Crown:
        _check_head(g, self.head, self.independent)
        if len(self.head) > len(self.independent):
            raise ValidationError("crown head is larger than its independent set")
        covered = set()
        for h, i in self.matching:
            if h not in self.head or i not in self.independent or not g.has_edge(h, i):
                raise ValidationError(f"crown matching edge {h}-{i} is invalid")
            if h in covered or i in covered:
                raise ValidationError("crown matching is not a matching")
            covered.update((h, i))
        if not self.head <= covered:
            raise ValidationError("crown matching does not saturate the head")
        return self

    @classmethod
    def from_independent(cls, g: Graph, independent) -> Crown:
        """Build the crown ``(N(I), I)``, computing the saturating matching."""
        independent = frozenset(independent)
        head = frozenset(x for i in independent for x in g.neighbors(i))
        matching = tuple(_saturating_matching(g, head, independent))
        return cls(head, independent, matching).validate(g)


def _check_head(g: Graph, head, independent) -> None:
    if not independent:
        raise ValidationError("independent set is empty")
    for v in head | independent:
        if v not in g:
            raise ValidationError(f"unknown vertex {v}")
    if head & independent:
        raise ValidationError("head and independent set overlap")
    nbrs = set()
    for i in independent:
        for x in g.neighbors(i):
            if x in independent:
                raise ValidationError(f"{i}-{x}: set is not independent")
            nbrs.add(x)
    if nbrs != set(head):
        raise ValidationError("head is not the neighborhood of the independent set")


def apply_crown(g: Graph, crown: Crown, trace: ReductionTrace | None = None, inplace: bool = False):
    crown.validate(g)
    if trace is None:
        trace = ReductionTrace()
    if not inplace:
        g = g.copy()
    ev = CrownRemove(crown.head, crown.independent, tuple(sorted(crown.matching)))
    trace.record(ev)
    ev.replay(g)
    return g, trace


def _subset_tables(g: Graph, guard: int, what: str):
    if g.n > guard:
        raise OracleGuardError(f"{what} refuses graphs with more than {guard} vertices (n={g.n})")
    verts = g.vertices()
    k = len(verts)
    index = {v: i for i, v in enumerate(verts)}
    nbmask = np.zeros(k, dtype=np.int64)
    for u, v in g.edges():
        nbmask[index[u]] |= 1 << index[v]
        nbmask[index[v]] |= 1 << index[u]
    size = 1 << k
    nb = np.zeros(size, dtype=np.int64)
    for i in range(k):
        half = 1 << i
        nb[half:2 * half] = nb[:half] | nbmask[i]
    masks = np.arange(size, dtype=np.int64)
    independent = (masks & nb) == 0
    independent[0] = False
    return verts, masks, nb, independent


def _bits(verts, mask: int) -> frozenset:
    return frozenset(v for i, v in enumerate(verts) if mask >> i & 1)


def find_crown_bruteforce(g: Graph, guard: int = 18) -> Crown | None:
    """Exhaustive crown search; returns ``None`` only if ``g`` has no crown.

    Among nonempty independent sets, one minimizing ``|N(I)| - |I|`` always
    satisfies Hall's condition for ``N(I)`` (a violating subset would give
    an independent set with smaller surplus), so a crown exists iff that
    minimum is at most zero.  Ties prefer larger ``I``.
    """
    verts, masks, nb, independent = _subset_tables(g, guard, "find_crown_bruteforce")
    if not independent.any():
        return None
    surplus = np.bitwise_count(nb).astype(np.int64) - np.bitwise_count(masks).astype(np.int64)
    surplus = np.where(independent, surplus, np.iinfo(np.int64).max)
    best = surplus.min()
    if best > 0:
        return None
    ties = np.flatnonzero(surplus == best)
    pick = int(ties[np.argmax(np.bitwise_count(masks[ties]))])
    return Crown.from_independent(g, _bits(verts, pick))


@dataclass(frozen=True)
class RelaxedCrown:
    """``(H, I)`` plus, for every ``v`` in ``H``, a matching saturating ``H - v`` into ``I``."""

    head: frozenset
    independent: frozenset
    matchings: dict

    def validate(self, g: Graph) -> RelaxedCrown:
        _check_head(g, self.head, self.independent)
        if not self.head:
            raise ValidationError("relaxed crown needs a nonempty head")
        if len(self.head) > len(self.independent) + 1:
            raise ValidationError("relaxed crown head exceeds |I| + 1")
        if set(self.matchings) != set(self.head):
            raise ValidationError("need one matching per head vertex")
        for v, m in self.matchings.items():
            covered = set()
            for h, i in m:
                if h not in self.head or h == v or i not in self.independent or not g.has_edge(h, i):
                    raise ValidationError(f"matching for {v}: edge {h}-{i} is invalid")
                if h in covered or i in covered:
                    raise ValidationError(f"matching for {v} is not a matching")
                covered.update((h, i))
            if not (self.head - {v}) <= covered:
                raise ValidationError(f"matching for {v} does not saturate the rest of the head")
        return self

    @classmethod
    def from_independent(cls, g: Graph, independent) -> RelaxedCrown:
        independent = frozenset(independent)
        head = frozenset(x for i in independent for x in g.neighbors(i))
        matchings = {
            v: tuple(_saturating_matching(g, head - {v}, independent)) for v in sorted(head)
        }
        return cls(head, independent, matchings).validate(g)


def find_relaxed_crown_bruteforce(g: Graph, guard: int = 16) -> RelaxedCrown | None:
    """Exhaustive search for a relaxed crown (test-witness generator).

    Returns the valid witness with the largest ``I`` (ties: smallest mask),
    or ``None``.  Exponential; there is no efficient detector.
    """
    verts, masks, nb, independent = _subset_tables(g, guard, "find_relaxed_crown_bruteforce")
    surplus = np.bitwise_count(nb).astype(np.int64) - np.bitwise_count(masks).astype(np.int64)
    ok = independent & (nb != 0) & (surplus <= 1)
    cand = np.flatnonzero(ok)
    order = np.argsort(-np.bitwise_count(masks[cand]), kind="stable")
    for mask in cand[order]:
        try:
            return RelaxedCrown.from_independent(g, _bits(verts, int(mask)))
        except ValidationError:
            continue
    return None


def apply_relaxed_crown(g: Graph, rc: RelaxedCrown, trace: ReductionTrace | None = None,
                        inplace: bool = False, assume_crown_free: bool = False, guard: int = 18):
    """Replace ``H | I`` by one vertex ``w`` adjacent to ``N(H) - (H | I)``.

    Only sound on crown-free graphs.  That is checked exhaustively for
    graphs with at most ``guard`` vertices; larger graphs need
    ``assume_crown_free=True``.
    """
    rc.validate(g)
    if not assume_crown_free:
        if g.n > guard:
            raise ValidationError(
                f"cannot check crown-freeness of a {g.n}-vertex graph; pass assume_crown_free=True"
            )
        found = find_crown_bruteforce(g, guard=guard)
        if found is not None:
            raise ValidationError(
                f"graph contains a crown (H={sorted(found.head)}, I={sorted(found.independent)}); "
                "remove crowns before applying a relaxed crown"
            )
    if trace is None:
        trace = ReductionTrace()
    if not inplace:
        g = g.copy()
    removed = rc.head | rc.independent
    external = {
        h: tuple(sorted(x for x in g.neighbors(h) if x not in removed)) for h in sorted(rc.head)
    }
    w = g.next_id
    ev = RelaxedCrownReplace(
        rc.head,
        rc.independent,
        w,
        {v: tuple(sorted(edge_key(*e) for e in m)) for v, m in rc.matchings.items()},
        external,
    )
    trace.record(ev)
    ev.replay(g)
    return g, trace


def lp_kernelize(g: Graph, trace: ReductionTrace | None = None, inplace: bool = False):
    """LP/crown rule alone, repeated until it removes nothing."""
    if trace is None:
        trace = ReductionTrace()
    if not inplace:
        g = g.copy()
    while g.n:
        sol = lp_persistency(g)
        if not sol.one and not sol.zero:
            break
        apply_lp_rule(g, sol, trace, inplace=True)
    return g, trace


def crown_kernelize(g: Graph, trace: ReductionTrace | None = None, inplace: bool = False):
    """Degree rules, then the LP rule, repeated until neither changes the graph.

    The kernel has minimum degree three, contains no crown, and has at most
    twice as many vertices as a minimum vertex cover of ``g``.
    """
    if trace is None:
        trace = ReductionTrace()
    if not inplace:
        g = g.copy()
    while True:
        apply_degree_rules_exhaustive(g, trace, inplace=True)
        if not g.n:
            break
        sol = lp_persistency(g)
        if not sol.one and not sol.zero:
            break
        apply_lp_rule(g, sol, trace, inplace=True)
    return g, trace


def lift_matching_crown(trace: ReductionTrace, kernel_matching, kernel: Graph | None = None):
    return lift_matching(trace, kernel_matching, kernel)


RULE_SETS = ("degree", "crown", "all")


def kernelize_unweighted(g: Graph, rules: str = "all", trace: ReductionTrace | None = None,
                         inplace: bool = False):
    """Dispatch on a rule-set name: ``degree``, ``crown`` (LP rule only) or ``all``."""
    if rules == "degree":
        return apply_degree_rules_exhaustive(g, trace, inplace)
    if rules == "crown":
        return lp_kernelize(g, trace, inplace)
    if rules == "all":
        return crown_kernelize(g, trace, inplace)
    raise ValueError(f"unknown rule set {rules!r}; expected one of {RULE_SETS}")
