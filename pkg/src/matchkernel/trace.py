"""Reduction traces: replayable event logs plus matching lift-back.

Every reduction rule appends one event.  An event knows how to

* ``replay`` itself on the graph it was recorded on (forward direction),
  which reproduces the kernel from the original input, and
* ``lift`` a matching of the graph right after it into a matching of the
  graph right before it (backward direction).

Offsets are the total amount by which the optimum shrank: the cardinality
offset for unweighted rules and the weight offset for weighted ones.

On disk a trace is one event per line, ``KIND {json payload}``.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import ClassVar, IO

from .graph import Graph, GraphError, Matching, ValidationError, edge_key, merge_vertices


class TraceError(GraphError):
    """A trace is malformed or inconsistent with the matching being lifted."""


def _unmatch(mate: dict, a):
    b = mate.pop(a, None)
    if b is not None:
        del mate[b]
    return b


def _match(mate: dict, a, b) -> None:
    if a in mate or b in mate:
        raise TraceError(f"lift conflict: {a} or {b} already matched")
    mate[a] = b
    mate[b] = a


def _add_all(mate: dict, edges) -> None:
    for a, b in edges:
        _match(mate, a, b)


def _pairs(edges) -> list[list[int]]:
    return [list(e) for e in sorted(edge_key(*e) for e in edges)]


def _tuples(pairs) -> tuple[tuple[int, int], ...]:
    return tuple(tuple(p) for p in pairs)


class LiftState:
    """Scratch state shared by events during one backward replay."""

    def __init__(self):
        self.counters: dict[int, int] = {}
        self.base_weight: dict[tuple[int, int], int] = {}


@dataclass(frozen=True)
class Event:
    kind: ClassVar[str] = ""

    @property
    def card_delta(self) -> int:
        return 0

    @property
    def weight_delta(self) -> int:
        return 0

    def replay(self, g: Graph) -> Graph:
        raise NotImplementedError

    def lift(self, mate: dict, state: LiftState) -> dict:
        raise NotImplementedError

    def payload(self) -> dict:
        raise NotImplementedError

    @classmethod
    def from_payload(cls, d: dict) -> Event:
        raise NotImplementedError


@dataclass(frozen=True)
class Relabel(Event):
    """Vertex renaming applied before reduction (permutation robustness runs)."""

    kind: ClassVar[str] = "RELABEL"
    mapping: dict

    def replay(self, g):
        return g.relabel(self.mapping)

    def lift(self, mate, state):
        inverse = {new: old for old, new in self.mapping.items()}
        return {inverse.get(a, a): inverse.get(b, b) for a, b in mate.items()}

    def payload(self):
        return {"map": sorted([a, b] for a, b in self.mapping.items())}

    @classmethod
    def from_payload(cls, d):
        return cls({a: b for a, b in d["map"]})


@dataclass(frozen=True)
class Deg0Delete(Event):
    kind: ClassVar[str] = "DEG0"
    v: int

    def replay(self, g):
        g.remove_vertex(self.v)
        return g

    def lift(self, mate, state):
        return mate

    def payload(self):
        return {"v": self.v}

    @classmethod
    def from_payload(cls, d):
        return cls(d["v"])


@dataclass(frozen=True)
class Deg1Match(Event):
    kind: ClassVar[str] = "DEG1"
    v: int
    u: int

    @property
    def card_delta(self):
        return 1

    def replay(self, g):
        g.remove_vertex(self.v)
        g.remove_vertex(self.u)
        return g

    def lift(self, mate, state):
        _match(mate, self.v, self.u)
        return mate

    def payload(self):
        return {"v": self.v, "u": self.u}

    @classmethod
    def from_payload(cls, d):
        return cls(d["v"], d["u"])


@dataclass(frozen=True)
class Deg2Merge(Event):
    """Degree-two vertex ``v`` removed, its neighbors ``u``/``w`` merged into ``z``."""

    kind: ClassVar[str] = "DEG2"
    v: int
    u: int
    w: int
    z: int
    provenance: dict = field(hash=False, compare=True)

    @property
    def card_delta(self):
        return 1

    def replay(self, g):
        g.remove_vertex(self.v)
        merge_vertices(g, self.u, self.w, self.z)
        return g

    def lift(self, mate, state):
        x = _unmatch(mate, self.z)
        if x is None:
            _match(mate, self.v, self.u)
            return mate
        try:
            src = self.provenance[x]
        except KeyError:
            raise TraceError(f"merged vertex {self.z} matched to non-neighbor {x}") from None
        if self.u in src:
            _match(mate, self.u, x)
            _match(mate, self.v, self.w)
        else:
            _match(mate, self.w, x)
            _match(mate, self.v, self.u)
        return mate

    def payload(self):
        prov = sorted([x, sorted(s)] for x, s in self.provenance.items())
        return {"v": self.v, "u": self.u, "w": self.w, "z": self.z, "prov": prov}

    @classmethod
    def from_payload(cls, d):
        prov = {x: frozenset(s) for x, s in d["prov"]}
        return cls(d["v"], d["u"], d["w"], d["z"], prov)


@dataclass(frozen=True)
class CrownRemove(Event):
    kind: ClassVar[str] = "CROWN"
    head: frozenset
    independent: frozenset
    matching: tuple

    @property
    def card_delta(self):
        return len(self.head)

    def replay(self, g):
        for x in sorted(self.head | self.independent):
            g.remove_vertex(x)
        return g

    def lift(self, mate, state):
        _add_all(mate, self.matching)
        return mate

    def payload(self):
        return {"H": sorted(self.head), "I": sorted(self.independent), "M": _pairs(self.matching)}

    @classmethod
    def from_payload(cls, d):
        return cls(frozenset(d["H"]), frozenset(d["I"]), _tuples(d["M"]))


@dataclass(frozen=True)
class LpRemove(Event):
    """Vertices fixed by the LP rule: ``one`` (x=1) and ``zero`` (x=0)."""

    kind: ClassVar[str] = "LP"
    one: frozenset
    zero: frozenset
    matching: tuple

    @property
    def card_delta(self):
        return len(self.one)

    def replay(self, g):
        for x in sorted(self.one | self.zero):
            g.remove_vertex(x)
        return g

    def lift(self, mate, state):
        _add_all(mate, self.matching)
        return mate

    def payload(self):
        return {"V1": sorted(self.one), "V0": sorted(self.zero), "M": _pairs(self.matching)}

    @classmethod
    def from_payload(cls, d):
        return cls(frozenset(d["V1"]), frozenset(d["V0"]), _tuples(d["M"]))


@dataclass(frozen=True)
class RelaxedCrownReplace(Event):
    kind: ClassVar[str] = "RCROWN"
    head: frozenset
    independent: frozenset
    w: int
    matchings: dict = field(hash=False)
    external: dict = field(hash=False)

    @property
    def card_delta(self):
        return len(self.head) - 1

    def replay(self, g):
        for x in sorted(self.head | self.independent):
            g.remove_vertex(x)
        g.add_vertex(self.w)
        for nb in self.external.values():
            for x in nb:
                g.add_edge(self.w, x)
        return g

    def lift(self, mate, state):
        x = _unmatch(mate, self.w)
        if x is None:
            v = min(self.head)
        else:
            candidates = [h for h in self.head if x in self.external.get(h, ())]
            if not candidates:
                raise TraceError(f"replacement vertex {self.w} matched to non-neighbor {x}")
            v = min(candidates)
            _match(mate, v, x)
        _add_all(mate, self.matchings[v])
        return mate

    def payload(self):
        return {
            "H": sorted(self.head),
            "I": sorted(self.independent),
            "w": self.w,
            "M": sorted([v, _pairs(m)] for v, m in self.matchings.items()),
            "ext": sorted([v, sorted(nb)] for v, nb in self.external.items()),
        }

    @classmethod
    def from_payload(cls, d):
        return cls(
            frozenset(d["H"]),
            frozenset(d["I"]),
            d["w"],
            {v: _tuples(m) for v, m in d["M"]},
            {v: tuple(nb) for v, nb in d["ext"]},
        )


@dataclass(frozen=True)
class WZeroDelete(Event):
    """Weight-zero edge ``(u, v)`` or isolated vertex ``(u, None)`` removed."""

    kind: ClassVar[str] = "WZERO"
    u: int
    v: int | None = None

    def replay(self, g):
        if self.v is None:
            g.remove_vertex(self.u)
        else:
            g.remove_edge(self.u, self.v)
        return g

    def lift(self, mate, state):
        return mate

    def payload(self):
        return {"u": self.u, "v": self.v}

    @classmethod
    def from_payload(cls, d):
        return cls(d["u"], d["v"])


@dataclass(frozen=True)
class WDeg1(Event):
    """Weighted degree-one removal of ``v`` (neighbor ``u``).

    ``weight`` is the weight of ``uv`` when the sweep started and
    ``decrement`` the amount subtracted from the optimum, which is also
    added to the counter of ``u``.  Weights of surviving edges are
    rewritten once per sweep by the following :class:`WDeg1Rewrite`.
    """

    kind: ClassVar[str] = "WDEG1"
    v: int
    u: int
    weight: int
    decrement: int

    @property
    def weight_delta(self):
        return self.decrement

    def replay(self, g):
        g.remove_vertex(self.v)
        return g

    def lift(self, mate, state):
        u, v = self.u, self.v
        state.base_weight[edge_key(u, v)] = self.weight
        x = mate.get(u)
        if x is None:
            _match(mate, u, v)
        elif self.decrement > 0:
            c = state.counters
            try:
                base = state.base_weight[edge_key(u, x)]
            except KeyError:
                raise TraceError(f"no sweep weight recorded for edge {u}-{x}") from None
            if base - c.get(u, 0) - c.get(x, 0) <= 0:
                _unmatch(mate, u)
                _match(mate, u, v)
        if self.decrement:
            state.counters[u] = state.counters.get(u, 0) - self.decrement
        return mate

    def payload(self):
        return {"v": self.v, "u": self.u, "w": self.weight, "d": self.decrement}

    @classmethod
    def from_payload(cls, d):
        return cls(d["v"], d["u"], d["w"], d["d"])


@dataclass(frozen=True)
class WDeg1Rewrite(Event):
    """End of a degree-one sweep: surviving edges get ``max(0, w - c(a) - c(b))``.

    ``counters`` holds every positive counter (removed vertices included);
    ``weights`` holds the pre-rewrite weight of each surviving edge that
    touches a vertex with a positive counter.
    """

    kind: ClassVar[str] = "WREWRITE"
    counters: dict = field(hash=False)
    weights: dict = field(hash=False)

    def replay(self, g):
        c = self.counters
        for (a, b), w in self.weights.items():
            g.set_weight(a, b, max(0, w - c.get(a, 0) - c.get(b, 0)))
        return g

    def lift(self, mate, state):
        state.counters = dict(self.counters)
        state.base_weight = dict(self.weights)
        return mate

    def payload(self):
        return {
            "c": sorted([v, x] for v, x in self.counters.items()),
            "w": sorted([a, b, w] for (a, b), w in self.weights.items()),
        }

    @classmethod
    def from_payload(cls, d):
        return cls({v: x for v, x in d["c"]}, {(a, b): w for a, b, w in d["w"]})


@dataclass(frozen=True)
class PendCycle(Event):
    """Pending cycle ``cycle`` (anchor first) replaced by the edge ``anchor``-``z``."""

    kind: ClassVar[str] = "PCYCLE"
    cycle: tuple
    z: int
    weight_uz: int
    mm_cycle: tuple
    mm_cycle_minus_u: tuple
    omega_cycle_minus_u: int

    @property
    def weight_delta(self):
        return self.omega_cycle_minus_u

    def replay(self, g):
        u = self.cycle[0]
        for x in self.cycle[1:]:
            g.remove_vertex(x)
        g.add_vertex(self.z)
        g.add_edge(u, self.z, self.weight_uz)
        return g

    def lift(self, mate, state):
        if _unmatch(mate, self.z) is not None:
            _add_all(mate, self.mm_cycle)
        else:
            _add_all(mate, self.mm_cycle_minus_u)
        return mate

    def payload(self):
        return {
            "C": list(self.cycle),
            "z": self.z,
            "wuz": self.weight_uz,
            "MC": _pairs(self.mm_cycle),
            "MCu": _pairs(self.mm_cycle_minus_u),
            "oCu": self.omega_cycle_minus_u,
        }

    @classmethod
    def from_payload(cls, d):
        return cls(tuple(d["C"]), d["z"], d["wuz"], _tuples(d["MC"]), _tuples(d["MCu"]), d["oCu"])


@dataclass(frozen=True)
class MaxPath(Event):
    """Maximal path ``path`` (endpoints first/last) replaced by ``z`` and edge ``uv``."""

    kind: ClassVar[str] = "MPATH"
    path: tuple
    z: int
    weight_uz: int
    weight_vz: int
    weight_uv_before: int | None
    weight_uv_after: int
    omega_p: int
    omega_p_minus_uv: int
    mm_p: tuple
    mm_p_minus_u: tuple
    mm_p_minus_v: tuple
    mm_p_minus_uv: tuple

    @property
    def weight_delta(self):
        return self.omega_p_minus_uv

    def replay(self, g):
        u, v = self.path[0], self.path[-1]
        for x in self.path[1:-1]:
            g.remove_vertex(x)
        g.add_vertex(self.z)
        g.add_edge(u, self.z, self.weight_uz)
        g.add_edge(v, self.z, self.weight_vz)
        if g.has_edge(u, v):
            g.set_weight(u, v, self.weight_uv_after)
        else:
            g.add_edge(u, v, self.weight_uv_after)
        return g

    def lift(self, mate, state):
        u, v, z = self.path[0], self.path[-1], self.z
        partner = mate.get(z)
        if partner == u:
            _unmatch(mate, z)
            _add_all(mate, self.mm_p_minus_v)
        elif partner == v:
            _unmatch(mate, z)
            _add_all(mate, self.mm_p_minus_u)
        elif mate.get(u) == v:
            before = self.weight_uv_before
            if before is not None and before > self.omega_p - self.omega_p_minus_uv:
                _add_all(mate, self.mm_p_minus_uv)
            else:
                _unmatch(mate, u)
                _add_all(mate, self.mm_p)
        else:
            _add_all(mate, self.mm_p_minus_uv)
        return mate

    def payload(self):
        return {
            "P": list(self.path),
            "z": self.z,
            "wuz": self.weight_uz,
            "wvz": self.weight_vz,
            "wuv0": self.weight_uv_before,
            "wuv1": self.weight_uv_after,
            "oP": self.omega_p,
            "oPuv": self.omega_p_minus_uv,
            "MP": _pairs(self.mm_p),
            "MPu": _pairs(self.mm_p_minus_u),
            "MPv": _pairs(self.mm_p_minus_v),
            "MPuv": _pairs(self.mm_p_minus_uv),
        }

    @classmethod
    def from_payload(cls, d):
        return cls(
            tuple(d["P"]), d["z"], d["wuz"], d["wvz"], d["wuv0"], d["wuv1"], d["oP"], d["oPuv"],
            _tuples(d["MP"]), _tuples(d["MPu"]), _tuples(d["MPv"]), _tuples(d["MPuv"]),
        )


@dataclass(frozen=True)
class IsolatedComponent(Event):
    """A bare path/cycle component solved directly and removed."""

    kind: ClassVar[str] = "ISOLATED"
    vertices: tuple
    matching: tuple
    weight: int

    @property
    def weight_delta(self):
        return self.weight

    def replay(self, g):
        for x in self.vertices:
            g.remove_vertex(x)
        return g

    def lift(self, mate, state):
        _add_all(mate, self.matching)
        return mate

    def payload(self):
        return {"V": list(self.vertices), "M": _pairs(self.matching), "w": self.weight}

    @classmethod
    def from_payload(cls, d):
        return cls(tuple(d["V"]), _tuples(d["M"]), d["w"])


EVENT_TYPES: dict[str, type[Event]] = {
    cls.kind: cls
    for cls in (
        Relabel, Deg0Delete, Deg1Match, Deg2Merge, CrownRemove, LpRemove,
        RelaxedCrownReplace, WZeroDelete, WDeg1, WDeg1Rewrite, PendCycle, MaxPath,
        IsolatedComponent,
    )
}


@dataclass
class ReductionTrace:
    events: list[Event] = field(default_factory=list)
    cardinality_offset: int = 0
    weight_offset: int = 0

    def record(self, event: Event) -> Event:
        self.events.append(event)
        self.cardinality_offset += event.card_delta
        self.weight_offset += event.weight_delta
        return event

    def extend(self, other: ReductionTrace) -> None:
        for ev in other.events:
            self.record(ev)

    def __len__(self):
        return len(self.events)

    def counts(self) -> Counter:
        return Counter(ev.kind for ev in self.events)

    def offset_history(self) -> list[tuple[int, int]]:
        card = weight = 0
        out = []
        for ev in self.events:
            card += ev.card_delta
            weight += ev.weight_delta
            out.append((card, weight))
        return out


def replay_trace(original: Graph, trace: ReductionTrace) -> Graph:
    """Re-apply every event to a copy of ``original``; yields the kernel."""
    g = original.copy()
    for ev in trace.events:
        g = ev.replay(g)
    return g


def lift_matching(trace: ReductionTrace, kernel_matching, kernel: Graph | None = None) -> Matching:
    """Turn a matching of the kernel into a matching of the original graph.

    The result has ``len(kernel_matching) + cardinality_offset`` edges for
    unweighted traces, and weight ``w(kernel_matching) + weight_offset`` for
    weighted ones, so an optimal kernel matching lifts to an optimal one.
    """
    if not isinstance(kernel_matching, Matching):
        kernel_matching = Matching(kernel_matching)
    if kernel is not None:
        kernel_matching.validate(kernel)
    mate = kernel_matching.mate()
    state = LiftState()
    for ev in reversed(trace.events):
        mate = ev.lift(mate, state)
    return Matching.from_mate(mate)


TRACE_HEADER = "# matchkernel-trace 1"


def dump_trace(trace: ReductionTrace, stream: IO[str]) -> None:
    stream.write(TRACE_HEADER + "\n")
    for ev in trace.events:
        stream.write(f"{ev.kind} {json.dumps(ev.payload(), separators=(',', ':'))}\n")
    stream.write(f"OFFSETS {trace.cardinality_offset} {trace.weight_offset}\n")


def load_trace(stream) -> ReductionTrace:
    if isinstance(stream, str):
        import io

        stream = io.StringIO(stream)
    trace = ReductionTrace()
    declared = None
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        kind, _, rest = line.partition(" ")
        if kind == "OFFSETS":
            declared = tuple(int(x) for x in rest.split())
            continue
        try:
            cls = EVENT_TYPES[kind]
        except KeyError:
            raise TraceError(f"line {lineno}: unknown event kind {kind!r}") from None
        try:
            trace.record(cls.from_payload(json.loads(rest)))
        except (ValueError, KeyError, TypeError) as exc:
            raise TraceError(f"line {lineno}: bad {kind} payload: {exc}") from None
    if declared is not None and declared != (trace.cardinality_offset, trace.weight_offset):
        raise TraceError(
            f"declared offsets {declared} disagree with events "
            f"{(trace.cardinality_offset, trace.weight_offset)}"
        )
    return trace


__all__ = [
    "Event", "Relabel", "Deg0Delete", "Deg1Match", "Deg2Merge", "CrownRemove", "LpRemove",
    "RelaxedCrownReplace", "WZeroDelete", "WDeg1", "WDeg1Rewrite", "PendCycle", "MaxPath",
    "IsolatedComponent", "ReductionTrace", "TraceError", "ValidationError", "replay_trace",
    "lift_matching", "dump_trace", "load_trace",
]
