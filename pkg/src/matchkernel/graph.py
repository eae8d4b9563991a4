"""Simple undirected graphs with stable integer vertex ids.

Both the unweighted and the weighted graph share one adjacency layout,
``adj[v][u] = weight``.  Unweighted graphs store weight 1 on every edge so
that exporting them to a weighted solver needs no special casing.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Iterator


class GraphError(Exception):
    """Base class for errors raised by this package."""


class VertexError(GraphError, KeyError):
    """Unknown vertex identifier."""

    def __str__(self):
        return Exception.__str__(self)


class ValidationError(GraphError, ValueError):
    """An input (weight, matching, witness, ...) violates its contract."""


def edge_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


class Graph:
    """Simple undirected graph.

    Self-loops are dropped and parallel edges are deduplicated at insertion;
    ``add_edge`` reports whether the edge was actually inserted.  Fresh
    vertices get ids from a counter that never goes below ``max(id) + 1``.
    """

    weighted = False

    def __init__(self, edges: Iterable = (), vertices: Iterable[int] = ()):
        self._adj: dict[int, dict[int, int]] = {}
        self._m = 0
        self._next_id = 0
        for v in vertices:
            self.add_vertex(v)
        for e in edges:
            self.add_edge(*e)

    # -- queries ---------------------------------------------------------
    @property
    def n(self) -> int:
        return len(self._adj)

    @property
    def m(self) -> int:
        return self._m

    @property
    def next_id(self) -> int:
        return self._next_id

    def __contains__(self, v) -> bool:
        return v in self._adj

    def __len__(self) -> int:
        return len(self._adj)

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, m={self.m})"

    def vertices(self) -> list[int]:
        return sorted(self._adj)

    def neighbors(self, v: int):
        try:
            return self._adj[v].keys()
        except KeyError:
            raise VertexError(f"unknown vertex {v}") from None

    def degree(self, v: int) -> int:
        try:
            return len(self._adj[v])
        except KeyError:
            raise VertexError(f"unknown vertex {v}") from None

    def has_edge(self, u: int, v: int) -> bool:
        return u in self._adj and v in self._adj[u]

    def weight(self, u: int, v: int) -> int:
        try:
            return self._adj[u][v]
        except KeyError:
            raise ValidationError(f"no edge {u}-{v}") from None

    def edges(self) -> Iterator[tuple[int, int]]:
        """Edges as ``(u, v)`` with ``u < v``, in ascending order."""
        for u in sorted(self._adj):
            for v in sorted(self._adj[u]):
                if u < v:
                    yield u, v

    def weighted_edges(self) -> Iterator[tuple[int, int, int]]:
        for u, v in self.edges():
            yield u, v, self._adj[u][v]

    def total_weight(self) -> int:
        return sum(w for _, _, w in self.weighted_edges())

    # -- mutation --------------------------------------------------------
    def add_vertex(self, v: int | None = None) -> int:
        if v is None:
            v = self._next_id
        elif v < 0:
            raise ValidationError(f"vertex ids must be non-negative, got {v}")
        if v not in self._adj:
            self._adj[v] = {}
        if v >= self._next_id:
            self._next_id = v + 1
        return v

    def fresh_vertex(self) -> int:
        return self.add_vertex(None)

    def add_edge(self, u: int, v: int, w: int = 1) -> bool:
        if w < 0:
            raise ValidationError(f"negative weight {w} on edge {u}-{v}")
        self.add_vertex(u)
        self.add_vertex(v)
        if u == v or v in self._adj[u]:
            return False
        self._adj[u][v] = w
        self._adj[v][u] = w
        self._m += 1
        return True

    def set_weight(self, u: int, v: int, w: int) -> None:
        if w < 0:
            raise ValidationError(f"negative weight {w} on edge {u}-{v}")
        if not self.has_edge(u, v):
            raise ValidationError(f"no edge {u}-{v}")
        self._adj[u][v] = w
        self._adj[v][u] = w

    def remove_edge(self, u: int, v: int) -> None:
        if not self.has_edge(u, v):
            raise ValidationError(f"no edge {u}-{v}")
        del self._adj[u][v]
        del self._adj[v][u]
        self._m -= 1

    def remove_vertex(self, v: int) -> None:
        try:
            nbrs = self._adj.pop(v)
        except KeyError:
            raise VertexError(f"unknown vertex {v}") from None
        for u in nbrs:
            del self._adj[u][v]
        self._m -= len(nbrs)

    def copy(self) -> Graph:
        g = type(self)()
        g._adj = {v: dict(nb) for v, nb in self._adj.items()}
        g._m = self._m
        g._next_id = self._next_id
        return g

    def relabel(self, mapping: dict[int, int]) -> Graph:
        """Return a copy with vertex ``v`` renamed to ``mapping.get(v, v)``."""
        g = type(self)()
        for v in self._adj:
            g.add_vertex(mapping.get(v, v))
        for u, v, w in self.weighted_edges():
            g.add_edge(mapping.get(u, u), mapping.get(v, v), w)
        g._next_id = max(g._next_id, self._next_id)
        return g

    def check_invariants(self) -> None:
        count = 0
        for v, nb in self._adj.items():
            if v in nb:
                raise AssertionError(f"self-loop at {v}")
            for u, w in nb.items():
                if self._adj.get(u, {}).get(v) != w:
                    raise AssertionError(f"asymmetric edge {v}-{u}")
                if w < 0:
                    raise AssertionError(f"negative weight on {v}-{u}")
            count += len(nb)
            if v >= self._next_id:
                raise AssertionError("id counter below an existing id")
        if count != 2 * self._m:
            raise AssertionError(f"edge count {self._m} != {count // 2}")

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.weighted == other.weighted) and self._adj == other._adj

    __hash__ = None


class WeightedGraph(Graph):
    """Graph with non-negative integer edge weights (first insertion wins)."""

    weighted = True

    def __init__(self, edges: Iterable = (), vertices: Iterable[int] = ()):
        super().__init__(vertices=vertices)
        for u, v, w in edges:
            self.add_edge(u, v, w)

    def to_unweighted(self) -> Graph:
        g = Graph(vertices=self._adj)
        for u, v in self.edges():
            g.add_edge(u, v)
        g._next_id = self._next_id
        return g


class Matching(frozenset):
    """Set of pairwise vertex-disjoint edges, each stored as ``(min, max)``.

    Disjointness is checked at construction; membership of the edges in a
    particular graph is checked by :meth:`validate`.
    """

    def __new__(cls, edges: Iterable = ()):
        keys = [edge_key(e[0], e[1]) for e in edges]
        seen: set[int] = set()
        for u, v in keys:
            if u == v:
                raise ValidationError(f"self-loop {u}-{v} in matching")
            if u in seen or v in seen:
                raise ValidationError(f"vertex reused in matching at edge {u}-{v}")
            seen.add(u)
            seen.add(v)
        return super().__new__(cls, keys)

    @classmethod
    def from_mate(cls, mate: dict[int, int]) -> Matching:
        return cls((u, v) for u, v in mate.items() if u < v)

    @property
    def size(self) -> int:
        return len(self)

    def mate(self) -> dict[int, int]:
        out = {}
        for u, v in self:
            out[u] = v
            out[v] = u
        return out

    def weight(self, g: Graph) -> int:
        return sum(g.weight(u, v) for u, v in self)

    def validate(self, g: Graph) -> Matching:
        for u, v in self:
            if not g.has_edge(u, v):
                raise ValidationError(f"matching edge {u}-{v} is not in the graph")
        return self

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self)

    def __repr__(self):
        return f"Matching({sorted(self)})"


def remove_vertex(g: Graph, v: int) -> Graph:
    g.remove_vertex(v)
    return g


def merge_vertices(g: Graph, u: int, w: int, z: int | None = None):
    """Replace ``u`` and ``w`` by one vertex ``z`` adjacent to both neighborhoods.

    The edge ``uw`` (if any) disappears, parallel edges collapse.  Returns
    ``(z, provenance)`` where ``provenance[x]`` is the subset of ``{u, w}``
    that was adjacent to ``x``; lifting uses it to pick an original edge.
    ``z`` defaults to a fresh id.
    """
    if u == w:
        raise ValidationError("cannot merge a vertex with itself")
    nu = set(g.neighbors(u))
    nw = set(g.neighbors(w))
    prov: dict[int, frozenset[int]] = {}
    for x in (nu | nw) - {u, w}:
        prov[x] = frozenset(y for y, nb in ((u, nu), (w, nw)) if x in nb)
    g.remove_vertex(u)
    g.remove_vertex(w)
    if z is None:
        z = g.fresh_vertex()
    elif z in g:
        raise ValidationError(f"merge target {z} already exists")
    else:
        g.add_vertex(z)
    for x in prov:
        g.add_edge(z, x)
    return z, prov


def connected_components(g: Graph) -> list[list[int]]:
    """Components as sorted vertex lists, ordered by smallest vertex."""
    seen: set[int] = set()
    comps = []
    for s in g.vertices():
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for u in g.neighbors(v):
                if u not in seen:
                    seen.add(u)
                    comp.append(u)
                    queue.append(u)
        comps.append(sorted(comp))
    return comps


def feedback_edge_number(g: Graph) -> int:
    """Minimum number of edges whose removal leaves a forest: m - n + #components."""
    return g.m - g.n + len(connected_components(g))


def induced_subgraph(g: Graph, vertices: Iterable[int]) -> Graph:
    keep = set(vertices)
    h = type(g)(vertices=sorted(keep))
    for u, v, w in g.weighted_edges():
        if u in keep and v in keep:
            h.add_edge(u, v, w)
    return h


def export_perfect_matching_instance(g: Graph):
    """Folklore reduction of max-weight matching to perfect matching.

    Returns ``(doubled, copy_of)`` where ``doubled`` holds ``g``, a disjoint
    copy of ``g`` with the same weights, and a weight-zero edge between every
    vertex and its copy.  A maximum-weight (perfect) matching of the result
    weighs exactly twice the maximum matching weight of ``g``.
    """
    offset = g.next_id
    copy_of = {v: v + offset for v in g.vertices()}
    out = WeightedGraph(vertices=g.vertices())
    for v in g.vertices():
        out.add_vertex(copy_of[v])
    for u, v, w in g.weighted_edges():
        out.add_edge(u, v, w)
        out.add_edge(copy_of[u], copy_of[v], w)
    for v, c in copy_of.items():
        out.add_edge(v, c, 0)
    return out, copy_of
