"""Plain-text edge lists and a DIMACS-flavored writer.

Edge-list format: one edge per line, ``u v`` or ``u v w`` (weighted), ids
are non-negative decimal integers, ``#`` starts a comment line.  Duplicate
edges keep their first weight; self-loops are dropped.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import IO

from .graph import Graph, GraphError, Matching, ValidationError, WeightedGraph


ISOLATED_TAG = "# isolated "


class ParseError(GraphError, ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno
        self.message = message

    def __reduce__(self):
        return type(self), (self.lineno, self.message)


@dataclass
class ParseStats:
    duplicates: int = 0
    self_loops: int = 0
    comments: int = 0


def _text_lines(source):
    if isinstance(source, (bytes, bytearray)):
        source = source.decode()
    if isinstance(source, str):
        source = io.StringIO(source)
    for line in source:
        if isinstance(line, bytes):
            line = line.decode()
        yield line


def parse_edge_list(source, weighted: bool = False, with_stats: bool = False):
    """Parse an edge list from a string, bytes, or an open (text/binary) file."""
    g = WeightedGraph() if weighted else Graph()
    stats = ParseStats()
    for lineno, line in enumerate(_text_lines(source), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#") or line.startswith("%"):
            stats.comments += 1
            if line.startswith(ISOLATED_TAG):
                for tok in line[len(ISOLATED_TAG):].split():
                    if not tok.isdigit():
                        raise ParseError(lineno, f"bad isolated vertex id {tok!r}")
                    g.add_vertex(int(tok))
            continue
        parts = line.split()
        if len(parts) != (3 if weighted else 2):
            expected = "'u v w'" if weighted else "'u v'"
            raise ParseError(lineno, f"expected {expected}, got {line!r}")
        try:
            nums = [int(p) for p in parts]
        except ValueError:
            raise ParseError(lineno, f"non-integer token in {line!r}") from None
        u, v = nums[0], nums[1]
        if u < 0 or v < 0:
            raise ParseError(lineno, f"negative vertex id in {line!r}")
        w = nums[2] if weighted else 1
        if w < 0:
            raise ValidationError(f"line {lineno}: negative weight {w}")
        if u == v:
            stats.self_loops += 1
            continue
        if not g.add_edge(u, v, w):
            stats.duplicates += 1
    if with_stats:
        return g, stats
    return g


def read_graph(path, weighted: bool = False, with_stats: bool = False):
    with open(path, "rb") as fh:
        return parse_edge_list(fh, weighted=weighted, with_stats=with_stats)


def write_edge_list(g: Graph, stream: IO[str], header: bool = True) -> None:
    """Write ``g`` so that ``parse_edge_list`` reads back the same graph.

    Isolated vertices go into a ``# isolated ...`` comment, which
    ``parse_edge_list`` reads back; other tools simply skip it.
    """
    if header:
        stream.write(f"# n={g.n} m={g.m}{' weighted' if g.weighted else ''}\n")
        isolated = [v for v in g.vertices() if g.degree(v) == 0]
        if isolated:
            stream.write(ISOLATED_TAG + " ".join(map(str, isolated)) + "\n")
    for u, v, w in g.weighted_edges():
        if g.weighted:
            stream.write(f"{u} {v} {w}\n")
        else:
            stream.write(f"{u} {v}\n")


def write_dimacs(g: Graph, stream: IO[str]) -> dict[int, int]:
    """Write ``p edge n m`` plus ``e u v [w]`` lines with 1-based dense ids.

    Returns the id map (original -> DIMACS id) since external solvers expect
    vertices numbered 1..n.
    """
    ids = {v: i for i, v in enumerate(g.vertices(), start=1)}
    stream.write(f"p edge {g.n} {g.m}\n")
    for u, v, w in g.weighted_edges():
        if g.weighted:
            stream.write(f"e {ids[u]} {ids[v]} {w}\n")
        else:
            stream.write(f"e {ids[u]} {ids[v]}\n")
    return ids


def write_matching(matching: Matching, stream: IO[str], g: Graph | None = None) -> None:
    if g is not None:
        stream.write(f"# size={matching.size} weight={matching.weight(g)}\n")
    for u, v in matching.sorted_edges():
        stream.write(f"{u} {v}\n")


def parse_matching(source) -> Matching:
    edges = []
    for lineno, line in enumerate(_text_lines(source), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except (ValueError, IndexError):
            raise ParseError(lineno, f"bad matching line {line!r}") from None
    return Matching(edges)
