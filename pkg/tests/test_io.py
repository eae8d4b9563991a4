import io

import pytest
from hypothesis import given

from matchkernel import Graph, ParseError, ValidationError, WeightedGraph, parse_edge_list, write_edge_list
from matchkernel.io import parse_matching, write_dimacs, write_matching

from graphgen import graphs


def test_parse_path():
    g = parse_edge_list("0 1\n1 2\n")
    assert (g.n, g.m) == (3, 2)


def test_parse_counts_dropped_lines():
    g, stats = parse_edge_list(b"# hi\n0 1\n0 1\n1 1\n", with_stats=True)
    assert (g.n, g.m) == (2, 1)
    assert (stats.duplicates, stats.self_loops, stats.comments) == (1, 1, 1)


def test_parse_keeps_zero_weight():
    g = parse_edge_list("0 1 5\n1 2 0\n", weighted=True)
    assert g.n == 3 and g.weight(0, 1) == 5 and g.weight(1, 2) == 0


@pytest.mark.parametrize("text, weighted, lineno", [
    ("0 1\n0 1 2\n", False, 2),
    ("0\n", False, 1),
    ("# c\n0 a\n", False, 2),
    ("0 1\n", True, 1),
    ("-1 2\n", False, 1),
])
def test_malformed_lines(text, weighted, lineno):
    with pytest.raises(ParseError) as info:
        parse_edge_list(text, weighted=weighted)
    assert info.value.lineno == lineno


def test_negative_weight_is_a_validation_error():
    with pytest.raises(ValidationError):
        parse_edge_list("0 1 -3\n", weighted=True)


def test_write_examples():
    buf = io.StringIO()
    write_edge_list(Graph([(0, 1), (1, 2)]), buf, header=False)
    assert buf.getvalue() == "0 1\n1 2\n"
    buf = io.StringIO()
    write_edge_list(WeightedGraph([(0, 1, 5)]), buf, header=False)
    assert buf.getvalue() == "0 1 5\n"
    buf = io.StringIO()
    write_edge_list(Graph(), buf)
    assert all(line.startswith("#") for line in buf.getvalue().splitlines())


@given(graphs(max_n=9))
def test_round_trip_unweighted(g):
    buf = io.StringIO()
    write_edge_list(g, buf)
    assert parse_edge_list(buf.getvalue()) == g


@given(graphs(max_n=9, weighted=True))
def test_round_trip_weighted(g):
    buf = io.StringIO()
    write_edge_list(g, buf)
    assert parse_edge_list(buf.getvalue(), weighted=True) == g


def test_dimacs_and_matching_files():
    g = WeightedGraph([(10, 20, 3), (20, 30, 4)])
    buf = io.StringIO()
    ids = write_dimacs(g, buf)
    assert buf.getvalue().splitlines() == ["p edge 3 2", "e 1 2 3", "e 2 3 4"]
    assert ids == {10: 1, 20: 2, 30: 3}
    m = parse_matching("# size=1\n20 30\n")
    out = io.StringIO()
    write_matching(m, out, g)
    assert out.getvalue() == "# size=1 weight=4\n20 30\n"
