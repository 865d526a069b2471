import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semicomm.errors import CoverageError, DataError, ParseError
from semicomm.graph import (Graph, GroundTruth, Partition, adjacency, load_edge_list, load_labels,
                            load_partition, write_edge_list, write_labels, write_partition)


def test_load_edge_list_normalizes_and_dedups():
    g = load_edge_list("# comment\n1 2\n2 1\n3 2\n\n")
    assert g.n == 3
    assert g.sorted_edges() == [(0, 1), (1, 2)]
    assert g.degrees().tolist() == [1, 2, 1]


def test_load_edge_list_explicit_n_keeps_isolated_nodes():
    g = load_edge_list("1 2\n", n=5)
    assert g.n == 5 and g.num_edges == 1


def test_parse_error_reports_line():
    with pytest.raises(ParseError) as exc:
        load_edge_list("1 2\n# x\n1 x\n")
    assert exc.value.line == 3
    assert "line 3" in str(exc.value)


def test_self_loop_rejected():
    with pytest.raises(ParseError):
        load_edge_list("1 2\n2 2\n")


def test_edge_list_roundtrip(tmp_path):
    g = Graph.from_edges(6, [(0, 5), (1, 2), (3, 4)])
    path = tmp_path / "g.txt"
    write_edge_list(g, path)
    assert load_edge_list(path) == g


def test_adjacency_unit_diagonal_and_symmetric():
    a = adjacency(Graph.from_edges(3, [(0, 2)]))
    assert np.array_equal(a, np.array([[1, 0, 1], [0, 1, 0], [1, 0, 1]], dtype=float))


def test_labels_unlabeled_marker_and_codes():
    gt = load_labels("1\tB\n2\t-\n3\tA\n4\tB\n")
    assert gt.labeled == [0, 2, 3]
    assert gt.codes().tolist() == [1, 0, 1]
    assert gt.communities() == {"A": [2], "B": [0, 3]}


def test_numeric_labels_sort_numerically():
    gt = GroundTruth({0: "10", 1: "2", 2: "1"})
    assert gt.codes().tolist() == [2, 1, 0]


def test_duplicate_label_row_rejected():
    with pytest.raises(ParseError):
        load_labels("1\tA\n1\tB\n")


def test_labels_roundtrip_with_unlabeled():
    gt = GroundTruth({0: "x", 2: "y"})
    buf = io.StringIO()
    write_labels(gt, buf, n=3)
    assert buf.getvalue() == "1\tx\n2\t-\n3\ty\n"
    assert load_labels(buf.getvalue()) == gt


def test_check_range():
    with pytest.raises(DataError):
        GroundTruth({5: "a"}).check_range(3)


def test_partition_missing_node_is_coverage_error():
    with pytest.raises(CoverageError) as exc:
        load_partition("1\t0\n3\t1\n")
    assert exc.value.missing == (2,)


def test_partition_string_tokens():
    p = load_partition("1\tb\n2\ta\n3\tb\n")
    assert p.assign.tolist() == [1, 0, 1]


def test_partition_is_read_only():
    p = Partition([0, 1])
    with pytest.raises(ValueError):
        p.assign[0] = 3


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 5), min_size=1, max_size=30))
def test_partition_roundtrip(assign):
    p = Partition(assign)
    buf = io.StringIO()
    write_partition(p, buf)
    assert load_partition(buf.getvalue(), n=len(assign)) == p


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 15).flatmap(
    lambda n: st.tuples(st.just(n), st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
                                             .filter(lambda e: e[0] != e[1]), max_size=40))))
def test_adjacency_properties(case):
    n, edges = case
    a = adjacency(Graph.from_edges(n, edges))
    assert np.array_equal(a, a.T)
    assert np.all(np.diag(a) == 1)
    assert set(np.unique(a)) <= {0.0, 1.0}
    assert (a.sum() - n) / 2 == len({tuple(sorted(e)) for e in edges})
