import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import matrix_fixpoint
from semicomm.constraints import ConstraintSet
from semicomm.errors import DataError
from semicomm.graph import Graph, adjacency
from semicomm.revision import Variant, build_variant, dump_matrix, load_matrix, revise, variant_constraints


def _instance(n, labels, pairs, edges):
    ml = {p for p in pairs if labels[p[0]] == labels[p[1]]}
    cl = {p for p in pairs if labels[p[0]] != labels[p[1]]}
    return ConstraintSet(n, ml, cl), adjacency(Graph.from_edges(n, edges))


@st.composite
def instances(draw):
    n = draw(st.integers(2, 10))
    labels = draw(st.lists(st.integers(0, 2), min_size=n, max_size=n))
    pair = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda p: p[0] != p[1])
    pairs = draw(st.sets(pair, max_size=15))
    edges = draw(st.sets(pair, max_size=20))
    return _instance(n, labels, pairs, edges)


def test_revise_small_example():
    a = adjacency(Graph.from_edges(3, [(0, 1), (1, 2)]))
    b = revise(a, ConstraintSet(3, {(0, 2)}, {(0, 1)}), alpha=2.0)
    assert np.array_equal(b, np.array([[1, 0, 2], [0, 1, 1], [2, 1, 1]], dtype=float))
    assert a[0, 1] == 1  # input untouched


def test_revise_rejects_bad_alpha_and_size():
    a = np.eye(2)
    with pytest.raises(ValueError):
        revise(a, ConstraintSet(2), alpha=0)
    with pytest.raises(DataError):
        revise(a, ConstraintSet(3, {(0, 2)}))


@settings(max_examples=150, deadline=None)
@given(instances())
def test_b2_equals_matrix_fixpoint(case):
    s, a = case
    b1 = build_variant(a, s, "B1")
    b2 = build_variant(a, s, "B2")
    assert np.array_equal(b2, matrix_fixpoint(b1, s.n, s.ml, s.cl, 2.0))


@settings(max_examples=150, deadline=None)
@given(instances())
def test_revision_invariants(case):
    s, a = case
    for v in Variant:
        b = build_variant(a, s, v)
        assert np.array_equal(b, b.T)
        assert np.all(np.diag(b) == 1)
        assert set(np.unique(b)) <= {0.0, 1.0, 2.0}
    # B2 only ever rewrites more entries than B1; untouched entries equal A
    b1, b2 = build_variant(a, s, "B1"), build_variant(a, s, "B2")
    changed1 = b1 != a
    assert np.all(b2[changed1] == b1[changed1])
    assert np.array_equal(build_variant(a, s, "A"), a)


def test_variant_counts():
    s = ConstraintSet(4, {(0, 1), (1, 2)}, {(2, 3)})
    assert [len(x) for x in variant_constraints(s, "B1")] == [3, 3]
    assert [len(x) for x in variant_constraints(s, "B2")] == [3, 6]
    assert [len(x) for x in variant_constraints(s, "B1_ML")] == [2, 2]
    assert [len(x) for x in variant_constraints(s, "B1_CL")] == [1, 1]
    assert [len(x) for x in variant_constraints(s, "B2_ML")] == [2, 3]
    assert [len(x) for x in variant_constraints(s, "A")] == [0, 0]


def test_variant_parse():
    assert Variant.parse("b1-ml") is Variant.B1_ML
    assert str(Variant.B2) == "B2"
    with pytest.raises(ValueError):
        Variant.parse("C")


def test_matrix_dump_roundtrip(tmp_path):
    m = np.array([[1.0, 2.0], [2.0, 0.5]])
    dump_matrix(m, tmp_path / "m.tsv")
    assert np.array_equal(load_matrix(tmp_path / "m.tsv"), m)
