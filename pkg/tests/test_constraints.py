import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import naive_closure, random_partition_constraints
from semicomm.constraints import (ConstraintSet, check_consistency, enhance, filter_constraints,
                                  load_constraints, sample_constraints, target_count,
                                  write_constraints)
from semicomm.errors import ContradictionError, ParseError
from semicomm.graph import GroundTruth


@st.composite
def consistent_sets(draw, max_n=12):
    n = draw(st.integers(2, max_n))
    labels = draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))
    pairs = draw(st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
                         .filter(lambda p: p[0] != p[1]), max_size=25))
    ml = {p for p in pairs if labels[p[0]] == labels[p[1]]}
    cl = {p for p in pairs if labels[p[0]] != labels[p[1]]}
    return ConstraintSet(n, ml, cl), labels


def test_transitive_ml_and_propagated_cl():
    s = ConstraintSet(5, {(0, 1), (1, 2)}, {(2, 3)})
    out, rep = enhance(s)
    assert out.ml == {(0, 1), (0, 2), (1, 2)}
    assert out.cl == {(0, 3), (1, 3), (2, 3)}
    assert rep.added_ml == 1 and rep.added_cl == 2
    assert frozenset({0, 1, 2}) in rep.ml_classes


def test_two_cl_pairs_imply_nothing():
    s = ConstraintSet(3, set(), {(0, 1), (1, 2)})
    out, _ = enhance(s)
    assert out == s


def test_contradiction_reported_with_witness():
    s = ConstraintSet(4, {(0, 1), (1, 2)}, {(0, 2)})
    assert check_consistency(s) == [(0, 0, 2)]
    with pytest.raises(ContradictionError) as exc:
        enhance(s)
    assert exc.value.triples == [(0, 0, 2)]
    assert "(1,1,3)" in str(exc.value)


def test_same_pair_both_kinds_is_contradiction():
    s = ConstraintSet(3, {(0, 1)}, {(1, 0)})
    assert check_consistency(s) == [(0, 0, 1)]


@settings(max_examples=300, deadline=None)
@given(consistent_sets())
def test_enhance_matches_naive_oracle(case):
    s, _ = case
    out, _ = enhance(s)
    ml, cl = naive_closure(s.n, s.ml, s.cl)
    assert set(out.ml) == ml
    assert set(out.cl) == cl


@settings(max_examples=200, deadline=None)
@given(consistent_sets())
def test_enhance_invariants(case):
    s, labels = case
    out, _ = enhance(s)
    # superset, idempotent, consistent, and sound w.r.t. the hidden labels
    assert s.ml <= out.ml and s.cl <= out.cl
    assert enhance(out)[0] == out
    assert not check_consistency(out)
    assert not (out.ml & out.cl)
    assert all(labels[i] == labels[j] for i, j in out.ml)
    assert all(labels[i] != labels[j] for i, j in out.cl)


@settings(max_examples=100, deadline=None)
@given(consistent_sets())
def test_enhance_is_monotone(case):
    s, _ = case
    sub = ConstraintSet(s.n, set(sorted(s.ml)[::2]), set(sorted(s.cl)[::2]))
    small, _ = enhance(sub)
    big, _ = enhance(s)
    assert small.ml <= big.ml and small.cl <= big.cl


def test_random_sets_against_oracle_fixed_seed():
    rng = np.random.default_rng(7)
    for _ in range(200):
        n = int(rng.integers(2, 13))
        _, ml, cl = random_partition_constraints(rng, n, int(rng.integers(0, 30)), int(rng.integers(1, 5)))
        out, _ = enhance(ConstraintSet(n, ml, cl))
        assert (set(out.ml), set(out.cl)) == naive_closure(n, ml, cl)


def test_filter_modes():
    s = ConstraintSet(3, {(0, 1)}, {(1, 2)})
    assert filter_constraints(s, "ml_only").cl == frozenset()
    assert filter_constraints(s, "cl_only").ml == frozenset()
    assert filter_constraints(s) is s
    with pytest.raises(ValueError):
        filter_constraints(s, "bogus")


def test_target_count_rounds_half_up():
    assert target_count(0.05, 110) == 300   # 299.75
    assert target_count(0.2, 110) == 1199   # 1199.0
    assert target_count(0.5, 2) == 1        # 0.5
    assert target_count(0.0, 50) == 0


def test_sample_labels_pairs_correctly_and_is_seeded():
    gt = GroundTruth({i: str(i % 3) for i in range(0, 40, 2)})
    s1 = sample_constraints(gt, 0.3, 11, n=40)
    s2 = sample_constraints(gt, 0.3, 11, n=40)
    assert s1 == s2
    assert len(s1) == target_count(0.3, 20)
    for i, j in s1.ml:
        assert gt.labels[i] == gt.labels[j]
    for i, j in s1.cl:
        assert gt.labels[i] != gt.labels[j]
    assert sample_constraints(gt, 0.3, 12, n=40) != s1


def test_sample_full_fraction_covers_all_pairs():
    gt = GroundTruth({0: "a", 1: "a", 2: "b"})
    s = sample_constraints(gt, 1.0, 0)
    assert s.ml == {(0, 1)} and s.cl == {(0, 2), (1, 2)}


def test_constraint_file_roundtrip():
    s = ConstraintSet(5, {(3, 1)}, {(0, 4), (0, 2)})
    buf = io.StringIO()
    write_constraints(s, buf)
    assert buf.getvalue() == "1\t3\tCL\n1\t5\tCL\n2\t4\tML\n"
    assert load_constraints(buf.getvalue(), n=5) == s


@pytest.mark.parametrize("text", ["1\t2\n", "1\t1\tML\n", "1\t2\tXX\n", "0\t2\tML\n", "a\t2\tML\n"])
def test_constraint_parse_errors(text):
    with pytest.raises(ParseError):
        load_constraints(text)
