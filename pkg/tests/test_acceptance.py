"""Acceptance criteria, each at its stated tolerance. One pass/fail line per criterion."""

import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from oracles import naive_closure, random_partition_constraints
from semicomm import datasets
from semicomm.benchgen import GnParams
from semicomm.cli import main
from semicomm.constraints import ConstraintSet, enhance, sample_constraints
from semicomm.harness import ExperimentConfig, run_case_study, run_experiment
from semicomm.metrics import nmi
from semicomm.nmf import nmf
from semicomm.spectral import normalized_affinity, spectral_cluster, top_k_eigenvectors


def report(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_1_gn_reproduction():
    config = ExperimentConfig(dataset=GnParams(), variants=("A", "B1", "B2"), fractions=(0.05,),
                              trials=10, master_seed=0)
    t = run_experiment(config)
    a, b1, b2 = (t.row("nmf", v, 0.05).mean_nmi for v in ("A", "B1", "B2"))
    ok = a <= 0.20 and 0.40 <= b1 <= 0.70 and b2 >= 0.75 and a < b1 < b2
    report(1, ok, f"NMI A={a:.4f} (<=0.20) B1={b1:.4f} (0.40-0.70) B2={b2:.4f} (>=0.75)")


def test_2_constraint_counts():
    _, gt = datasets.football()
    m = len(gt)
    counts5 = {len(sample_constraints(gt, 0.05, seed)) for seed in range(10)}
    counts20 = {len(sample_constraints(gt, 0.20, seed)) for seed in range(10)}
    enhanced = [len(enhance(sample_constraints(gt, 0.20, seed))[0]) for seed in range(10)]
    mean_enh = float(np.mean(enhanced))
    ok = m == 110 and counts5 == {300} and counts20 == {1199} and mean_enh >= 5000
    report(2, ok, f"m={m} 5%={sorted(counts5)} 20%={sorted(counts20)} "
                  f"mean enhanced={mean_enh:.1f} (>=5000 of 5995)")


def test_3_football_end_state():
    start = time.perf_counter()
    wrong = []
    for seed in range(10):
        rep = run_case_study(fractions=(0.2,), seed=seed, k=11)
        wrong.append(len(rep.entry(0.2, True).misclustered))
    elapsed = time.perf_counter() - start
    mean = float(np.mean(wrong))
    ok = mean <= 1 and min(wrong) == 0 and elapsed < 30
    report(3, ok, f"misclustered per seed={wrong} mean={mean:.2f} (<=1) zero-seeds={wrong.count(0)} "
                  f"time={elapsed:.1f}s (<30s)")


def test_4_ml_vs_cl_contribution():
    config = ExperimentConfig(dataset=GnParams(), variants=("B1_ML", "B1_CL"), fractions=(0.05, 0.1),
                              trials=10, master_seed=0)
    t = run_experiment(config)
    wins = {}
    for f in (0.05, 0.1):
        ml = t.trial_nmis("nmf", "B1_ML", f)
        cl = t.trial_nmis("nmf", "B1_CL", f)
        wins[f] = sum(x > y for x, y in zip(ml, cl))
    ok = all(w >= 9 for w in wins.values())
    report(4, ok, f"paired trials with NMI(B1_ML) > NMI(B1_CL): 5%={wins[0.05]}/10 "
                  f"10%={wins[0.1]}/10 (>=9)")


def test_5_closure_oracle():
    rng = np.random.default_rng(2024)
    cases = []
    for _ in range(1000):
        n = int(rng.integers(2, 13))
        _, ml, cl = random_partition_constraints(rng, n, int(rng.integers(0, n * (n - 1) // 2 + 1)),
                                                 int(rng.integers(1, 5)))
        cases.append((n, ml, cl))
    start = time.perf_counter()
    results = [enhance(ConstraintSet(n, ml, cl))[0] for n, ml, cl in cases]
    elapsed = time.perf_counter() - start
    mismatches = sum((set(r.ml), set(r.cl)) != naive_closure(n, ml, cl)
                     for r, (n, ml, cl) in zip(results, cases))
    ok = mismatches == 0 and elapsed < 5
    report(5, ok, f"1000 sets, mismatches={mismatches}, enhance time={elapsed:.2f}s (<5s)")


def test_6_nmf_monotonicity():
    rng = np.random.default_rng(6)
    violations = 0
    for _ in range(200):
        n, m = (int(v) for v in rng.integers(2, 51, size=2))
        k = int(rng.integers(1, min(n, m, 10) + 1))
        x = rng.random((n, m)) * (rng.random((n, m)) < rng.uniform(0.2, 1.0))
        t = np.array(nmf(x, k, seed=int(rng.integers(2**32))).objective_trace)
        violations += int(np.sum(t[1:] > t[:-1] * (1 + 1e-8)))
    report(6, violations == 0, f"200 instances, violations={violations}")


def test_7_nmi_identities():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 200))
        k = int(rng.integers(2, 10))
        a = rng.integers(k, size=n)
        a[:2] = (0, 1)
        b = rng.integers(int(rng.integers(2, 10)), size=n)
        perm = rng.permutation(k) + 100
        worst = max(worst,
                    abs(nmi(a, a) - 1),
                    abs(nmi(a, perm[a]) - 1),
                    abs(nmi(perm[a], b) - nmi(a, b)))
    baseline = float(np.mean([nmi(rng.integers(4, size=500), rng.integers(4, size=500))
                              for _ in range(100)]))
    ok = worst <= 1e-12 and baseline < 0.1
    report(7, ok, f"max identity/permutation error={worst:.1e} (<=1e-12) "
                  f"independence baseline={baseline:.4f} (<0.1)")


def test_8_spectral_correctness():
    rng = np.random.default_rng(8)
    scores, worst_resid = [], 0.0
    for k in (2, 3, 4):
        for _ in range(5):
            sizes = rng.integers(3, 60 // k + 1, size=k)
            truth = np.repeat(np.arange(k), sizes)
            order = rng.permutation(truth.size)
            truth = truth[order]
            b = (truth[:, None] == truth[None, :]).astype(float)
            scores.append(nmi(spectral_cluster(b, k, seed=int(rng.integers(1000))).assign, truth))
            l = normalized_affinity(b)
            vals, vecs = top_k_eigenvectors(l, k, return_values=True)
            resid = np.linalg.norm(l @ vecs - vecs * vals, axis=0).max()
            worst_resid = max(worst_resid, float(resid))
    ok = min(scores) == pytest.approx(1.0, abs=1e-12) and worst_resid <= 1e-8
    report(8, ok, f"15 block matrices k in {{2,3,4}}, min NMI={min(scores):.12f} "
                  f"max residual={worst_resid:.1e} (<=1e-8)")


def test_9_determinism(tmp_path):
    argv = ["experiment", "--dataset", "gn", "--variants", "A,B1,B2", "--fractions", "0.05,0.1",
            "--trials", "3", "--nmf-restarts", "3", "--methods", "nmf,spectral"]
    for run in ("a", "b"):
        assert main(argv + ["--out", str(tmp_path / run)]) == 0
    first = (tmp_path / "a" / "results.csv").read_bytes()
    second = (tmp_path / "b" / "results.csv").read_bytes()
    report(9, first == second, f"results.csv identical across runs ({len(first)} bytes)")
