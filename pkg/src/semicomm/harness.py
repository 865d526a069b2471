"""Experiment orchestration: seeded multi-trial sweeps, the football case study, CSV/SVG output."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from . import datasets
from .benchgen import GnParams, LfrParams, generate_gn, generate_lfr
from .constraints import enhance, sample_constraints
from .errors import DataError, ExperimentError, SemicommError
from .graph import Graph, GroundTruth, Partition, adjacency, load_edge_list, load_labels, load_partition
from .metrics import misclustered, score
from .nmf import DEFAULT_ITERS, nmf_partition
from .revision import DEFAULT_ALPHA, Variant, revise, variant_constraints
from .spectral import spectral_cluster

log = logging.getLogger(__name__)

METHODS = ("nmf", "spectral", "external")
CSV_COLUMNS = ("method", "variant", "fraction", "mean_nmi", "std_nmi",
               "constraints_before", "constraints_after")
MAX_FAILED_SHARE = 0.2
# best-of-R uniform starts; single starts stall in merged-community minima
DEFAULT_NMF_RESTARTS = 30

# purpose tags mixed into derived seeds
_GRAPH, _SAMPLE, _METHOD = 0, 1, 2


def derive_seed(*keys: int) -> int:
    """Mix non-negative integer keys into one 64-bit seed.

    Uses numpy's ``SeedSequence`` hashing, so the result depends only on the
    keys and not on any shared generator state. Trial ``t`` of a run with
    master seed ``s`` draws its graph from ``derive_seed(s, t, 0)``, its
    constraint sample at fraction ``f`` from ``derive_seed(s, t, 1, F)`` and its
    detector seed from ``derive_seed(s, t, 2, F)``, where ``F`` is ``f`` in parts
    per million. Keying by value keeps a cell's draws fixed when other
    fractions are added to the sweep.
    """
    state = np.random.SeedSequence([int(k) for k in keys]).generate_state(2, np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


def _fraction_key(fraction: float) -> int:
    return int(round(fraction * 1_000_000))


@dataclass(frozen=True)
class FileDataset:
    edges: str
    labels: str

    def load(self) -> tuple[Graph, GroundTruth]:
        g = load_edge_list(Path(self.edges))
        gt = load_labels(Path(self.labels))
        gt.check_range(g.n)
        return g, gt


Dataset = Union[GnParams, LfrParams, FileDataset]


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: Dataset = field(default_factory=GnParams)
    methods: tuple = ("nmf",)
    variants: tuple = (Variant.A, Variant.B1, Variant.B2)
    fractions: tuple = (0.05,)
    trials: int = 10
    k: int | None = None
    master_seed: int = 0
    alpha: float = DEFAULT_ALPHA
    iters: int = DEFAULT_ITERS
    nmf_restarts: int = DEFAULT_NMF_RESTARTS
    fixed_graph: bool = False
    laplacian_exponent: float = -0.5
    external_dir: str | None = None
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "variants", tuple(Variant.parse(v) for v in self.variants))
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "fractions", tuple(float(f) for f in self.fractions))

    def validate(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if list(self.fractions) != sorted(self.fractions):
            raise ValueError("fractions must be sorted ascending")
        if any(not 0 <= f <= 1 for f in self.fractions):
            raise ValueError("fractions must lie in [0, 1]")
        if self.k is not None and self.k < 1:
            raise ValueError("k must be >= 1")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ValueError(f"unknown method(s) {bad}; expected a subset of {METHODS}")
        if "external" in self.methods and not self.external_dir:
            raise ValueError("method 'external' needs external_dir")
        if self.nmf_restarts < 1:
            raise ValueError("nmf_restarts must be >= 1")
        if self.master_seed < 0:
            raise ValueError("master_seed must be non-negative")


@dataclass(frozen=True)
class ResultRow:
    method: str
    variant: str
    fraction: float
    mean_nmi: float
    std_nmi: float
    constraints_before: float
    constraints_after: float


@dataclass
class ResultTable:
    rows: list = field(default_factory=list)
    # (method, variant, fraction) -> per-trial NMI, in trial order
    per_trial: dict = field(default_factory=dict)
    trials_run: int = 0
    failed_trials: dict = field(default_factory=dict)

    def row(self, method, variant, fraction) -> ResultRow:
        variant = str(Variant.parse(variant))
        for r in self.rows:
            if r.method == method and r.variant == variant and math.isclose(r.fraction, fraction):
                return r
        raise KeyError((method, variant, fraction))

    def trial_nmis(self, method, variant, fraction) -> list[float]:
        return self.per_trial[(method, str(Variant.parse(variant)), float(fraction))]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([r.method, r.variant, f"{r.fraction:g}", f"{r.mean_nmi:.6f}",
                        f"{r.std_nmi:.6f}", f"{r.constraints_before:.2f}",
                        f"{r.constraints_after:.2f}"])
        return buf.getvalue()


def _instance(config: ExperimentConfig, trial: int):
    ds = config.dataset
    if isinstance(ds, FileDataset):
        return ds.load()
    gseed = derive_seed(config.master_seed, 0 if config.fixed_graph else trial, _GRAPH)
    if isinstance(ds, GnParams):
        return generate_gn(ds, gseed)
    if isinstance(ds, LfrParams):
        return generate_lfr(ds, gseed)
    raise TypeError(f"unsupported dataset {ds!r}")


def _detect(method, x, k, seed, config, trial, variant, fraction, n) -> Partition:
    if method == "nmf":
        return nmf_partition(x, k, iters=config.iters, seed=seed, restarts=config.nmf_restarts)
    if method == "spectral":
        return spectral_cluster(x, k, seed=seed, exponent=config.laplacian_exponent)
    path = Path(config.external_dir) / external_name(trial, variant, fraction)
    if not path.is_file():
        # the outside tool produced nothing for this cell; counts as a failed trial
        raise DataError(f"missing external partition {path}")
    return import_external_partition(path, n)


def external_name(trial: int, variant, fraction: float) -> str:
    """File name the ``external`` method reads for one (trial, variant, fraction) cell."""
    return f"trial{trial}_{Variant.parse(variant)}_{fraction:g}.tsv"


def run_trial(config: ExperimentConfig, trial: int) -> dict:
    """One trial: ``{(method, variant, fraction): (nmi, before, after)}``."""
    g, gt = _instance(config, trial)
    a = adjacency(g)
    k = config.k if config.k is not None else len(gt.communities())
    out = {}
    for frac in config.fractions:
        fkey = _fraction_key(frac)
        s = sample_constraints(gt, frac, derive_seed(config.master_seed, trial, _SAMPLE, fkey), n=g.n)
        mseed = derive_seed(config.master_seed, trial, _METHOD, fkey)
        for v in config.variants:
            before, used = variant_constraints(s, v)
            x = revise(a, used, config.alpha)
            for method in config.methods:
                p = _detect(method, x, k, mseed, config, trial, v, frac, g.n)
                out[(method, str(v), frac)] = (score(p, gt), len(before), len(used))
    return out


def _safe_trial(args):
    config, trial = args
    try:
        return trial, run_trial(config, trial), None
    except (SemicommError, np.linalg.LinAlgError, FloatingPointError) as exc:
        return trial, None, f"{type(exc).__name__}: {exc}"


def run_experiment(config: ExperimentConfig) -> ResultTable:
    """Run every trial, then average NMI and constraint counts per (method, variant, fraction).

    A trial that raises is excluded and recorded in ``failed_trials``; the run
    fails when more than 20% of trials fail.
    """
    config.validate()
    jobs = [(config, t) for t in range(config.trials)]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_safe_trial, jobs))
    else:
        results = [_safe_trial(j) for j in jobs]

    table = ResultTable(trials_run=config.trials)
    done = []
    for trial, res, err in sorted(results, key=lambda r: r[0]):
        if err is not None:
            log.warning("trial %d failed: %s", trial, err)
            table.failed_trials[trial] = err
        else:
            done.append(res)
    if len(table.failed_trials) > MAX_FAILED_SHARE * config.trials:
        raise ExperimentError(
            f"{len(table.failed_trials)} of {config.trials} trials failed; first: "
            f"{next(iter(table.failed_trials.values()))}"
        )
    for method in config.methods:
        for v in config.variants:
            for frac in config.fractions:
                key = (method, str(v), frac)
                cells = [r[key] for r in done]
                vals = np.array([c[0] for c in cells])
                table.per_trial[key] = vals.tolist()
                table.rows.append(ResultRow(
                    method=method,
                    variant=str(v),
                    fraction=frac,
                    mean_nmi=float(vals.mean()),
                    std_nmi=float(vals.std(ddof=1)) if len(vals) > 1 else 0.0,
                    constraints_before=float(np.mean([c[1] for c in cells])),
                    constraints_after=float(np.mean([c[2] for c in cells])),
                ))
    return table


def import_external_partition(path, n: int | None = None) -> Partition:
    """Read a partition computed by an outside tool (e.g. InfoMap) as ``node<TAB>community``."""
    return load_partition(Path(path), n)


# ---------------------------------------------------------------- output

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf")


def _svg_chart(title: str, series: dict, width=520, height=360) -> str:
    left, right, top, bottom = 60, 130, 40, 50
    pw, ph = width - left - right, height - top - bottom
    xs = sorted({x for pts in series.values() for x, _ in pts}) or [0.0]
    x0, x1 = min(xs), max(xs)
    if x1 == x0:
        x1 = x0 + 1.0

    def sx(x):
        return left + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return top + (1.0 - y) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{left + pw / 2:.1f}" y="22" text-anchor="middle" font-size="14">{title}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for i in range(6):
        y = i / 5
        parts.append(f'<line x1="{left - 4}" y1="{sy(y):.1f}" x2="{left}" y2="{sy(y):.1f}" stroke="black"/>')
        parts.append(f'<text x="{left - 7}" y="{sy(y) + 4:.1f}" text-anchor="end">{y:.1f}</text>')
    for x in xs:
        parts.append(f'<line x1="{sx(x):.1f}" y1="{top + ph}" x2="{sx(x):.1f}" y2="{top + ph + 4}" stroke="black"/>')
        parts.append(f'<text x="{sx(x):.1f}" y="{top + ph + 17}" text-anchor="middle">{x:g}</text>')
    parts.append(f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle">fraction of pairs constrained</text>')
    parts.append(f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" '
                 f'transform="rotate(-90 16 {top + ph / 2:.1f})">mean NMI</text>')
    for i, (name, pts) in enumerate(series.items()):
        color = _PALETTE[i % len(_PALETTE)]
        coords = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in pts)
        parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>')
        for x, y in pts:
            parts.append(f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="3" fill="{color}"/>')
        ly = top + 12 + 18 * i
        lx = left + pw + 15
        parts.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{lx + 26}" y="{ly + 4}">{name}</text>')
    parts.append("</svg>\n")
    return "\n".join(parts)


def emit_results(table: ResultTable, out_dir) -> list[Path]:
    """Write ``results.csv`` and one ``nmi_<method>.svg`` line chart per method."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [out / "results.csv"]
    written[0].write_text(table.to_csv(), encoding="utf-8")
    methods = list(dict.fromkeys(r.method for r in table.rows))
    for method in methods:
        series: dict[str, list] = {}
        for r in table.rows:
            if r.method == method:
                series.setdefault(r.variant, []).append((r.fraction, r.mean_nmi))
        path = out / f"nmi_{method}.svg"
        path.write_text(_svg_chart(f"Averaged NMI ({method})", series), encoding="utf-8")
        written.append(path)
    return written


# ---------------------------------------------------------------- case study

@dataclass
class CaseStudyEntry:
    fraction: float
    enhanced: bool
    constraints: int
    ml: int
    cl: int
    percent_of_pairs: float
    nmi: float
    realized_k: int
    misclustered: list
    assign: list = field(repr=False, default_factory=list)


@dataclass
class CaseStudyReport:
    k: int
    seed: int
    labeled: int
    total_pairs: int
    entries: list = field(default_factory=list)
    # fraction -> node (1-based) -> {"before": (ml, cl), "after": (ml, cl)}
    focus: dict = field(default_factory=dict)

    def entry(self, fraction: float, enhanced: bool) -> CaseStudyEntry:
        for e in self.entries:
            if math.isclose(e.fraction, fraction) and e.enhanced == enhanced:
                return e
        raise KeyError((fraction, enhanced))

    def to_text(self) -> str:
        lines = [f"k={self.k} seed={self.seed} labeled={self.labeled} pairs={self.total_pairs}"]
        for e in self.entries:
            tag = "enhanced" if e.enhanced else "non-enhanced"
            wrong = ", ".join(map(str, e.misclustered)) or "none"
            lines.append(
                f"p={e.fraction:g} {tag:<12} constraints={e.constraints} "
                f"({e.percent_of_pairs:.2f}%; ML={e.ml} CL={e.cl}) NMI={e.nmi:.4f} "
                f"k_found={e.realized_k} misclustered=[{wrong}]"
            )
        for frac, nodes in self.focus.items():
            for node, info in nodes.items():
                for when in ("before", "after"):
                    ml, cl = info[when]
                    lines.append(
                        f"p={frac:g} node {node} {when}: ML={ml or 'none'} CL={cl or 'none'}"
                    )
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        data = asdict(self)
        data["focus"] = {f"{k:g}": v for k, v in self.focus.items()}
        return json.dumps(data, indent=2)


def run_case_study(edges=None, labels=None, fractions: Sequence[float] = (0.0, 0.05, 0.2), seed: int = 0,
                   k: int = datasets.FOOTBALL_COMMUNITIES, alpha: float = DEFAULT_ALPHA,
                   iters: int = DEFAULT_ITERS, restarts: int = DEFAULT_NMF_RESTARTS,
                   focus: Sequence[int] = ()) -> CaseStudyReport:
    """NMF on the revised matrices with and without enhancement, per constraint fraction.

    Defaults to the bundled football network. Both arms of a fraction share the
    constraint sample and the NMF seed, so they differ only by the closure step.
    ``focus`` lists 1-based nodes whose ML/CL partners are reported.
    """
    if edges is None and labels is None:
        g, gt = datasets.football()
    elif edges is not None and labels is not None:
        g, gt = FileDataset(str(edges), str(labels)).load()
    else:
        raise ValueError("give both edges and labels, or neither")
    a = adjacency(g)
    m = len(gt)
    report = CaseStudyReport(k=k, seed=seed, labeled=m, total_pairs=m * (m - 1) // 2)
    for frac in fractions:
        fkey = _fraction_key(frac)
        s = sample_constraints(gt, frac, derive_seed(seed, 0, _SAMPLE, fkey), n=g.n)
        closed, _ = enhance(s)
        mseed = derive_seed(seed, 0, _METHOD, fkey)
        for enhanced, used in ((False, s), (True, closed)):
            p = nmf_partition(revise(a, used, alpha), k, iters=iters, seed=mseed, restarts=restarts)
            report.entries.append(CaseStudyEntry(
                fraction=frac,
                enhanced=enhanced,
                constraints=len(used),
                ml=len(used.ml),
                cl=len(used.cl),
                percent_of_pairs=100.0 * len(used) / report.total_pairs if report.total_pairs else 0.0,
                nmi=score(p, gt),
                realized_k=p.num_communities,
                misclustered=misclustered(p, gt),
                assign=p.assign.tolist(),
            ))
        if focus:
            report.focus[frac] = {}
            for node in focus:
                if not 1 <= node <= g.n:
                    raise DataError(f"focus node {node} outside 1..{g.n}")
                before = [[v + 1 for v in side] for side in s.pairs_of(node - 1)]
                after = [[v + 1 for v in side] for side in closed.pairs_of(node - 1)]
                report.focus[frac][node] = {"before": before, "after": after}
    return report

