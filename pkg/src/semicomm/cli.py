"""Command-line interface.

Exit codes: 0 ok, 1 usage, 2 data error, 3 numeric error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import warnings
from pathlib import Path

from . import datasets
from .benchgen import GnParams, LfrParams, generate_gn, generate_lfr
from .constraints import enhance, load_constraints, sample_constraints, write_constraints
from .errors import DataError, ExperimentError, NumericError, SemicommError
from .graph import (adjacency, load_edge_list, load_labels, load_partition, write_edge_list,
                    write_labels, write_partition)
from .harness import (DEFAULT_NMF_RESTARTS, ExperimentConfig, FileDataset, emit_results,
                      import_external_partition, run_case_study, run_experiment)
from .metrics import misclustered, nmi, score
from .nmf import DEFAULT_ITERS, nmf
from .revision import DEFAULT_ALPHA, Variant, build_variant, dump_matrix, load_matrix
from .spectral import spectral_cluster

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text):
    return [int(x) for x in text.split(",") if x.strip()]


def _words(text):
    return [x.strip() for x in text.split(",") if x.strip()]


def read_config(path) -> dict:
    """``key=value`` lines; keys are long option names with ``-`` or ``_``."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


# ---------------------------------------------------------------- commands

def cmd_gen(args):
    if args.model == "gn":
        g, gt = generate_gn(GnParams(args.z_in, args.z_out, args.communities, args.size), args.seed)
    else:
        p = LfrParams(args.n, args.avg_deg, args.max_deg, args.gamma, args.beta, args.mu,
                      args.min_comm, args.max_comm, args.max_sweeps)
        g, gt = generate_lfr(p, args.seed)
    write_edge_list(g, f"{args.out}_edges.txt")
    write_labels(gt, f"{args.out}_labels.tsv", n=g.n)
    print(f"wrote {args.out}_edges.txt ({g.n} nodes, {g.num_edges} edges) and {args.out}_labels.tsv")


def cmd_sample(args):
    gt = load_labels(Path(args.labels))
    n = args.n
    if args.edges:
        n = load_edge_list(Path(args.edges)).n
    s = sample_constraints(gt, args.fraction, args.seed, n=n)
    write_constraints(s, args.out)
    print(f"sampled {len(s)} pairs: {len(s.ml)} ML, {len(s.cl)} CL -> {args.out}")


def cmd_enhance(args):
    s = load_constraints(Path(args.constraints), args.n)
    closed, report = enhance(s)
    write_constraints(closed, args.out)
    print(f"{len(s)} -> {len(closed)} constraints (+{report.added_ml} ML, +{report.added_cl} CL); "
          f"{sum(len(c) > 1 for c in report.ml_classes)} ML classes -> {args.out}")


def _objective_matrix(args):
    g = load_edge_list(Path(args.edges))
    a = adjacency(g)
    if getattr(args, "matrix", None):
        return g, load_matrix(args.matrix)
    if args.constraints:
        s = load_constraints(Path(args.constraints), g.n)
        return g, build_variant(a, s, args.variant, args.alpha)
    return g, a


def cmd_revise(args):
    _, m = _objective_matrix(args)
    dump_matrix(m, args.out)
    print(f"wrote {m.shape[0]}x{m.shape[1]} {args.variant} matrix -> {args.out}")


def cmd_detect(args):
    g, x = _objective_matrix(args)
    if args.method == "nmf":
        p = nmf(x, args.k, iters=args.iters, seed=args.seed, restarts=args.restarts).partition()
    else:
        p = spectral_cluster(x, args.k, seed=args.seed, exponent=args.laplacian_exponent)
    write_partition(p, args.out)
    line = f"{p.num_communities} communities -> {args.out}"
    if args.labels:
        gt = load_labels(Path(args.labels))
        gt.check_range(g.n)
        wrong = misclustered(p, gt)
        line += f"; NMI={score(p, gt):.4f}; misclustered={wrong}"
    print(line)


def cmd_nmi(args):
    p = load_partition(Path(args.partition))
    if args.labels:
        gt = load_labels(Path(args.labels))
        print(f"{score(p, gt):.6f}")
    else:
        q = load_partition(Path(args.other))
        print(f"{nmi(p, q):.6f}")


def cmd_import_partition(args):
    n = args.n
    if args.edges:
        n = load_edge_list(Path(args.edges)).n
    p = import_external_partition(args.file, n)
    line = f"{p.n} nodes, {p.num_communities} communities"
    if args.labels:
        gt = load_labels(Path(args.labels))
        line += f"; NMI={score(p, gt):.6f}; misclustered={misclustered(p, gt)}"
    if args.out:
        write_partition(p, args.out)
        line += f" -> {args.out}"
    print(line)


def _experiment_config(args) -> ExperimentConfig:
    if args.dataset == "gn":
        ds = GnParams(args.z_in, args.z_out, args.communities, args.size)
    elif args.dataset == "lfr":
        ds = LfrParams(args.n, args.avg_deg, args.max_deg, args.gamma, args.beta, args.mu,
                       args.min_comm, args.max_comm, args.max_sweeps)
    elif args.dataset == "football":
        ds = FileDataset(str(datasets.data_path("football_edges.txt")),
                         str(datasets.data_path("football_labels.tsv")))
    else:
        if not (args.edges and args.labels):
            raise ValueError("dataset 'files' needs --edges and --labels")
        ds = FileDataset(args.edges, args.labels)
    return ExperimentConfig(
        dataset=ds,
        methods=tuple(args.methods),
        variants=tuple(args.variants),
        fractions=tuple(args.fractions),
        trials=args.trials,
        k=args.k,
        master_seed=args.master_seed,
        alpha=args.alpha,
        iters=args.iters,
        nmf_restarts=args.nmf_restarts,
        fixed_graph=args.fixed_graph,
        laplacian_exponent=args.laplacian_exponent,
        external_dir=args.external_dir,
        workers=args.workers,
    )


def cmd_experiment(args):
    config = _experiment_config(args)
    table = run_experiment(config)
    paths = emit_results(table, args.out)
    if table.failed_trials:
        print(f"{len(table.failed_trials)} trial(s) failed and were excluded", file=sys.stderr)
    sys.stdout.write(table.to_csv())
    print(f"wrote {', '.join(str(p) for p in paths)}")


def cmd_case_study(args):
    report = run_case_study(args.edges, args.labels, fractions=args.fractions, seed=args.seed,
                            k=args.k, alpha=args.alpha, iters=args.iters,
                            restarts=args.nmf_restarts, focus=args.focus)
    sys.stdout.write(report.to_text())
    if args.json:
        Path(args.json).write_text(report.to_json(), encoding="utf-8")


# ---------------------------------------------------------------- parser

def _add_gn(p):
    p.add_argument("--z-in", type=float, default=6.0)
    p.add_argument("--z-out", type=float, default=10.0)
    p.add_argument("--communities", type=int, default=4)
    p.add_argument("--size", type=int, default=32)


def _add_lfr(p):
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--avg-deg", type=float, default=20.0)
    p.add_argument("--max-deg", type=int, default=50)
    p.add_argument("--gamma", type=float, default=2.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=0.9)
    p.add_argument("--min-comm", type=int, default=None)
    p.add_argument("--max-comm", type=int, default=None)
    p.add_argument("--max-sweeps", type=int, default=100)


def _add_matrix_source(p):
    p.add_argument("--edges", required=True, help="1-based edge list")
    p.add_argument("--constraints", help="constraint file (i<TAB>j<TAB>ML|CL)")
    p.add_argument("--variant", type=Variant.parse, default=Variant.B1,
                   help="objective matrix: A, B1, B2, B1_ML, B1_CL, B2_ML")
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="semicomm", description="Semi-supervised community detection with constraint closure.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="generate a benchmark graph")
    gsub = gen.add_subparsers(dest="model", required=True, parser_class=_Parser)
    for name, adder in (("gn", _add_gn), ("lfr", _add_lfr)):
        p = gsub.add_parser(name)
        adder(p)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", required=True, help="output prefix")
        p.set_defaults(func=cmd_gen)

    p = sub.add_parser("sample", help="sample ML/CL pairs from labels")
    p.add_argument("--labels", required=True)
    p.add_argument("--fraction", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--edges", help="edge list fixing the node count")
    p.add_argument("--n", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("enhance", help="close constraints under the inference rules")
    p.add_argument("--constraints", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_enhance)

    p = sub.add_parser("revise", help="write a revised objective matrix as TSV")
    _add_matrix_source(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_revise)

    det = sub.add_parser("detect", help="detect communities")
    dsub = det.add_subparsers(dest="method", required=True, parser_class=_Parser)
    for name in ("nmf", "spectral"):
        p = dsub.add_parser(name)
        _add_matrix_source(p)
        p.add_argument("--matrix", help="precomputed matrix TSV (overrides --constraints)")
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--labels", help="score against these labels")
        p.add_argument("--out", required=True)
        if name == "nmf":
            p.add_argument("--iters", type=int, default=DEFAULT_ITERS)
            p.add_argument("--restarts", type=int, default=1)
        else:
            p.add_argument("--laplacian-exponent", type=float, default=-0.5)
        p.set_defaults(func=cmd_detect)

    p = sub.add_parser("nmi", help="NMI of a partition against labels or another partition")
    p.add_argument("--partition", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--labels")
    g.add_argument("--other")
    p.set_defaults(func=cmd_nmi)

    p = sub.add_parser("import-partition", help="validate an externally computed partition")
    p.add_argument("file")
    p.add_argument("--edges", help="edge list fixing the node count")
    p.add_argument("--n", type=int)
    p.add_argument("--labels")
    p.add_argument("--out")
    p.set_defaults(func=cmd_import_partition)

    p = sub.add_parser("experiment", help="run a variant x method x fraction sweep")
    p.add_argument("--config", help="key=value file; explicit flags take precedence")
    p.add_argument("--dataset", choices=("gn", "lfr", "football", "files"), default="gn")
    _add_gn(p)
    _add_lfr(p)
    p.add_argument("--edges")
    p.add_argument("--labels")
    p.add_argument("--methods", type=_words, default=["nmf"])
    p.add_argument("--variants", type=_words, default=["A", "B1", "B2"])
    p.add_argument("--fractions", type=_floats, default=[0.05])
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--k", type=int)
    p.add_argument("--master-seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--iters", type=int, default=DEFAULT_ITERS)
    p.add_argument("--nmf-restarts", type=int, default=DEFAULT_NMF_RESTARTS)
    p.add_argument("--fixed-graph", action="store_true")
    p.add_argument("--laplacian-exponent", type=float, default=-0.5)
    p.add_argument("--external-dir")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="results")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("case-study", help="football case study: NMF with and without enhancement")
    p.add_argument("--edges")
    p.add_argument("--labels")
    p.add_argument("--fractions", type=_floats, default=[0.0, 0.05, 0.2])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=datasets.FOOTBALL_COMMUNITIES)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--iters", type=int, default=DEFAULT_ITERS)
    p.add_argument("--nmf-restarts", type=int, default=DEFAULT_NMF_RESTARTS)
    p.add_argument("--focus", type=_ints, default=[], help="1-based nodes to report ML/CL partners for")
    p.add_argument("--json")
    p.set_defaults(func=cmd_case_study)
    return ap


def _apply_config(parser, argv):
    """Re-parse with defaults taken from ``--config`` so explicit flags still win."""
    args = parser.parse_args(argv)
    if getattr(args, "config", None) is None:
        return args
    sub = parser._subparsers._group_actions[0].choices[args.command]
    values = read_config(args.config)
    known = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, raw in values.items():
        if key not in known or key in ("config", "help"):
            raise ValueError(f"unknown config key {key!r}")
        action = known[key]
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = raw.lower() in ("1", "true", "yes", "on")
        elif action.type is not None:
            defaults[key] = action.type(raw)
        else:
            defaults[key] = raw
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except (ValueError, OSError) as exc:
        print(f"semicomm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if not args.verbose:
        warnings.simplefilter("ignore", category=UserWarning)
    try:
        args.func(args)
    except NumericError as exc:
        print(f"semicomm: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, ExperimentError, OSError) as exc:
        print(f"semicomm: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"semicomm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SemicommError as exc:
        print(f"semicomm: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
