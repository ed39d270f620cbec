# cli/main.py
"""
loocv-knn command line.

    loocv-knn sweep     --data FILE --target COL [--k-min 1 --k-max 50 --method both]
    loocv-knn validate  --data FILE --target COL [--tolerance 1e-10]
    loocv-knn bench     [--data FILE --target COL] [--sizes 500,1000 --k 5 --reps 5]
    loocv-knn diagnose  --data FILE --target COL
    loocv-knn dedupe    --data FILE --target COL --out FILE
    loocv-knn synth     --n 500 --dim 2 --out FILE [--seed 0]

Exit codes: 0 ok, 1 tie-breaking assumption violated, 2 configuration error,
3 data error, 4 brute and efficient scores diverge on tie-free data.
"""

import argparse
import sys
from typing import List, Optional

from cli.report import print_table, render_json, resolve_format, write_report
from core.errors import ConfigError, LoocvError
from core.logs import get_logger
from core.settings import get_settings
from data.io import load_csv, write_csv
from data.preprocess import standardize
from data.synth import make_synthetic
from data.ties import detect_ties, resolve_duplicates
from loocv.benchmark import run_benchmark
from loocv.sweep import loocv_sweep
from regression.dataset import Dataset

logger = get_logger("cli")

EXIT_OK = 0
EXIT_ASSUMPTION = 1
EXIT_DIVERGENCE = 4


# ===========================================
# HELPERS
# ===========================================

def _positive(name: str, value: Optional[int]):
    if value is not None and value < 1:
        raise ConfigError(f"ConfigError: --{name} must be >= 1, got {value}")


def _sizes(text: Optional[str]) -> Optional[List[int]]:
    if not text:
        return None
    try:
        sizes = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise ConfigError(f"ConfigError: --sizes must be comma-separated integers, got '{text}'")
    if not sizes or min(sizes) < 2:
        raise ConfigError(f"ConfigError: --sizes must list sizes >= 2, got '{text}'")
    return sizes


def _load(args, allow_standardize: bool = True) -> Dataset:
    if not args.data or not args.target:
        raise ConfigError("ConfigError: --data and --target are required")
    dataset = load_csv(args.data, args.target, args.features, delimiter=args.delimiter)
    print(f"[Data] {args.data}: n={dataset.n}, D={dataset.dim}, M={dataset.n_outputs}")
    if allow_standardize and args.standardize:
        dataset, _ = standardize(dataset)
    return dataset


def _emit(args, records, best_k=None):
    if args.out:
        path = write_report(records, args.out, args.format, best_k=best_k, delimiter=args.delimiter or ",")
        print(f"[Output] Wrote {len(records)} rows to {path}")
    elif resolve_format(None, args.format) == "json":
        print(render_json(records, best_k), end="")
    else:
        print_table(records)


# ===========================================
# COMMANDS
# ===========================================

def cmd_sweep(args) -> int:
    _positive("workers", args.workers)
    dataset = _load(args)
    sweep = loocv_sweep(
        dataset, args.k_min, args.k_max, method=args.method, variant=args.variant, workers=args.workers
    )
    best_k = {m.value: k for m, k in sweep.best_k.items()}
    _emit(args, sweep.records(), best_k)
    for method, k in best_k.items():
        print(f"[Sweep] best_k={k} ({method})")
    if sweep.discrepancies:
        print(f"[Sweep] max relative discrepancy {sweep.max_relative_discrepancy():.3e}")
    return EXIT_OK


def cmd_validate(args) -> int:
    _positive("workers", args.workers)
    tolerance = get_settings().tolerance if args.tolerance is None else args.tolerance
    if tolerance < 0:
        raise ConfigError(f"ConfigError: --tolerance must be >= 0, got {tolerance}")

    dataset = _load(args)
    sweep = loocv_sweep(dataset, args.k_min, args.k_max, method="both", variant=args.variant, workers=args.workers)
    report = detect_ties(dataset)
    worst = sweep.max_relative_discrepancy()
    if args.out:
        _emit(args, sweep.records(), {m.value: k for m, k in sweep.best_k.items()})

    print(f"[Validate] {report.summary()}")
    print(f"[Validate] max relative discrepancy {worst:.3e} (tolerance {tolerance:g})")

    if not report.assumption_holds:
        print("[Validate] Assumption violated: brute and efficient scores may legitimately differ")
        return EXIT_ASSUMPTION
    if worst > tolerance:
        if not report.triples_evaluated:
            print("[Validate] Scores differ and distance ties were not scanned (n above scan cap)")
            return EXIT_ASSUMPTION
        logger.error(f"Divergence on tie-free data: {worst:.3e} > {tolerance:g}")
        print("[Validate] FAILED: scores diverge although the assumption holds")
        return EXIT_DIVERGENCE
    print("[Validate] OK: brute and efficient scores coincide")
    return EXIT_OK


def cmd_bench(args) -> int:
    _positive("reps", args.reps)
    _positive("k", args.k)
    _positive("workers", args.workers)
    dataset = _load(args) if args.data else None
    rows = run_benchmark(
        sizes=_sizes(args.sizes),
        k=args.k,
        reps=args.reps,
        seed=args.seed,
        dim=args.dim,
        dataset=dataset,
        workers=args.workers,
    )
    records = [row.as_record() for row in rows]
    for row in rows:
        label = row.method.value + (f"/{row.variant.value}" if row.variant else "")
        print(f"[Bench] n={row.n:<6} {label:<16} {row.seconds:.4f}s")
    _emit(args, records)
    return EXIT_OK


def cmd_diagnose(args) -> int:
    dataset = _load(args)
    report = detect_ties(dataset)
    print(f"[Diagnose] {report.summary()}")
    for group in report.duplicate_groups[:10]:
        rows = ", ".join(str(int(dataset.row_ids[r]) + 1) for r in group)
        print(f"[Diagnose] duplicate rows: {rows}")
    if len(report.duplicate_groups) > 10:
        print(f"[Diagnose] ... {len(report.duplicate_groups) - 10} more groups")
    if args.out:
        path = write_report([report.as_dict()], args.out, "json")
        print(f"[Output] Wrote report to {path}")
    return EXIT_OK if report.assumption_holds else EXIT_ASSUMPTION


def cmd_dedupe(args) -> int:
    if not args.out:
        raise ConfigError("ConfigError: --out is required for dedupe")
    dataset = _load(args, allow_standardize=False)
    resolved = resolve_duplicates(dataset)
    path = write_csv(resolved, args.out, delimiter=args.delimiter)
    print(f"[Dedupe] {dataset.n} rows -> {resolved.n} rows, wrote {path}")
    return EXIT_OK


def cmd_synth(args) -> int:
    if not args.out:
        raise ConfigError("ConfigError: --out is required for synth")
    for name in ("n", "dim", "outputs"):
        _positive(name, getattr(args, name))
    if args.noise < 0:
        raise ConfigError(f"ConfigError: --noise must be >= 0, got {args.noise}")
    dataset = make_synthetic(args.n, dim=args.dim, n_outputs=args.outputs, noise=args.noise, seed=args.seed)
    path = write_csv(dataset, args.out, delimiter=args.delimiter)
    print(f"[Synth] n={dataset.n}, D={dataset.dim}, M={dataset.n_outputs}, seed={args.seed} -> {path}")
    return EXIT_OK


# ===========================================
# CLI INTERFACE
# ===========================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loocv-knn", description="k-NN regression with exact single-fit leave-one-out CV"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    data_opts = argparse.ArgumentParser(add_help=False)
    data_opts.add_argument("--data", help="CSV file with a header row")
    data_opts.add_argument("--target", help="Output column name(s), comma-separated")
    data_opts.add_argument("--features", help="Input column names (default: every non-target column)")
    data_opts.add_argument("--delimiter", default=None, help="Field separator (default: LOOCV_DELIMITER)")
    data_opts.add_argument(
        "--standardize", action=argparse.BooleanOptionalAction, default=True,
        help="Scale features to zero mean, unit population std",
    )

    out_opts = argparse.ArgumentParser(add_help=False)
    out_opts.add_argument("--out", help="Output file (default: print to stdout)")
    out_opts.add_argument("--format", choices=["csv", "json"], help="Output format (default: from --out suffix)")
    out_opts.add_argument("--workers", type=int, default=None, help="Worker threads (default: LOOCV_WORKERS)")

    k_opts = argparse.ArgumentParser(add_help=False)
    k_opts.add_argument("--k-min", type=int, default=None, help="Smallest k (default 1)")
    k_opts.add_argument("--k-max", type=int, default=None, help="Largest k (default min(50, n-1))")
    k_opts.add_argument(
        "--variant", choices=["shared", "refit"], default="shared",
        help="Brute variant: one shared index or a refit per held-out row",
    )

    p = sub.add_parser("sweep", parents=[data_opts, out_opts, k_opts], help="LOOCV score for every k")
    p.add_argument("--method", choices=["brute", "efficient", "both"], default="both")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", parents=[data_opts, out_opts, k_opts], help="Check brute == efficient")
    p.add_argument("--tolerance", type=float, default=None, help="Max relative discrepancy (default 1e-10)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bench", parents=[data_opts, out_opts], help="Time brute vs efficient against n")
    p.add_argument("--sizes", help="Comma-separated training-set sizes (default: LOOCV_BENCH_SIZES)")
    p.add_argument("--k", type=int, default=None, help="Neighbour count (default: LOOCV_BENCH_K)")
    p.add_argument("--reps", type=int, default=None, help="Repetitions per timing (median is reported)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dim", type=int, default=2, help="Input dimension of synthetic data")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("diagnose", parents=[data_opts, out_opts], help="Report duplicate inputs and distance ties")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("dedupe", parents=[data_opts, out_opts], help="Average outputs of duplicate inputs")
    p.set_defaults(func=cmd_dedupe)

    p = sub.add_parser("synth", help="Write a synthetic dataset y = f(x) + noise")
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--outputs", type=int, default=1)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="Output CSV")
    p.add_argument("--delimiter", default=None)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors and 0 on --help
        return int(e.code or 0)

    logger.info(f"Command: {args.command}")
    try:
        code = args.func(args)
    except LoocvError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"[Error] {e}", file=sys.stderr)
        return e.exit_code
    logger.info(f"{args.command} finished with exit code {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
