"""Command-line entry points: run experiment cells, verify against the
brute-force oracles, and recompute summaries from existing CSVs."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .benchmarks import InfeasibleSeedError
from .harness import Cell, ExperimentSpec, run_experiment, summarize_directory
from .optimizers import ALGORITHMS

PROBLEMS = ("onemax", "leadingones", "binval", "revbinval")
SAFETY_SETTINGS = ("none", "compatible", "conflicting")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sasng",
        description="Safe optimization over binary strings: experiment runner and tools.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one experiment cell (trials x iterations)")
    run_p.add_argument("--problem", required=True, choices=PROBLEMS)
    run_p.add_argument("--safety", default="none", choices=SAFETY_SETTINGS)
    run_p.add_argument("--algo", required=True, choices=ALGORITHMS)
    run_p.add_argument("--dim", type=int, required=True)
    run_p.add_argument("--trials", type=int, default=25)
    run_p.add_argument("--seed", type=int, default=0, help="base seed (trial seeds derive from it)")
    run_p.add_argument("--max-iters", type=int, default=None, help="default: dim^3")
    run_p.add_argument("--unsafe-budget", type=int, default=None, help="default: 100")
    run_p.add_argument("--walsh-order", type=int, default=None,
                       help="surrogate order (default: 2 up to dim 25, else 1)")
    run_p.add_argument("--out", type=Path, default=Path("results"))
    run_p.add_argument("--theta-trace", type=int, default=0, metavar="K",
                       help="record the distribution parameters every K iterations")
    run_p.add_argument("--early-stop", action="store_true",
                       help="stop a trial once the known optimum is reached")

    verify_p = sub.add_parser("verify", help="run the brute-force verification battery")
    verify_p.add_argument("--seed", type=int, default=2024)

    sum_p = sub.add_parser("summarize", help="recompute summary.json from trial CSVs")
    sum_p.add_argument("--in", dest="in_dir", type=Path, required=True)
    return parser


def _cmd_run(args) -> int:
    cell = Cell(problem=args.problem, safety=args.safety, algorithm=args.algo, d=args.dim)
    spec = ExperimentSpec(
        cells=[cell],
        out_dir=args.out,
        trials=args.trials,
        base_seed=args.seed,
        max_iterations=args.max_iters,
        unsafe_budget=args.unsafe_budget,
        walsh_order=args.walsh_order,
        theta_trace_every=args.theta_trace,
        early_stop_at_optimum=args.early_stop,
    )
    summary_paths = run_experiment(spec)
    for path in summary_paths:
        summary = json.loads(path.read_text(encoding="utf-8"))
        final = summary["final"]
        print(f"{cell.cell_id}: {summary['trials']} trials -> {path}")
        print(f"  final gap median:    {final['gap_median']}")
        print(f"  final unsafe median: {final['unsafe_median']}")
        print(f"  terminations:        {final['terminations']}")
    return 0


def _cmd_verify(args) -> int:
    from .oracle import format_report_table, run_verification

    reports = run_verification(seed=args.seed)
    print(format_report_table(reports))
    failed = [r for r in reports if not r.passed]
    print(f"\n{len(reports) - len(failed)}/{len(reports)} checks passed")
    return 1 if failed else 0


def _cmd_summarize(args) -> int:
    for path in summarize_directory(args.in_dir):
        print(path)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "verify":
            return _cmd_verify(args)
        return _cmd_summarize(args)
    except (ValueError, InfeasibleSeedError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
