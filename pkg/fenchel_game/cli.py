"""
Command-line interface for the Fenchel game experiment harness.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from . import __version__
from .dynamics import PRESETS
from .experiments import (
    EXPERIMENTS,
    OUTPUT_ENV_VAR,
    SUITE_NAMES,
    ExperimentSpec,
    Report,
    default_output_dir,
    run_experiment,
    verify,
)
from .oracles import DivergenceError, FenchelGameError

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _format_number(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.4g}"


def print_report(report: Report) -> None:
    """Print the acceptance report as an 80-column table."""
    print("\n" + "=" * 80)
    print("Acceptance Report")
    print("=" * 80)
    print(f"{'Suite':<16} {'Check':<32} {'Result':<8} {'Measured':>10} {'Bound':>10}")
    print("-" * 80)
    for row in report.rows:
        result = "[PASS]" if row.passed else "[FAIL]"
        print(
            f"{row.suite:<16} {row.name[:32]:<32} {result:<8} "
            f"{_format_number(row.measured):>10} {_format_number(row.bound):>10}"
        )
        if row.detail and not row.passed:
            print(f"  {row.detail}")
    print("-" * 80)
    failed = sum(not row.passed for row in report.rows)
    print(f"Total checks: {len(report.rows)}, failed: {failed}")


def _resolve_spec(args: argparse.Namespace) -> ExperimentSpec:
    target = args.target
    if target.endswith(".json") or Path(target).is_file():
        spec = ExperimentSpec.from_file(target)
    elif target in EXPERIMENTS:
        spec = ExperimentSpec(target)
    elif target in PRESETS:
        spec = ExperimentSpec("game", params={"preset": target})
    else:
        names = sorted(set(EXPERIMENTS) | set(PRESETS))
        raise ValueError(f"Unknown experiment or preset '{target}'. Valid names: {', '.join(names)}")
    if args.seed is not None:
        if args.seed < 0:
            raise ValueError(f"seed must be nonnegative, got {args.seed}")
        spec.seed = args.seed
    if args.set:
        spec = spec.with_overrides(args.set)
    return spec


def cmd_run(args: argparse.Namespace) -> int:
    """
    Run one experiment and write its CSV traces and sidecar.

    The target is a registered experiment, a preset name (run on a seeded
    least-squares problem) or a JSON config file.
    """
    try:
        spec = _resolve_spec(args)
        out_dir = Path(args.out) if args.out else default_output_dir()

        print(f"Running experiment '{spec.name}' (seed {spec.seed})...")
        paths = run_experiment(spec, out_dir)
        for path in paths:
            print(f"[SAVED] {path}")
        return EXIT_OK

    except DivergenceError as e:
        print(f"[ERROR] Run diverged at iteration {e.iteration}: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except FenchelGameError as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_FAILURE
    except ValueError as e:
        print(f"[ERROR] Invalid input: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:
        print(f"[ERROR] Unexpected error: {e}", file=sys.stderr)
        return EXIT_FAILURE


def cmd_verify(args: argparse.Namespace) -> int:
    """Evaluate an acceptance suite, print the report and save it as JSON."""
    try:
        report = verify(args.suite, seed=args.seed)
    except ValueError as e:
        print(f"[ERROR] Invalid input: {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        print_report(report)
        if args.json:
            json_path = Path(args.json)
        else:
            out_dir = Path(args.out) if args.out else default_output_dir()
            json_path = out_dir / f"verify_{args.suite}.json"
        print(f"[SAVED] {report.write_json(json_path)}")
    except Exception as e:
        print(f"[ERROR] Unexpected error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    return report.exit_code


def cmd_list(args: argparse.Namespace) -> int:
    """List registered experiments and game presets."""
    print("\n" + "=" * 80)
    print("Experiments")
    print("=" * 80)
    for name in sorted(EXPERIMENTS):
        description = EXPERIMENTS[name].description
        if len(description) > 55:
            description = description[:52] + "..."
        print(f"{name:<24} {description:<55}")
    print("-" * 80)
    print(f"Total experiments: {len(EXPERIMENTS)}")

    print("\n" + "=" * 80)
    print("Presets (run on a seeded least-squares problem)")
    print("=" * 80)
    for name in sorted(PRESETS):
        print(f"  {name}")
    print("-" * 80)
    print(f"Total presets: {len(PRESETS)}")
    print(f"\nSuites: {', '.join(SUITE_NAMES)}")
    return EXIT_OK


def create_parser() -> argparse.ArgumentParser:
    """Create the argument parser for the CLI."""
    parser = argparse.ArgumentParser(
        prog="fenchel-game",
        description="Run optimization methods as Fenchel games and reproduce their convergence experiments",
        epilog=f"Output files go to --out, ${OUTPUT_ENV_VAR} or ./outputs, in that order.",
    )

    parser.add_argument(
        "--version",
        action="version",
        version=f"%(prog)s {__version__}",
    )

    parser.add_argument(
        "--verbose",
        action="store_true",
        help="Log progress of the library at INFO level",
    )

    subparsers = parser.add_subparsers(dest="command", help="Available commands")
    run_parser = subparsers.add_parser(
        "run",
        help="Run an experiment, a preset or a JSON config file",
    )
    run_parser.add_argument(
        "target",
        type=str,
        help="Experiment name, preset name or path to a JSON config",
    )
    run_parser.add_argument(
        "--out",
        type=str,
        default=None,
        help=f"Output directory (default: ${OUTPUT_ENV_VAR} or outputs)",
    )
    run_parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help="Root seed (default: the config's seed, 0 for names)",
    )
    run_parser.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override a parameter; dots address nested keys, values are parsed as JSON (repeatable)",
    )
    verify_parser = subparsers.add_parser(
        "verify",
        help="Run an acceptance suite",
    )
    verify_parser.add_argument(
        "suite",
        type=str,
        help=f"Suite name ({', '.join(SUITE_NAMES)})",
    )
    verify_parser.add_argument(
        "--json",
        type=str,
        default=None,
        help="Write the report as JSON to this path (default: <out>/verify_<suite>.json)",
    )
    verify_parser.add_argument(
        "--out",
        type=str,
        default=None,
        help=f"Output directory for the report (default: ${OUTPUT_ENV_VAR} or outputs)",
    )
    verify_parser.add_argument(
        "--seed",
        type=int,
        default=0,
        help="Root seed (default: 0)",
    )
    subparsers.add_parser(
        "list",
        help="List experiments, presets and suites",
    )

    return parser


def main(argv: List[str] = None) -> int:
    """
    Main entry point for the CLI.

    Args:
        argv: Command-line arguments (uses sys.argv if None)

    Returns:
        Exit code (0 success, 1 failed check or runtime error, 2 usage error)
    """
    parser = create_parser()
    args = parser.parse_args(argv)

    if args.verbose:
        logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")

    if not args.command:
        parser.print_help()
        return EXIT_USAGE
    if args.command == "run":
        return cmd_run(args)
    if args.command == "verify":
        return cmd_verify(args)
    if args.command == "list":
        return cmd_list(args)
    print(f"[ERROR] Unknown command: {args.command}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
