"""Command-line surface: estimate, simulate and run studies from flat files.

Exit codes: 0 on success, 1 for usage, validation and domain errors, 2 for
I/O errors, 3 when a study ran but one of its checks failed.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from pydantic import ValidationError

from .services.errors import ConfigError, FourierVolError
from .services.experiments import run_study
from .services.pipeline import estimate_integrated, estimate_spot, simulate_ticks, study_config_from_run
from .services.presets import get_preset
from .services.settings import get_settings
from .services.tick_io import (
    format_integrated,
    ingest_csv,
    parse_config_file,
    spot_output_path,
    write_report,
    write_spot,
    write_ticks_csv,
    write_truth_csv,
)

logger = logging.getLogger(__name__)

VARIANTS = ("canonical", "positive", "fejer-stabilized")
CHECKS_FAILED = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors as exit code 1 instead of exiting with 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def parse_window(value: str) -> Tuple[float, float]:
    parts = value.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"invalid window '{value}', expected a,b")
    try:
        start, end = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid window '{value}', expected two numbers") from exc
    if not end > start:
        raise argparse.ArgumentTypeError(f"invalid window '{value}', need a < b")
    return start, end


def parse_cutoff(value: str):
    if value == "auto":
        return value
    try:
        n = int(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid cutoff '{value}', expected an integer or 'auto'") from exc
    if n < 0:
        raise argparse.ArgumentTypeError(f"invalid cutoff '{value}', must be >= 0")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fouriervol", description=__doc__.splitlines()[0])
    commands = parser.add_subparsers(dest="command", required=True)

    integrated = commands.add_parser("estimate-integrated", help="integrated (co-)volatility for every asset pair")
    integrated.add_argument("--input", required=True, type=Path, help="tick CSV: asset_id,timestamp,log_price")
    integrated.add_argument("--window", type=parse_window, default=None, help="observation window a,b (default: data span)")
    integrated.add_argument("--cutoff", type=parse_cutoff, default="auto", help="N or 'auto'")
    integrated.add_argument("--variant", choices=VARIANTS, default="canonical")
    integrated.add_argument("--format", choices=("csv", "json"), default="csv")
    integrated.add_argument("--out", type=Path, default=None, help="write here instead of stdout")

    spot = commands.add_parser("estimate-spot", help="spot (co-)volatility curves, one file per pair")
    spot.add_argument("--input", required=True, type=Path)
    spot.add_argument("--window", type=parse_window, default=None)
    spot.add_argument("--cutoff", type=parse_cutoff, default="auto", help="Bohr cutoff N or 'auto'")
    spot.add_argument("--spot-cutoff", type=int, default=None, help="Fejér cutoff M (default: N)")
    spot.add_argument("--grid", type=int, default=None, help="number of grid points on [0, 2pi)")
    spot.add_argument("--variant", choices=VARIANTS, default="canonical")
    spot.add_argument("--format", choices=("csv", "json"), default="csv")
    spot.add_argument("--out", required=True, type=Path, help="base path; files are named <stem>_<i>_<j>")

    simulate = commands.add_parser("simulate", help="simulate a model and write ticks plus truth")
    simulate.add_argument("--config", required=True, type=Path)
    simulate.add_argument("--seed", type=int, default=None)
    simulate.add_argument("--out", required=True, type=Path, help="tick CSV; truth goes to <stem>_truth.csv")

    study = commands.add_parser("study", help="run a Monte Carlo study")
    source = study.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", type=Path)
    source.add_argument("--preset")
    study.add_argument("--seed", type=int, default=None)
    study.add_argument("--replications", type=int, default=None)
    study.add_argument("--threads", type=int, default=None)
    study.add_argument("--out", required=True, type=Path, help="summary JSON; records go to <stem>.records.jsonl")
    return parser


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def cmd_estimate_integrated(args) -> int:
    series = ingest_csv(args.input)
    estimates = estimate_integrated(series, args.window, args.cutoff, args.variant)
    _emit(format_integrated(estimates, args.variant, args.format), args.out)
    for e in estimates:
        print(f"N={e.n_freq} for {e.asset_i}/{e.asset_j}", file=sys.stderr)
    return 0


def cmd_estimate_spot(args) -> int:
    series = ingest_csv(args.input)
    curves = estimate_spot(series, args.window, args.cutoff, args.spot_cutoff, args.variant, args.grid)
    for pc in curves:
        target = spot_output_path(args.out, pc.asset_i, pc.asset_j, args.format)
        write_spot(pc.curve, pc.t_raw, target, args.format)
        print(f"wrote {target} (N={pc.curve.n_freq}, {pc.curve.grid.shape[0]} points)")
    return 0


def cmd_simulate(args) -> int:
    run = parse_config_file(args.config)
    ticks, path, raw_fine = simulate_ticks(run, args.seed)
    write_ticks_csv(ticks, args.out)
    truth = args.out.with_name(f"{args.out.stem}_truth.csv")
    write_truth_csv(path, truth, raw_fine)
    print(f"wrote {args.out} and {truth}")
    return 0


def cmd_study(args) -> int:
    if args.preset:
        config = get_preset(args.preset)
        if args.seed is not None:
            config["seed"] = args.seed
    else:
        config = study_config_from_run(parse_config_file(args.config), args.seed)
    if args.replications is not None:
        config["replications"] = args.replications
    if args.threads is not None:
        config["threads"] = args.threads
    report = run_study(config)
    summary_path, rec_path = write_report(report, args.out)
    failed = sorted(name for name in report.checks if not report.flags.get(name, False))
    print(f"{report.study}: {len(report.records)} records -> {summary_path}, {rec_path}")
    if failed:
        print(f"checks failed: {', '.join(failed)}")
        return CHECKS_FAILED
    print("checks passed")
    return 0


COMMANDS = {
    "estimate-integrated": cmd_estimate_integrated,
    "estimate-spot": cmd_estimate_spot,
    "simulate": cmd_simulate,
    "study": cmd_study,
}


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv`` and run one subcommand; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return 1

    try:
        return COMMANDS[args.command](args)
    except (FourierVolError, ValidationError) as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 2


def main(argv: Optional[List[str]] = None) -> int:
    try:
        level = get_settings().log_level.upper()
    except (ValidationError, ConfigError):
        level = "INFO"
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    return run_command(argv)


if __name__ == "__main__":
    sys.exit(main())
