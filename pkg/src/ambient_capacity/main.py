#!/usr/bin/env python3
"""
Ambient backscatter capacity simulator - CLI Entry Point

Evaluate capacity estimators at one operating point, sweep one parameter, or
reproduce a published figure as a CSV table.

Usage:
    ambient-capacity run --quantity c3_no_backscatter,delta_c3
    ambient-capacity sweep --variable alpha_sq_db --grid -40,-30,-20 --quantity delta_c3
    ambient-capacity figure --preset fig5 --out fig5.csv
    ambient-capacity --help
"""

import argparse
import logging
import sys
from typing import Sequence

from omegaconf import DictConfig

from .cache import EstimateCache
from .config import (
    apply_overrides,
    config_hash,
    debug_config,
    load_scenario_config,
    merge_dotlist,
    validate_config,
)
from .errors import ConfigValidationError
from .logging import bootstrap_logger
from .pipeline import (
    SWEEP_VARIABLES,
    ScenarioRunner,
    SweepRunner,
    SweepSpec,
    available_quantities,
    figure_preset,
)
from .pipeline.runner import RunResult
from .utils.file_utils import save_csv, save_jsonl, write_csv

logger = logging.getLogger("ambient_capacity.main")

INTERACTIVE_TRIALS = 100_000


def _add_common_arguments(parser: argparse.ArgumentParser) -> None:
    # Scenario sources
    parser.add_argument("--config", type=str, default=None, help="Scenario YAML file (default: packaged scenario.yaml)")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Dotted override, repeatable (e.g. --set power.snr_l_db=10)",
    )

    # Monte-Carlo parameters
    parser.add_argument("--trials", type=int, default=None, help="Trials per estimate (default: 1e5, or mc.trials with --full)")
    parser.add_argument("--seed", type=int, default=None, help="Master seed (default: mc.seed)")
    parser.add_argument("--full", action="store_true", help="Use the configured trial count (1e6 by default)")
    parser.add_argument("--workers", type=int, default=None, help="Parallel workers for trial blocks")
    parser.add_argument("--progress", action="store_true", help="Show a progress bar per estimate")
    parser.add_argument(
        "--strict-paper",
        "--published-conventions",
        dest="published_conventions",
        action="store_true",
        help="Extra log2(e) in the high-SNR gain and unit-energy 4-ASK",
    )

    # Output
    parser.add_argument("--out", type=str, default="-", help="CSV output path, '-' for stdout (default: -)")
    parser.add_argument("--records", type=str, default=None, help="Also write one JSON line per row")
    parser.add_argument("--cache-dir", type=str, default=None, help="Reuse estimates cached in this directory")
    parser.add_argument("--verbose", "-v", action="store_true", help="Enable verbose logging output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ambient-capacity",
        description="Capacity bounds of ambient backscatter over a multicarrier legacy system",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="Quantities: " + ", ".join(available_quantities()),
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Evaluate quantities at one operating point")
    run.add_argument("--quantity", type=str, default=None, help="NAME[,NAME...] (default: config quantities)")
    _add_common_arguments(run)

    sweep = commands.add_parser("sweep", help="Sweep one parameter")
    sweep.add_argument(
        "--variable",
        type=str,
        required=True,
        choices=SWEEP_VARIABLES,
        help="Swept parameter",
    )
    sweep.add_argument("--grid", type=str, required=True, help="Comma-separated monotone grid")
    sweep.add_argument("--quantity", type=str, required=True, help="NAME[,NAME...]")
    sweep.add_argument("--reference", choices=["d13", "d14"], default="d13", help="Distance d12_ratio is relative to")
    _add_common_arguments(sweep)

    figure = commands.add_parser("figure", help="Reproduce a published figure (3 to 11)")
    figure.add_argument("--preset", type=str, required=True, help="fig3 ... fig11")
    _add_common_arguments(figure)

    return parser


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    """Parse command line arguments."""
    return build_parser().parse_args(argv)


def resolve_trials(requested: int | None, configured: int, full: bool) -> int:
    """Explicit --trials wins; otherwise interactive runs are capped unless --full."""
    if requested is not None:
        return requested
    return configured if full else min(configured, INTERACTIVE_TRIALS)


def _cli_overrides(args: argparse.Namespace, cfg: DictConfig) -> dict:
    overrides = {"mc.trials": resolve_trials(args.trials, cfg.mc.trials, args.full)}
    if args.seed is not None:
        overrides["mc.seed"] = args.seed
    if args.workers is not None:
        overrides["mc.workers"] = args.workers
    if args.progress:
        overrides["mc.progress"] = True
    if args.published_conventions:
        overrides["options.published_conventions"] = True
    return overrides


def _parse_grid(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as e:
        raise ConfigValidationError(f"bad grid '{text}': {e}") from e


def _emit(result: RunResult, args: argparse.Namespace) -> None:
    if args.out == "-":
        write_csv(result.table, sys.stdout, result.metadata)
    else:
        save_csv(result.table, args.out, result.metadata)
        logger.info(f"CSV: {args.out}")
    if args.records:
        save_jsonl(result.table.to_dict(orient="records"), args.records)
        logger.info(f"JSONL: {args.records}")


def main(argv: Sequence[str] | None = None) -> int:
    """Main function."""
    args = parse_args(argv)
    bootstrap_logger("DEBUG" if args.verbose else "INFO")

    try:
        cache = EstimateCache(args.cache_dir) if args.cache_dir else None

        if args.command == "figure":
            cfg, spec = figure_preset(args.preset, load_scenario_config(args.config))
            cfg = merge_dotlist(cfg, args.overrides)
        else:
            cfg = load_scenario_config(args.config, args.overrides)
        cfg = apply_overrides(cfg, _cli_overrides(args, cfg))
        validate_config(cfg)

        logger.info("Configuration:")
        logger.info(f"  Command: {args.command}")
        logger.info(f"  Trials: {cfg.mc.trials}")
        logger.info(f"  Seed: {cfg.mc.seed}")
        logger.info(f"  Config hash: {config_hash(cfg)}")
        if args.verbose:
            debug_config(cfg, logger)

        if args.command == "run":
            result = ScenarioRunner(cache).run_scenario(cfg, args.quantity)
        elif args.command == "sweep":
            spec = SweepSpec(
                variable=args.variable,
                grid=_parse_grid(args.grid),
                quantities=tuple(args.quantity.split(",")),
                reference=args.reference,
            )
            result = SweepRunner(cache).run_sweep(cfg, spec)
        else:
            result = SweepRunner(cache).run_sweep(cfg, spec, preset=args.preset)

        _emit(result, args)
        logger.info(f"✅ Done: {len(result.table)} rows")
        return 0

    except ConfigValidationError as e:
        logger.error(f"Invalid configuration: {e}")
        return 2
    except KeyboardInterrupt:
        logger.info("⚠️ User interrupted")
        return 130
    except Exception as e:
        logger.exception(f"Error occurred: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
