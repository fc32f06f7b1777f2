#!/usr/bin/env python3
"""
DFRC Tracker CLI - radar-assisted predictive beamforming simulator.

Usage:
    python main.py run [OPTIONS]
    python main.py trial [OPTIONS]
    python main.py sweep --key KEY --values V1,V2 [OPTIONS]

Environment Variables:
    DFRC_TRACKER_CONFIG: Scenario config file (default: built-in scenario)
    DFRC_TRACKER_SEED: Master seed (default: from the config)
    DFRC_TRACKER_OUT: Output directory (default: out)
    DFRC_TRACKER_WORKERS: Worker threads for Monte Carlo trials (default: from the config)
"""

import argparse
import json
import logging
import os
import sys

from dotenv import load_dotenv

from dfrc_tracker import __version__
from dfrc_tracker.config import ScenarioConfig, load_config
from dfrc_tracker.errors import ConfigError, OutputError
from dfrc_tracker.harness import (
    RunResult,
    emit_outputs,
    run_monte_carlo,
    run_sweep,
    run_trial,
    summarize,
    trial_seed,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_IO = 4


def _int_literal(text: str) -> int:
    """Integer in any Python literal base (42, 0x2A, 0b101010)."""
    return int(text, 0)


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(
        description="DFRC Tracker - radar-assisted predictive beamforming simulator",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
    # Full Monte Carlo run with the built-in scenario
    python main.py run --out out --plots

    # One trial of the radar-assisted scheme, verbose trace
    python main.py trial --scheme dfrc --epochs 50

    # Compare 64- and 128-element arrays
    python main.py sweep --key n_antennas --values 64,128 --out sweep
        """,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        type=str,
        default=os.getenv("DFRC_TRACKER_CONFIG"),
        help="Scenario config file (JSON)",
    )
    # argparse runs string defaults through `type`; a malformed variable exits with 2.
    common.add_argument(
        "--seed",
        type=_int_literal,
        default=os.getenv("DFRC_TRACKER_SEED") or None,
        help="Master seed (unsigned 64-bit)",
    )
    common.add_argument(
        "--out",
        type=str,
        default=os.getenv("DFRC_TRACKER_OUT", "out"),
        help="Output directory",
    )
    common.add_argument(
        "--scheme",
        type=str,
        choices=["dfrc", "feedback", "both"],
        default="both",
        help="Scheme(s) to simulate",
    )
    common.add_argument("--plots", action="store_true", help="Also write SVG plots")
    common.add_argument("--trials", type=int, help="Override the number of trials")
    common.add_argument("--epochs", type=int, help="Override the number of epochs")
    common.add_argument(
        "--workers",
        type=_int_literal,
        default=os.getenv("DFRC_TRACKER_WORKERS") or None,
        help="Worker threads for trials",
    )
    common.add_argument(
        "--quiet", "-q", action="store_true", help="Suppress verbose output"
    )

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="Full Monte Carlo run")

    trial = sub.add_parser("trial", parents=[common], help="Single trial with a per-epoch trace")
    trial.add_argument("--index", type=int, default=0, help="Trial index (selects the seed)")

    sweep = sub.add_parser("sweep", parents=[common], help="Vary one config key over a list")
    sweep.add_argument("--key", type=str, required=True, help="Config key, e.g. n_antennas")
    sweep.add_argument(
        "--values", type=str, required=True, help="Comma-separated values, e.g. 64,128"
    )

    return parser.parse_args(argv)


def _parse_value(text: str):
    """Sweep values are JSON scalars; anything else is taken as a string."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def build_config(args: argparse.Namespace) -> ScenarioConfig:
    """
    Load the config file and apply command-line overrides.

    Raises:
        ConfigError: On an unreadable file, unknown keys or invalid values.
    """
    cfg = load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.epochs is not None:
        overrides["epochs"] = args.epochs
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.scheme != "both":
        overrides["schemes"] = [args.scheme]
    return cfg.with_overrides(**overrides) if overrides else cfg


def print_header(cfg: ScenarioConfig, title: str) -> None:
    print("=" * 50)
    print(f"DFRC Tracker - {title}")
    print("=" * 50)
    print(f"Arrays: Nt={cfg.n_tx} Nr={cfg.n_rx} M={cfg.m_vehicle}")
    print(f"Carrier: {cfg.fc / 1e9:g} GHz, block {cfg.dt * 1e3:g} ms, {cfg.epochs} epochs")
    print(f"Transmit SNR: {cfg.tx_snr_db:g} dB")
    print(f"Schemes: {', '.join(cfg.schemes)}")
    print(f"Trials: {cfg.trials}, master seed {cfg.master_seed}")
    print("=" * 50)


def print_summary(run: RunResult) -> None:
    for scheme, stats in sorted(run.summary.per_scheme.items()):
        print(
            f"{scheme:<9} mean |err| {stats['mean_abs_err_deg']:.4f} deg, "
            f"rms {stats['rms_err_deg']:.4f} deg, "
            f"mean rate {stats['mean_rate']:.3f} bps/Hz, "
            f"{stats['incomplete_trials']}/{stats['trials']} incomplete"
        )
        if "fraction_epochs_better" in stats:
            print(f"          lower error in {stats['fraction_epochs_better']:.1%} of epochs")


def cmd_run(cfg: ScenarioConfig, args: argparse.Namespace) -> int:
    verbose = not args.quiet
    if verbose:
        print_header(cfg, "Monte Carlo run")
    run = run_monte_carlo(cfg, out_dir=args.out, plots=args.plots, progress=verbose)
    if verbose:
        print_summary(run)
        for name, path in run.artifacts.items():
            print(f"  {name}: {path}")
    if run.all_diverged:
        print("❌ The filter diverged in every trial.", file=sys.stderr)
        return EXIT_DIVERGED
    return EXIT_OK


def cmd_trial(cfg: ScenarioConfig, args: argparse.Namespace) -> int:
    verbose = not args.quiet
    seed = trial_seed(cfg.master_seed, args.index)
    if verbose:
        print_header(cfg, f"trial {args.index} (seed {seed})")

    results = [run_trial(cfg, scheme, seed, trial_index=args.index) for scheme in sorted(cfg.schemes)]
    records = [r for result in results for r in result.records]
    if verbose:
        print(f"{'scheme':<9}{'epoch':>6}{'t [s]':>8}{'true':>10}{'est':>10}{'|err|':>10}{'|delta|':>9}{'rate':>8}")
        print("-" * 70)
        for r in records:
            print(
                f"{r.scheme:<9}{r.epoch:>6}{r.t_s:>8.2f}{r.theta_true_deg:>10.4f}"
                f"{r.theta_est_deg:>10.4f}{r.abs_error_deg:>10.5f}{r.abs_delta:>9.4f}{r.rate_bpshz:>8.3f}"
            )

    emit_outputs(records, summarize(records), args.out, plots=args.plots, config=cfg)
    if all(result.diverged for result in results):
        print("❌ The filter diverged.", file=sys.stderr)
        return EXIT_DIVERGED
    return EXIT_OK


def cmd_sweep(cfg: ScenarioConfig, args: argparse.Namespace) -> int:
    verbose = not args.quiet
    values = [_parse_value(v.strip()) for v in args.values.split(",") if v.strip()]
    if not values:
        raise ConfigError("--values must list at least one value")
    if verbose:
        print_header(cfg, f"sweep over {args.key}")

    runs = run_sweep(cfg, args.key, values, out_dir=args.out, plots=args.plots, progress=verbose)
    if verbose:
        for label, run in runs.items():
            print(f"\n{label}")
            print("-" * 50)
            print_summary(run)
    if any(run.all_diverged for run in runs.values()):
        print("❌ The filter diverged in every trial of at least one sweep point.", file=sys.stderr)
        return EXIT_DIVERGED
    return EXIT_OK


COMMANDS = {"run": cmd_run, "trial": cmd_trial, "sweep": cmd_sweep}


def main(argv: list[str] | None = None) -> int:
    """Main entry point."""
    load_dotenv()
    args = parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        cfg = build_config(args)
    except ConfigError as e:
        print(f"❌ Config error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        return COMMANDS[args.command](cfg, args)
    except ConfigError as e:
        print(f"❌ Config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OutputError as e:
        print(f"❌ I/O error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
