"""Command-line entry point: ``chaospso <subcommand> [options]``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import experiment
from .experiment import ConfigError

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME = 0, 1, 2

_STAGES = {
    "analyze-sequences": ("suite", "analysis"),
    "compare": ("compare", "boxplots"),
    "rate": ("ratings",),
    "export": experiment.STAGES,
}


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key=value configuration file")
    common.add_argument("--preset", choices=sorted(experiment.PRESETS), help="scale preset")
    common.add_argument("--workers", type=int, help="worker processes for PSO runs")
    common.add_argument("--seed", type=lambda s: int(s, 0), help="master seed (unsigned 64-bit)")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")
    p = argparse.ArgumentParser(prog="chaospso", description="Chaotic-map driven PSO benchmark harness")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze-sequences", parents=[common], help="densities, autocorrelation, Lyapunov exponents")
    sub.add_parser("run-pso", parents=[common], help="run (or resume) the PSO experiment matrix")
    sub.add_parser("compare", parents=[common], help="Wilcoxon/Friedman matrix, heatmap and boxplots")
    sub.add_parser("rate", parents=[common], help="Elo and Glicko-2 tournament")
    sub.add_parser("full", parents=[common], help="run-pso followed by every export")
    sub.add_parser("export", parents=[common], help="every export from an existing runs.csv")
    return p


def _progress(done, total):
    print(f"\r{done}/{total} blocks", end="" if done < total else "\n", file=sys.stderr, flush=True)


def main(argv=None):
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_VALIDATION
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = {}
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.out is not None:
        overrides["output_dir"] = str(args.out)
    try:
        cfg = experiment.load_config(args.config, args.preset, overrides)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    progress = _progress if sys.stderr.isatty() else None
    try:
        if args.command == "run-pso":
            experiment.run_experiment(cfg, progress=progress)
            errors = {}
        elif args.command == "full":
            errors = experiment.run_full(cfg, progress=progress)
        else:
            errors = experiment.export_all(cfg, stages=_STAGES[args.command])
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001 - top-level runtime boundary
        logging.getLogger("chaospso").exception("run failed")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    for stage, msg in errors.items():
        print(f"error: {stage} export failed: {msg}", file=sys.stderr)
    return EXIT_RUNTIME if errors else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
