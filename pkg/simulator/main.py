"""
Command-line entry point for the event-triggered estimation simulator.

    python main.py run --config configs/paper_s5_convergence.json --out results/run
    python main.py preset paper-s5-nu-sweep --out results/nu_sweep
    python main.py constants --config configs/paper_s5_convergence.json
    python main.py presets

Exit status: 0 on success, 2 for invalid input or failed preconditions,
3 for I/O errors.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

import structlog
from dotenv import load_dotenv

from core.config import settings
from core.exceptions import SimulationError
from core.logging_config import initialize_logging
from experiments.config import compile_experiment, load_config
from experiments.presets import expand_preset, preset_names
from experiments.report import format_constants, run_experiment, theory_report

# Load environment variables
load_dotenv()

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_IO = 3


def _non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0 or value >= 2**64:
        raise argparse.ArgumentTypeError("must be a 64-bit non-negative integer")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _job_count(text: str) -> int:
    value = int(text)
    if value == 0 or value < -1:
        raise argparse.ArgumentTypeError("must be -1 (all cores) or at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="etq-sim",
        description="Event-triggered quantized distributed estimation under packet loss",
    )
    parser.add_argument("--log-level", default=None, help="override SIM_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment from a JSON config")
    run.add_argument("--config", required=True, type=Path)
    run.add_argument("--out", type=Path, default=Path(settings.default_output_dir))
    run.add_argument("--seed", type=_non_negative_int, default=None)
    run.add_argument("--horizon", type=_positive_int, default=None)
    run.add_argument("--jobs", type=_job_count, default=None, help="joblib workers (default SIM_N_JOBS)")

    preset = sub.add_parser("preset", help="run a built-in preset")
    preset.add_argument("name", choices=preset_names())
    preset.add_argument("--out", type=Path, default=Path(settings.default_output_dir))
    preset.add_argument("--seed", type=_non_negative_int, default=None)
    preset.add_argument("--horizon", type=_positive_int, default=None)
    preset.add_argument("--jobs", type=_job_count, default=None)

    constants = sub.add_parser("constants", help="print the theory-constants report")
    constants.add_argument("--config", required=True, type=Path)

    sub.add_parser("presets", help="list preset names")
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    exp = load_config(args.config, seed=args.seed, horizon=args.horizon)
    return run_experiment(exp, args.out, n_jobs=args.jobs)


def _cmd_preset(args: argparse.Namespace) -> int:
    series = [
        (label, compile_experiment(cfg))
        for label, cfg in expand_preset(args.name, seed=args.seed, horizon=args.horizon)
    ]
    return run_experiment(series, args.out, n_jobs=args.jobs)


def _cmd_constants(args: argparse.Namespace) -> int:
    exp = load_config(args.config)
    constants, reason = theory_report(exp)
    print(f"# config_sha256={exp.config_hash} seed={exp.seed}")
    print(format_constants(constants, reason), end="")
    return EXIT_OK if constants is not None else EXIT_INVALID


def _cmd_presets(args: argparse.Namespace) -> int:
    for name in preset_names():
        print(name)
    return EXIT_OK


COMMANDS = {
    "run": _cmd_run,
    "preset": _cmd_preset,
    "constants": _cmd_constants,
    "presets": _cmd_presets,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    initialize_logging(level=args.log_level)
    try:
        return COMMANDS[args.command](args)
    except SimulationError as e:
        logger.error("command failed", command=args.command, error=str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as e:
        logger.error("i/o failure", command=args.command, error=str(e))
        print(f"i/o error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
