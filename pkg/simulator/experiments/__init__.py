"""Experiment orchestration: config loading, Monte Carlo runs, metrics, presets and result files."""

from .config import Experiment, ExperimentConfig, compile_experiment, load_config, parse_config
from .metrics import MetricsSummary, comm_bit_rate, fit_loglog_slope
from .presets import PresetName, expand_preset, preset_names
from .report import run_experiment
from .runner import RunTrace, run_monte_carlo, run_single

__all__ = [
    "Experiment",
    "ExperimentConfig",
    "compile_experiment",
    "load_config",
    "parse_config",
    "MetricsSummary",
    "comm_bit_rate",
    "fit_loglog_slope",
    "PresetName",
    "expand_preset",
    "preset_names",
    "run_experiment",
    "RunTrace",
    "run_monte_carlo",
    "run_single",
]
