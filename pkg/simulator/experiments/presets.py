"""
Built-in experiment presets.

Each preset expands into labelled ExperimentConfig series. Only the master
seed and the horizon may be overridden; everything else is fixed here.
"""

from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

import structlog

from core.exceptions import ConfigurationError

from .config import AlgorithmSection, ExperimentConfig, ExperimentSection

logger = structlog.get_logger(__name__)

Series = List[Tuple[str, ExperimentConfig]]

NU_SWEEP = (0.0, 0.1, 0.2, 0.4, 0.6)
P_ASSUMED_SWEEP = (0.0, 0.1, 0.2)


class PresetName(str, Enum):
    CONVERGENCE = "paper-s5-convergence"
    NONCOOP_COMPARISON = "paper-s5-noncoop-comparison"
    NU_SWEEP = "paper-s5-nu-sweep"
    P_MISMATCH = "robustness-p-mismatch"


def _base(nu: float = 0.1, horizon: int = 10_000, **experiment) -> ExperimentConfig:
    """The six-sensor example on the C6 cycle with beta=70, alpha=20, p=0.1."""
    return ExperimentConfig(
        algorithm=AlgorithmSection(alpha=20.0, beta=70.0, nu=nu),
        experiment=ExperimentSection(repetitions=100, horizon=horizon, **experiment),
    )


def _label_nu(nu: float) -> str:
    return f"nu_{nu:g}"


def _convergence() -> Series:
    return [("cooperative", _base())]


def _noncoop_comparison() -> Series:
    return [
        ("cooperative", _base()),
        ("noncooperative", _base(mode="noncooperative")),
    ]


def _nu_sweep() -> Series:
    return [(_label_nu(nu), _base(nu=nu, horizon=100_000)) for nu in NU_SWEEP]


def _p_mismatch() -> Series:
    series = []
    for p in P_ASSUMED_SWEEP:
        cfg = _base()
        cfg = cfg.model_copy(update={"algorithm": cfg.algorithm.model_copy(update={"p_assumed": p})})
        series.append((f"p_assumed_{p:g}", cfg))
    return series


_BUILDERS: Dict[PresetName, Callable[[], Series]] = {
    PresetName.CONVERGENCE: _convergence,
    PresetName.NONCOOP_COMPARISON: _noncoop_comparison,
    PresetName.NU_SWEEP: _nu_sweep,
    PresetName.P_MISMATCH: _p_mismatch,
}


def preset_names() -> List[str]:
    return [p.value for p in PresetName]


def expand_preset(name: str, seed: Optional[int] = None, horizon: Optional[int] = None) -> Series:
    """Labelled configs for a preset, with optional seed and horizon overrides."""
    try:
        preset = PresetName(name)
    except ValueError:
        raise ConfigurationError(
            f"unknown preset '{name}' (choose from {', '.join(preset_names())})", ["preset"]
        ) from None
    series = [(label, cfg.with_overrides(seed=seed, horizon=horizon)) for label, cfg in _BUILDERS[preset]()]
    logger.info("preset expanded", preset=preset.value, series=[label for label, _ in series])
    return series
