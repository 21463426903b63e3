"""
Experiment configuration schema and loader.

A JSON file with sections system / graph / algorithm / channel / experiment is
parsed with pydantic, then compiled into the domain objects the simulator
runs on. Every rejection names the offending field.
"""

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Literal, Optional, Tuple, Union

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from agents.protocol import ChannelModel
from agents.sensing import ConstantFamily, PaperExampleFamily, RegressorFamily, TableFamily, TrueSystem
from agents.state import AlgorithmConfig
from core.config import settings
from core.exceptions import ConfigurationError
from core.graph import NetworkGraph, is_connected
from core.math_core import Box, NoiseModel

logger = structlog.get_logger(__name__)


# ==================== FILE SCHEMA ====================

class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class BoxSection(_Section):
    lo: List[float]
    hi: List[float]


class NoiseSection(_Section):
    kind: Literal["gaussian"] = "gaussian"
    mean: float = 0.0
    std: float = Field(default=1.0, gt=0.0)


class RegressorSection(_Section):
    family: Literal["paper_example", "constant", "custom_table"] = "paper_example"
    vectors: Optional[List[List[float]]] = None
    table_path: Optional[str] = None

    @model_validator(mode="after")
    def _family_payload(self) -> "RegressorSection":
        if self.family == "constant" and not self.vectors:
            raise ValueError("constant family needs 'vectors'")
        if self.family == "custom_table" and not self.table_path:
            raise ValueError("custom_table family needs 'table_path'")
        return self


class SystemSection(_Section):
    theta: List[float] = [1.0, -1.0, 1.0]
    box: BoxSection = BoxSection(lo=[0.0, -2.0, 0.0], hi=[2.0, 0.0, 2.0])
    initial_estimate: List[float] = [0.5, -0.5, 0.5]
    regressors: RegressorSection = RegressorSection()
    thresholds: Union[float, List[float]] = 0.0
    noise: NoiseSection = NoiseSection()


class GraphSection(_Section):
    m: Optional[int] = Field(default=None, ge=1)
    topology: Optional[Literal["cycle", "complete", "path"]] = None
    edges: Optional[List[List[float]]] = None

    @model_validator(mode="after")
    def _one_source(self) -> "GraphSection":
        if self.topology is not None and self.edges is not None:
            raise ValueError("give either 'topology' or 'edges', not both")
        return self


class AlgorithmSection(_Section):
    alpha: float = Field(default=20.0, gt=0.0)
    beta: float = Field(default=70.0, gt=0.0)
    nu: float = Field(default=0.1, ge=0.0, lt=1.0)
    p_assumed: Optional[float] = Field(default=None, ge=0.0, lt=1.0)


class ChannelSection(_Section):
    p_true: float = Field(default=0.1, ge=0.0, lt=1.0)


class ExperimentSection(_Section):
    repetitions: int = Field(default=100, ge=1)
    horizon: int = Field(default=10_000, ge=1)
    checkpoints: Optional[List[int]] = None
    seed: Optional[int] = Field(default=None, ge=0, lt=2**64)
    mode: Literal["cooperative", "noncooperative"] = "cooperative"
    mse_fit_range: Tuple[int, int] = (1_000, 100_000)
    kappa_fit_range: Tuple[int, int] = (100, 100_000)
    per_sensor: bool = False


class ExperimentConfig(_Section):
    """Everything one experiment series needs; mirrors the config file."""

    system: SystemSection = SystemSection()
    graph: GraphSection = GraphSection()
    algorithm: AlgorithmSection = AlgorithmSection()
    channel: ChannelSection = ChannelSection()
    experiment: ExperimentSection = ExperimentSection()

    def with_overrides(self, seed: Optional[int] = None, horizon: Optional[int] = None, **experiment) -> "ExperimentConfig":
        """Copy with experiment-section fields replaced (None leaves a field alone)."""
        updates = {k: v for k, v in dict(experiment, seed=seed, horizon=horizon).items() if v is not None}
        if not updates:
            return self
        section = self.experiment.model_copy(update=updates)
        if horizon is not None and section.checkpoints is not None:
            section = section.model_copy(update={"checkpoints": [c for c in section.checkpoints if c <= horizon]})
        return self.model_copy(update={"experiment": ExperimentSection.model_validate(section.model_dump())})

    def canonical_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()


# ==================== COMPILED EXPERIMENT ====================

@dataclass(frozen=True)
class Experiment:
    """Validated domain objects for one series; what the simulator consumes."""

    config: ExperimentConfig = field(repr=False)
    system: TrueSystem
    graph: NetworkGraph
    algorithm: AlgorithmConfig
    channel: ChannelModel
    initial_estimate: np.ndarray = field(repr=False)
    repetitions: int
    horizon: int
    checkpoints: Tuple[int, ...]
    seed: int
    mode: str
    mse_fit_range: Tuple[int, int]
    kappa_fit_range: Tuple[int, int]
    per_sensor: bool
    table_digest: Optional[str] = None  # sha256 of a custom_table file

    @property
    def cooperative(self) -> bool:
        return self.mode == "cooperative"

    @property
    def config_hash(self) -> str:
        """Config hash; a regressor table's contents are folded in so editing the file changes it."""
        if self.table_digest is None:
            return self.config.config_hash()
        digest = hashlib.sha256(self.config.canonical_json().encode("utf-8"))
        digest.update(self.table_digest.encode("utf-8"))
        return digest.hexdigest()


def default_checkpoints(horizon: int) -> Tuple[int, ...]:
    """1..9 times each power of ten up to the horizon, plus the horizon itself."""
    steps = set()
    decade = 1
    while decade <= horizon:
        steps.update(d * decade for d in range(1, 10) if d * decade <= horizon)
        decade *= 10
    steps.add(horizon)
    return tuple(sorted(steps))


def _table_path(section: RegressorSection, base_dir: Optional[Path]) -> Path:
    path = Path(section.table_path)
    if not path.is_absolute() and base_dir is not None:
        path = base_dir / path
    return path


def _build_family(section: RegressorSection, base_dir: Optional[Path]) -> RegressorFamily:
    if section.family == "paper_example":
        return PaperExampleFamily()
    if section.family == "constant":
        return ConstantFamily(np.array(section.vectors, dtype=float))
    return TableFamily.from_csv(_table_path(section, base_dir))


def _table_digest(section: RegressorSection, base_dir: Optional[Path]) -> Optional[str]:
    if section.family != "custom_table":
        return None
    path = _table_path(section, base_dir)
    try:
        return hashlib.sha256(path.read_bytes()).hexdigest()
    except OSError as e:
        raise ConfigurationError(f"cannot read regressor table: {e}", ["system.regressors.table_path"]) from e


def _build_graph(section: GraphSection, m: int) -> NetworkGraph:
    if section.m is not None and section.m != m:
        raise ConfigurationError(f"graph has {section.m} sensors, system has {m}", ["graph.m"])
    if section.edges is not None:
        return NetworkGraph.from_edges(m, section.edges)
    topology = section.topology or "cycle"
    return getattr(NetworkGraph, topology)(m)


def compile_experiment(cfg: ExperimentConfig, base_dir: Optional[Path] = None) -> Experiment:
    """Turn a parsed config into domain objects, enforcing cross-field invariants."""
    sys_cfg, exp_cfg = cfg.system, cfg.experiment
    n = len(sys_cfg.theta)
    for name, vec in (("system.box.lo", sys_cfg.box.lo), ("system.box.hi", sys_cfg.box.hi),
                      ("system.initial_estimate", sys_cfg.initial_estimate)):
        if len(vec) != n:
            raise ConfigurationError(f"expected {n} entries, got {len(vec)}", [name])

    box = Box(np.array(sys_cfg.box.lo), np.array(sys_cfg.box.hi))
    family = _build_family(sys_cfg.regressors, base_dir)
    if family.n != n:
        raise ConfigurationError(f"regressors have dimension {family.n}, theta has {n}", ["system.regressors"])
    m = family.m
    thresholds = sys_cfg.thresholds
    if isinstance(thresholds, list) and len(thresholds) != m:
        raise ConfigurationError(f"expected {m} thresholds, got {len(thresholds)}", ["system.thresholds"])

    noise = NoiseModel(kind=sys_cfg.noise.kind, mean=sys_cfg.noise.mean, std=sys_cfg.noise.std)
    system = TrueSystem.build(sys_cfg.theta, box, family, thresholds, noise)

    initial = np.array(sys_cfg.initial_estimate, dtype=float)
    if not box.contains(initial):
        raise ConfigurationError("initial estimate lies outside the parameter box", ["system.initial_estimate"])

    graph = _build_graph(cfg.graph, m)
    if exp_cfg.mode == "cooperative" and not is_connected(graph):
        raise ConfigurationError("cooperative mode needs a connected graph", ["graph.edges"])

    p_assumed = cfg.algorithm.p_assumed if cfg.algorithm.p_assumed is not None else cfg.channel.p_true
    algorithm = AlgorithmConfig(
        alpha=cfg.algorithm.alpha, beta=cfg.algorithm.beta, nu=cfg.algorithm.nu, box=box, p_assumed=p_assumed
    )
    channel = ChannelModel(p_true=cfg.channel.p_true)

    horizon = exp_cfg.horizon
    if exp_cfg.checkpoints is None:
        checkpoints = default_checkpoints(horizon)
    else:
        checkpoints = tuple(exp_cfg.checkpoints)
        if not checkpoints:
            raise ConfigurationError("checkpoint list is empty", ["experiment.checkpoints"])
        if list(checkpoints) != sorted(set(checkpoints)):
            raise ConfigurationError("checkpoints must be sorted and unique", ["experiment.checkpoints"])
        if checkpoints[0] < 1 or checkpoints[-1] > horizon:
            raise ConfigurationError(f"checkpoints must lie in [1, {horizon}]", ["experiment.checkpoints"])

    for name, (lo, hi) in (("experiment.mse_fit_range", exp_cfg.mse_fit_range),
                           ("experiment.kappa_fit_range", exp_cfg.kappa_fit_range)):
        if not 1 <= lo < hi:
            raise ConfigurationError("fit range needs 1 <= k_min < k_max", [name])

    return Experiment(
        config=cfg,
        system=system,
        graph=graph,
        algorithm=algorithm,
        channel=channel,
        initial_estimate=initial,
        repetitions=exp_cfg.repetitions,
        horizon=horizon,
        checkpoints=checkpoints,
        seed=exp_cfg.seed if exp_cfg.seed is not None else settings.default_seed,
        mode=exp_cfg.mode,
        mse_fit_range=tuple(exp_cfg.mse_fit_range),
        kappa_fit_range=tuple(exp_cfg.kappa_fit_range),
        per_sensor=exp_cfg.per_sensor,
        table_digest=_table_digest(sys_cfg.regressors, base_dir),
    )


def _validation_fields(err: ValidationError) -> List[str]:
    return [".".join(str(part) for part in e["loc"]) or "<root>" for e in err.errors()]


def parse_config(data: Union[dict, str]) -> ExperimentConfig:
    """Validate a dict or JSON text; pydantic errors become ConfigurationError."""
    try:
        if isinstance(data, str):
            return ExperimentConfig.model_validate_json(data)
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        details = "; ".join(f"{'.'.join(map(str, x['loc']))}: {x['msg']}" for x in e.errors())
        raise ConfigurationError(f"invalid experiment config ({details})", _validation_fields(e)) from e


def load_config(
    path: Union[str, Path], seed: Optional[int] = None, horizon: Optional[int] = None
) -> Experiment:
    """Read, validate and compile a JSON experiment file, applying CLI overrides."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigurationError(f"cannot read config file {path}: {e}", ["<file>"]) from e
    cfg = parse_config(text).with_overrides(seed=seed, horizon=horizon)
    experiment = compile_experiment(cfg, base_dir=path.parent)
    logger.info("config loaded", path=str(path), config_hash=experiment.config_hash[:12], mode=experiment.mode)
    return experiment
