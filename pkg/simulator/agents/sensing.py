"""
The true system: regressors, binary threshold measurements and coding vectors.

Each sensor observes s = I{phi^T theta + d <= C}; nothing else about the analog
measurement is available to the estimator.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Protocol, Sequence, Tuple, Union

import numpy as np

from core.exceptions import ConfigurationError, DomainError
from core.math_core import Box, NoiseModel, noise_ppf, sample_noise

StepArray = Union[int, Sequence[int], np.ndarray]


def _steps(ks: StepArray) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(ks, dtype=np.int64))
    if np.any(arr < 1):
        raise DomainError("steps start at k = 1")
    return arr


# ==================== REGRESSOR FAMILIES ====================

class RegressorFamily(Protocol):
    """Regressor generator for the whole network."""

    name: str
    m: int
    n: int

    def block(self, ks: StepArray) -> np.ndarray:
        """Regressors for steps `ks` as an array of shape (len(ks), m, n)."""
        ...

    def bound(self) -> float:
        """phi_bar = sup_k max_i ||phi_{k,i}||."""
        ...


# (coordinate, sign, base) per sensor: phi = sign * (1 - base**-k) * e_coordinate
_PAPER_EXAMPLE_ROWS: Tuple[Tuple[int, float, float], ...] = (
    (0, 1.0, 3.0),
    (1, -1.0, 4.0),
    (2, 1.0, 2.0),
    (0, -1.0, 2.0),
    (1, 1.0, 2.0),
    (2, -1.0, 5.0),
)


@dataclass(frozen=True)
class PaperExampleFamily:
    """
    Six sensors in R^3, each exciting a single coordinate.

    No sensor alone identifies theta; all six together satisfy the
    cooperative excitation condition with window h = 1.
    """

    name: str = "paper_example"
    m: int = 6
    n: int = 3

    def block(self, ks: StepArray) -> np.ndarray:
        k = _steps(ks).astype(float)
        out = np.zeros((k.shape[0], self.m, self.n))
        for i, (coord, sign, base) in enumerate(_PAPER_EXAMPLE_ROWS):
            out[:, i, coord] = sign * (1.0 - np.power(base, -k))
        return out

    def bound(self) -> float:
        return 1.0


@dataclass(frozen=True)
class ConstantFamily:
    """Time-invariant regressors, one row per sensor."""

    vectors: np.ndarray = field(repr=False)
    name: str = "constant"

    def __post_init__(self):
        v = np.array(self.vectors, dtype=float)
        if v.ndim != 2 or v.size == 0:
            raise ConfigurationError("constant regressors need an (m, n) array", ["system.regressors.vectors"])
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def m(self) -> int:
        return int(self.vectors.shape[0])

    @property
    def n(self) -> int:
        return int(self.vectors.shape[1])

    def block(self, ks: StepArray) -> np.ndarray:
        k = _steps(ks)
        return np.broadcast_to(self.vectors, (k.shape[0], self.m, self.n)).copy()

    def bound(self) -> float:
        return float(np.max(np.linalg.norm(self.vectors, axis=1)))


@dataclass(frozen=True)
class TableFamily:
    """Regressors read from a table of T steps, repeated with period T."""

    table: np.ndarray = field(repr=False)
    name: str = "custom_table"

    def __post_init__(self):
        t = np.array(self.table, dtype=float)
        if t.ndim != 3 or t.size == 0:
            raise ConfigurationError("regressor table must have shape (T, m, n)", ["system.regressors.table_path"])
        if not np.all(np.isfinite(t)):
            raise ConfigurationError("regressor table contains non-finite values", ["system.regressors.table_path"])
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def period(self) -> int:
        return int(self.table.shape[0])

    @property
    def m(self) -> int:
        return int(self.table.shape[1])

    @property
    def n(self) -> int:
        return int(self.table.shape[2])

    def block(self, ks: StepArray) -> np.ndarray:
        k = _steps(ks)
        return self.table[(k - 1) % self.period].copy()

    def bound(self) -> float:
        return float(np.max(np.linalg.norm(self.table, axis=2)))

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "TableFamily":
        """
        Load rows `k,i,phi_1,...,phi_n` (1-based k and i, header allowed).

        Every (k, i) pair for k = 1..T and i = 1..m must appear exactly once.
        """
        try:
            rows = np.loadtxt(path, delimiter=",", comments="#", ndmin=2, skiprows=_header_rows(path))
        except OSError as e:
            raise ConfigurationError(f"cannot read regressor table: {e}", ["system.regressors.table_path"]) from e
        if rows.shape[1] < 3:
            raise ConfigurationError("regressor table needs columns k,i,phi...", ["system.regressors.table_path"])
        ks = rows[:, 0].astype(int)
        idx = rows[:, 1].astype(int)
        period, m, n = int(ks.max()), int(idx.max()), rows.shape[1] - 2
        if ks.min() < 1 or idx.min() < 1 or rows.shape[0] != period * m:
            raise ConfigurationError("regressor table must list every (k, i) once", ["system.regressors.table_path"])
        table = np.full((period, m, n), np.nan)
        table[ks - 1, idx - 1] = rows[:, 2:]
        return cls(table)


def _header_rows(path: Union[str, Path]) -> int:
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            return 0 if stripped[0] in "+-.0123456789" else 1
    return 0


def regressor(family: RegressorFamily, k: int, i: int) -> np.ndarray:
    """phi_{k,i} for a single sensor (1-based i)."""
    if not 1 <= int(i) <= family.m:
        raise DomainError(f"sensor index {i} outside 1..{family.m} for family {family.name}")
    return family.block([k])[0, int(i) - 1]


def coding_vector(k: int, n: int) -> np.ndarray:
    """psi_k = e_{((k-1) mod n) + 1}: cyclic switching through the standard basis."""
    if k < 1 or n < 1:
        raise DomainError("coding vector needs k >= 1 and n >= 1")
    psi = np.zeros(n)
    psi[(k - 1) % n] = 1.0
    return psi


def coding_indices(ks: StepArray, n: int) -> np.ndarray:
    """Index of the active basis vector for each step in `ks`."""
    return (_steps(ks) - 1) % n


# ==================== TRUE SYSTEM ====================

@dataclass(frozen=True)
class SensorModel:
    """One sensor: its slot in the regressor family, its threshold C_i and its noise."""

    family: RegressorFamily
    index: int
    threshold: float = 0.0
    noise: NoiseModel = field(default_factory=NoiseModel)

    def regressor(self, k: int) -> np.ndarray:
        return regressor(self.family, k, self.index)


@dataclass(frozen=True)
class TrueSystem:
    """The unknown parameter, its prior box and the sensors observing it."""

    theta: np.ndarray = field(repr=False)
    box: Box
    sensors: Tuple[SensorModel, ...]

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float).reshape(-1)
        if theta.shape[0] != self.box.dim:
            raise ConfigurationError("theta and box dimensions differ", ["system.theta", "system.box"])
        if not self.box.contains(theta):
            raise ConfigurationError("theta lies outside the parameter box", ["system.theta"])
        if not self.sensors:
            raise ConfigurationError("system needs at least one sensor", ["system.regressors"])
        family = self.sensors[0].family
        if any(s.family is not family for s in self.sensors):
            raise ConfigurationError("all sensors must share one regressor family", ["system.regressors"])
        if family.n != theta.shape[0] or family.m != len(self.sensors):
            raise ConfigurationError(
                f"regressor family is {family.m}x{family.n}, system is {len(self.sensors)}x{theta.shape[0]}",
                ["system.regressors"],
            )
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "sensors", tuple(self.sensors))

    @classmethod
    def build(
        cls,
        theta: Sequence[float],
        box: Box,
        family: RegressorFamily,
        thresholds: Union[float, Sequence[float]] = 0.0,
        noise: NoiseModel = NoiseModel(),
    ) -> "TrueSystem":
        c = np.broadcast_to(np.asarray(thresholds, dtype=float), (family.m,))
        sensors = tuple(SensorModel(family, i + 1, float(c[i]), noise) for i in range(family.m))
        return cls(np.asarray(theta, dtype=float), box, sensors)

    @property
    def m(self) -> int:
        return len(self.sensors)

    @property
    def n(self) -> int:
        return int(self.theta.shape[0])

    @property
    def family(self) -> RegressorFamily:
        return self.sensors[0].family

    @property
    def thresholds(self) -> np.ndarray:
        return np.array([s.threshold for s in self.sensors])

    def noise_groups(self) -> Dict[NoiseModel, np.ndarray]:
        """0-based sensor indices grouped by shared noise model."""
        groups: Dict[NoiseModel, List[int]] = {}
        for i, s in enumerate(self.sensors):
            groups.setdefault(s.noise, []).append(i)
        return {model: np.array(idx) for model, idx in groups.items()}


def measure(system: TrueSystem, k: int, i: int, noise_rng: np.random.Generator) -> int:
    """s_{k,i} = I{phi^T theta + d <= C_i}; consumes exactly one noise draw."""
    sensor = system.sensors[_sensor_slot(system, i)]
    d = sample_noise(sensor.noise, noise_rng)
    y = float(sensor.regressor(k) @ system.theta) + d
    return int(y <= sensor.threshold)


def measure_block(phi_theta: np.ndarray, noise: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    """Vectorised measurement for precomputed phi^T theta and noise samples."""
    return (phi_theta + noise <= thresholds).astype(np.int8)


def _sensor_slot(system: TrueSystem, i: int) -> int:
    if not 1 <= int(i) <= system.m:
        raise DomainError(f"sensor index {i} outside 1..{system.m}")
    return int(i) - 1


def noise_block(system: TrueSystem, uniforms: np.ndarray) -> np.ndarray:
    """Noise samples for a (steps, m) block of uniforms, one uniform per draw."""
    return np.column_stack([noise_ppf(s.noise, uniforms[:, i]) for i, s in enumerate(system.sensors)])
