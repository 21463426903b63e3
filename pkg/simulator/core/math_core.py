"""
Scalar distribution functions and the box projection.

Laplace(0, 1) supplies the encoder dither; the Gaussian noise model supplies the
measurement CDF used by the local innovation term. All functions accept
scalars or numpy arrays and are vectorised elementwise.
"""

from dataclasses import dataclass, field
from typing import Literal, Union

import numpy as np
from scipy import special

from .exceptions import ConfigurationError, DomainError

ArrayLike = Union[float, np.ndarray]

# Smallest positive uniform accepted by the inverse CDFs; numpy's random()
# can return exactly 0.0.
_U_FLOOR = np.finfo(float).tiny


def _require_finite(x: ArrayLike, name: str = "x") -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


def _unwrap(arr: np.ndarray) -> ArrayLike:
    return float(arr) if arr.ndim == 0 else arr


# ==================== LAPLACE(0, 1) ====================

def laplace_cdf(x: ArrayLike) -> ArrayLike:
    """G(x) = exp(x)/2 for x <= 0, 1 - exp(-x)/2 for x > 0."""
    arr = _require_finite(x)
    out = np.where(arr <= 0.0, 0.5 * np.exp(np.minimum(arr, 0.0)), 1.0 - 0.5 * np.exp(-np.maximum(arr, 0.0)))
    return _unwrap(out)


def laplace_pdf(x: ArrayLike) -> ArrayLike:
    """g(x) = exp(-|x|)/2."""
    arr = _require_finite(x)
    return _unwrap(0.5 * np.exp(-np.abs(arr)))


def laplace_ppf(u: ArrayLike) -> ArrayLike:
    """Inverse of laplace_cdf on (0, 1); u = 0 is nudged to the smallest positive double."""
    arr = np.maximum(np.asarray(u, dtype=float), _U_FLOOR)
    if np.any(arr >= 1.0):
        raise DomainError("uniform draw must lie in [0, 1)")
    out = np.where(arr < 0.5, np.log(2.0 * arr), -np.log(2.0 * (1.0 - arr)))
    return _unwrap(out)


def sample_laplace(rng: np.random.Generator) -> float:
    """One Lap(0, 1) draw by inverse CDF of exactly one uniform."""
    return float(laplace_ppf(rng.random()))


# ==================== MEASUREMENT NOISE ====================

@dataclass(frozen=True)
class NoiseModel:
    """Time-invariant conditional distribution of the measurement noise."""

    kind: Literal["gaussian"] = "gaussian"
    mean: float = 0.0
    std: float = 1.0

    def __post_init__(self):
        if self.kind == "gaussian" and not self.std > 0.0:
            raise ConfigurationError("gaussian noise needs std > 0", ["noise.std"])

    @classmethod
    def gaussian(cls, mean: float = 0.0, std: float = 1.0) -> "NoiseModel":
        return cls(kind="gaussian", mean=mean, std=std)


def noise_cdf(model: NoiseModel, x: ArrayLike) -> ArrayLike:
    """F(x) for the configured noise; scipy's ndtr is accurate to double precision."""
    if model.kind == "gaussian":
        arr = np.asarray(x, dtype=float)
        return _unwrap(special.ndtr((arr - model.mean) / model.std))
    raise ConfigurationError(f"unknown noise kind {model.kind!r}", ["noise.kind"])


def noise_pdf(model: NoiseModel, x: ArrayLike) -> ArrayLike:
    """f(x), the density of the configured noise."""
    if model.kind == "gaussian":
        z = (np.asarray(x, dtype=float) - model.mean) / model.std
        return _unwrap(np.exp(-0.5 * z * z) / (model.std * np.sqrt(2.0 * np.pi)))
    raise ConfigurationError(f"unknown noise kind {model.kind!r}", ["noise.kind"])


def noise_ppf(model: NoiseModel, u: ArrayLike) -> ArrayLike:
    """Inverse CDF; maps one uniform to one noise sample."""
    if model.kind == "gaussian":
        arr = np.maximum(np.asarray(u, dtype=float), _U_FLOOR)
        return _unwrap(model.mean + model.std * special.ndtri(arr))
    raise ConfigurationError(f"unknown noise kind {model.kind!r}", ["noise.kind"])


def sample_noise(model: NoiseModel, rng: np.random.Generator) -> float:
    return float(noise_ppf(model, rng.random()))


# ==================== PARAMETER BOX ====================

@dataclass(frozen=True)
class Box:
    """Axis-aligned box lo <= x <= hi, the prior parameter set."""

    lo: np.ndarray = field(repr=False)
    hi: np.ndarray = field(repr=False)

    def __post_init__(self):
        lo = np.array(self.lo, dtype=float).reshape(-1)
        hi = np.array(self.hi, dtype=float).reshape(-1)
        if lo.shape != hi.shape:
            raise ConfigurationError("box bounds must have equal length", ["box.lo", "box.hi"])
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ConfigurationError("box bounds must be finite", ["box.lo", "box.hi"])
        if np.any(lo > hi):
            raise ConfigurationError("box needs lo <= hi componentwise", ["box.lo", "box.hi"])
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return int(self.lo.shape[0])

    def contains(self, x: np.ndarray) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lo) and np.all(x <= self.hi))

    def sup_norm(self) -> float:
        """sup over the box of the Euclidean norm (attained at a corner)."""
        return float(np.sqrt(np.sum(np.maximum(self.lo**2, self.hi**2))))

    def __repr__(self) -> str:
        return f"Box(lo={self.lo.tolist()}, hi={self.hi.tolist()})"


def project_box(x: np.ndarray, box: Box) -> np.ndarray:
    """Euclidean projection onto the box; works row-wise on (..., n) arrays."""
    arr = np.asarray(x, dtype=float)
    if arr.shape[-1:] != (box.dim,):
        raise DomainError(f"expected trailing dimension {box.dim}, got shape {arr.shape}")
    return np.clip(arr, box.lo, box.hi)
