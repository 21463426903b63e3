"""
One-bit communication layer.

Dithered sign encoding, the event trigger with growing threshold nu*ln(k),
the Bernoulli erasure channel, reconstruction of received bits and the
compensation functions F_hat and G_hat. Every function is vectorised over a
leading sensor axis so the round engine and the single-sensor API share code.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from core.exceptions import ConfigurationError, DomainError
from core.math_core import NoiseModel, laplace_cdf, noise_cdf

ArrayLike = Union[float, np.ndarray]


def _project(theta_hat: np.ndarray, direction: np.ndarray) -> np.ndarray:
    theta_hat = np.asarray(theta_hat, dtype=float)
    direction = np.asarray(direction, dtype=float)
    if theta_hat.shape[-1] != direction.shape[-1]:
        raise DomainError(f"dimension mismatch: {theta_hat.shape} vs {direction.shape}")
    return (theta_hat * direction).sum(axis=-1)


def _scalar(x: np.ndarray):
    return x.item() if np.ndim(x) == 0 else x


# ==================== ENCODER + TRIGGER ====================

@dataclass(frozen=True)
class DitheredSignal:
    """psi^T theta_hat + omega; one dither feeds both the encoder and the trigger."""

    inner: ArrayLike
    omega: ArrayLike

    @classmethod
    def make(cls, theta_hat: np.ndarray, psi: np.ndarray, omega: ArrayLike) -> "DitheredSignal":
        return cls(_scalar(_project(theta_hat, psi) + np.asarray(omega, dtype=float)), omega)

    @property
    def z(self) -> ArrayLike:
        return _scalar(np.where(np.asarray(self.inner) > 0.0, 1, -1))

    def triggered(self, c_hat: ArrayLike) -> ArrayLike:
        return _scalar(np.abs(np.asarray(self.inner)) > c_hat)


def encode(theta_hat: np.ndarray, psi: np.ndarray, omega: ArrayLike) -> ArrayLike:
    """z = +1 if psi^T theta_hat + omega > 0, else -1 (ties go to -1)."""
    return DitheredSignal.make(theta_hat, psi, omega).z


def trigger_threshold(k: ArrayLike, nu: float) -> ArrayLike:
    """C_hat_k = nu * ln k."""
    k_arr = np.asarray(k, dtype=float)
    if np.any(k_arr < 1):
        raise DomainError("trigger threshold needs k >= 1")
    if nu < 0.0:
        raise DomainError("trigger exponent nu must be nonnegative")
    return _scalar(nu * np.log(k_arr))


def should_trigger(theta_hat: np.ndarray, psi: np.ndarray, omega: ArrayLike, c_hat: float) -> ArrayLike:
    """True iff |psi^T theta_hat + omega| > C_hat."""
    if c_hat < 0.0:
        raise DomainError("trigger threshold must be nonnegative")
    return DitheredSignal.make(theta_hat, psi, omega).triggered(c_hat)


def trigger_probability(x: ArrayLike, c_hat: ArrayLike) -> ArrayLike:
    """P(|x + omega| > c) = G(x - c) + G(-x - c); the expected bits per channel."""
    x = np.asarray(x, dtype=float)
    return laplace_cdf(x - c_hat) + laplace_cdf(-x - c_hat)


# ==================== CHANNEL ====================

@dataclass(frozen=True)
class ChannelModel:
    """Independent Bernoulli erasures on every directed channel."""

    p_true: float

    def __post_init__(self):
        if not 0.0 <= self.p_true < 1.0:
            raise ConfigurationError("loss probability must lie in [0, 1)", ["channel.p_true"])


@dataclass(frozen=True)
class ReceivedPacket:
    """What a receiver sees: gamma and gamma*z. Loss and silence look the same."""

    gamma: int
    payload: int


def erasure(channel: ChannelModel, u: ArrayLike) -> ArrayLike:
    """gamma^d from uniforms: 0 (lost) when u < p_true."""
    return _scalar((np.asarray(u) >= channel.p_true).astype(np.int8))


def transmit(channel: ChannelModel, z: int, triggered: bool, edge_rng: np.random.Generator) -> ReceivedPacket:
    """Resolve one directed channel; the erasure draw is consumed even when silent."""
    gamma_d = int(erasure(channel, edge_rng.random()))
    gamma = gamma_d * int(bool(triggered))
    return ReceivedPacket(gamma=gamma, payload=gamma * int(z))


def reconstruct(gamma: ArrayLike, payload: ArrayLike, p_assumed: float) -> ArrayLike:
    """s_hat = gamma * z / (1 - p): unbiased against erasures in expectation."""
    if not 0.0 <= p_assumed < 1.0:
        raise ConfigurationError("assumed loss probability must lie in [0, 1)", ["algorithm.p_assumed"])
    gamma = np.asarray(gamma)
    payload = np.asarray(payload, dtype=float)
    if np.any((gamma == 0) & (payload != 0)):
        raise DomainError("payload must be 0 when nothing was received")
    return _scalar(payload / (1.0 - p_assumed))


# ==================== COMPENSATION TERMS ====================

def g_hat(theta_hat: np.ndarray, psi: np.ndarray, c_hat: ArrayLike) -> ArrayLike:
    """G_hat = G(x - c) - G(-x - c) with x = psi^T theta_hat; the mean of a triggered sign."""
    if np.any(np.asarray(c_hat) < 0.0):
        raise DomainError("trigger threshold must be nonnegative")
    x = _project(theta_hat, psi)
    return _scalar(np.asarray(laplace_cdf(x - c_hat)) - np.asarray(laplace_cdf(-x - c_hat)))


def f_hat(theta_hat: np.ndarray, phi: np.ndarray, c_threshold: ArrayLike, noise: NoiseModel) -> ArrayLike:
    """F_hat = F(C - phi^T theta_hat): predicted probability of a 1 measurement."""
    x = _project(theta_hat, phi)
    return _scalar(np.asarray(noise_cdf(noise, np.asarray(c_threshold) - x)))
