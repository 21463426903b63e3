"""
Estimator state and algorithm parameters.
This is the working memory each sensor carries from one round to the next.
"""

from dataclasses import dataclass, field
from typing import Optional, TypedDict

import numpy as np

from core.exceptions import ConfigurationError, DomainError
from core.math_core import Box


@dataclass(frozen=True)
class AlgorithmConfig:
    """Step coefficients, trigger exponent, assumed loss rate and the box Omega."""

    alpha: float
    beta: float
    nu: float
    box: Box
    p_assumed: float = 0.0

    def __post_init__(self):
        if not self.alpha >= 0.0:
            raise ConfigurationError("alpha must be non-negative", ["algorithm.alpha"])
        if not self.beta > 0.0:
            raise ConfigurationError("beta must be positive", ["algorithm.beta"])
        if not 0.0 <= self.nu < 1.0:
            raise ConfigurationError("nu must lie in [0, 1)", ["algorithm.nu"])
        if not 0.0 <= self.p_assumed < 1.0:
            raise ConfigurationError("p_assumed must lie in [0, 1)", ["algorithm.p_assumed"])

    def local_step(self, k: int) -> float:
        """beta / k"""
        return self.beta / k

    def consensus_step(self, k: int) -> float:
        """alpha / k^(1 - nu)"""
        return self.alpha / k ** (1.0 - self.nu)


@dataclass(frozen=True)
class SensorState:
    """
    Current estimate of one sensor and the step it will apply next.

    `k` starts at 1; an update consumes step k and returns a state at k + 1.
    """

    theta_hat: np.ndarray = field(repr=False)
    k: int = 1

    def __post_init__(self):
        theta_hat = np.array(self.theta_hat, dtype=float).reshape(-1)
        if self.k < 1:
            raise DomainError("step counter starts at 1")
        theta_hat.setflags(write=False)
        object.__setattr__(self, "theta_hat", theta_hat)

    def error(self, theta: np.ndarray) -> np.ndarray:
        """theta_tilde = theta_hat - theta (derived, never stored)."""
        return self.theta_hat - np.asarray(theta, dtype=float)

    def __repr__(self) -> str:
        return f"SensorState(theta_hat={self.theta_hat.tolist()}, k={self.k})"


class NetworkState(TypedDict, total=False):
    """
    State of all sensors inside one simulated run.

    Arrays are indexed by 0-based sensor (rows) or directed channel.
    """

    # ==================== ESTIMATES ====================
    theta_hat: np.ndarray  # (m, n) current estimates
    k: int  # next step to apply

    # ==================== COMMUNICATION COUNTERS ====================
    bits_sent: np.ndarray  # (E,) cumulative triggered transmissions per directed channel
    bits_delivered: np.ndarray  # (E,) cumulative transmissions that survived the channel

    # ==================== BOOKKEEPING ====================
    run_index: int
    mode: str  # "cooperative" or "noncooperative"
    last_checkpoint: Optional[int]
