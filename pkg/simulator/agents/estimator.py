"""
Fusion estimation.

The update combines a local stochastic-approximation innovation built from
the sensor's own binary measurement with a consensus correction built from
reconstructed neighbor bits, then projects back onto the box.
"""

from typing import Optional, Sequence, Tuple

import numpy as np

from core.exceptions import DomainError
from core.math_core import NoiseModel, project_box

from .protocol import f_hat, g_hat
from .state import AlgorithmConfig, SensorState


def apply_increments(
    theta_hat: np.ndarray,
    k: int,
    phi: np.ndarray,
    innovation: np.ndarray,
    cfg: AlgorithmConfig,
    psi: Optional[np.ndarray] = None,
    consensus: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Pi_Omega{theta_hat + (beta/k) phi (F_hat - s) + (alpha/k^(1-nu)) psi * consensus}.

    Works on one sensor (n,) or on the whole network (m, n); `innovation` and
    `consensus` carry one scalar per sensor. Without `consensus` the update
    is the non-cooperative one.
    """
    if k < 1:
        raise DomainError("steps start at k = 1")
    theta_hat = np.asarray(theta_hat, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if phi.shape != theta_hat.shape:
        raise DomainError(f"regressor shape {phi.shape} does not match estimate shape {theta_hat.shape}")
    innovation = np.asarray(innovation, dtype=float)[..., None]
    updated = theta_hat + cfg.local_step(k) * phi * innovation
    if consensus is not None:
        psi = np.asarray(psi, dtype=float)
        if psi.shape[-1] != theta_hat.shape[-1]:
            raise DomainError(f"coding vector length {psi.shape[-1]} does not match dimension {theta_hat.shape[-1]}")
        updated = updated + cfg.consensus_step(k) * np.asarray(consensus, dtype=float)[..., None] * psi
    return project_box(updated, cfg.box)


def fusion_update(
    state: SensorState,
    s: int,
    neighbor_recons: Sequence[Tuple[float, float]],
    phi: np.ndarray,
    psi: np.ndarray,
    cfg: AlgorithmConfig,
    noise: NoiseModel,
    c_threshold: float,
    c_hat: float,
) -> SensorState:
    """
    One cooperative step for a single sensor.

    `neighbor_recons` holds (a_ij, s_hat_ij) pairs. G_hat is evaluated at the
    receiver's own estimate.
    """
    theta_hat = state.theta_hat
    innovation = f_hat(theta_hat, phi, c_threshold, noise) - s
    own_g = g_hat(theta_hat, psi, c_hat)
    consensus = 0.0
    for a_ij, s_hat in neighbor_recons:
        consensus += a_ij * (s_hat - own_g)
    new_theta = apply_increments(theta_hat, state.k, phi, innovation, cfg, psi=psi, consensus=consensus)
    return SensorState(new_theta, state.k + 1)


def noncooperative_update(
    state: SensorState,
    s: int,
    phi: np.ndarray,
    cfg: AlgorithmConfig,
    noise: NoiseModel,
    c_threshold: float,
) -> SensorState:
    """The same step with the consensus term removed."""
    innovation = f_hat(state.theta_hat, phi, c_threshold, noise) - s
    new_theta = apply_increments(state.theta_hat, state.k, phi, innovation, cfg)
    return SensorState(new_theta, state.k + 1)


def update_bound(k: int, cfg: AlgorithmConfig, phi_bar: float, psi_bar: float, weight_sum: float) -> float:
    """
    Upper bound on ||theta_hat_k - theta_hat_{k-1}|| before projection.

    |F_hat - s| <= 1 and |s_hat - G_hat| <= 1/(1-p) + 1.
    """
    return cfg.local_step(k) * phi_bar + cfg.consensus_step(k) * psi_bar * weight_sum * (
        1.0 / (1.0 - cfg.p_assumed) + 1.0
    )
