"""
Constants entering the almost-sure convergence rate.

sigma = alpha*beta*h*lambda2*f*g*dpsi^2*dphi^2 / (2*beta*phi_bar^2*f + alpha*g*h*lambda2*dpsi^2)
and the rate O(sqrt((ln k)^(1+tau) / k^(1-nu))) holds when 2*sigma >= 1 - nu.
The report is guidance only: a failed condition is logged, never fatal.
"""

import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

import numpy as np
import structlog

from core.config import settings
from core.exceptions import PreconditionError
from core.graph import NetworkGraph, lambda2
from core.math_core import laplace_pdf, noise_pdf

from .protocol import trigger_threshold
from .sensing import RegressorFamily, TrueSystem, coding_vector
from .state import AlgorithmConfig

logger = structlog.get_logger(__name__)

# Steps scanned when searching the worst excitation window
EXCITATION_SCAN = 256


@dataclass(frozen=True)
class TheoryConstants:
    h: int
    delta_phi_sq: float
    delta_psi_sq: float
    phi_bar: float
    psi_bar: float
    theta_bar: float
    f_lower: float
    g_lower: float
    lambda2: float
    sigma: float
    nu: float
    rate_condition_met: bool

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def coding_constant(n: int, h: int) -> float:
    """delta_psi^2: min eigenvalue of (1/h) sum of psi psi^T over any window of length h."""
    worst = math.inf
    for start in range(1, n + 1):
        gram = sum(np.outer(coding_vector(k, n), coding_vector(k, n)) for k in range(start, start + h))
        worst = min(worst, float(np.linalg.eigvalsh(gram / h)[0]))
    return worst


def excitation_constant(family: RegressorFamily, h: int, scan: int = EXCITATION_SCAN) -> float:
    """delta_phi^2: min over scanned k of lambda_min(sum_i sum_{l=k}^{k+h-1} phi phi^T)."""
    phis = family.block(np.arange(1, scan + h))
    per_step = np.einsum("kmi,kmj->kij", phis, phis)
    cumulative = np.concatenate([np.zeros((1,) + per_step.shape[1:]), np.cumsum(per_step, axis=0)])
    windows = cumulative[h:] - cumulative[:-h]
    return float(np.min(np.linalg.eigvalsh(windows)[:, 0]))


def density_lower_bound(system: TrueSystem, phi_bar: float, theta_bar: float) -> float:
    """
    f_lower = min_i min_{|C_i - x| <= phi_bar*theta_bar} f_i(x).

    Gaussian densities are unimodal, so the minimum sits at an interval edge.
    """
    radius = phi_bar * theta_bar
    values = []
    for sensor in system.sensors:
        c = sensor.threshold
        values.append(min(noise_pdf(sensor.noise, c - radius), noise_pdf(sensor.noise, c + radius)))
    return float(min(values))


def _trigger_density(x: np.ndarray, k: np.ndarray, nu: float) -> np.ndarray:
    """k^nu * (g(x - C_k) + g(-x - C_k)) on the outer grid of k and x."""
    c = np.asarray(trigger_threshold(k, nu))[:, None]
    return np.power(k, nu)[:, None] * (laplace_pdf(x[None, :] - c) + laplace_pdf(-x[None, :] - c))


def g_lower_bound(
    nu: float,
    radius: float,
    k_max_for_inf: Optional[int] = None,
    grid_step: Optional[float] = None,
) -> float:
    """
    Grid approximation of inf_k min_{|x| <= radius} k^nu * g_k(x).

    k runs over every integer up to 1000 plus a geometric grid up to
    k_max_for_inf; k^nu g_k(x) tends to a cosh-type limit so the tail adds
    nothing new.
    """
    k_max = int(k_max_for_inf or settings.k_max_for_inf)
    step = float(grid_step or settings.g_grid_step)
    num = int(math.ceil(2.0 * radius / step)) + 1
    xs = np.linspace(-radius, radius, num)
    ks = np.unique(
        np.concatenate([np.arange(1, min(k_max, 1000) + 1), np.round(np.geomspace(1, k_max, 2000))])
    ).astype(float)
    ks = ks[ks <= k_max]
    worst = math.inf
    for chunk in np.array_split(ks, max(1, len(ks) // 256)):
        worst = min(worst, float(np.min(_trigger_density(xs, chunk, nu))))
    return worst


def g_lower_closed_form(nu: float, radius: float) -> float:
    """
    Exact value of the infimum.

    For |x| <= C_k the scaled density equals cosh(x) >= 1; beyond C_k it is
    e^{-|x|} e^{C_k} cosh(C_k), smallest at k = 1 and |x| = radius.
    """
    return min(1.0, math.exp(-radius))


def sigma_constant(
    cfg: AlgorithmConfig,
    h: int,
    lam2: float,
    f_lower: float,
    g_lower: float,
    delta_psi_sq: float,
    delta_phi_sq: float,
    phi_bar: float,
) -> float:
    numerator = cfg.alpha * cfg.beta * h * lam2 * f_lower * g_lower * delta_psi_sq * delta_phi_sq
    denominator = 2.0 * cfg.beta * phi_bar**2 * f_lower + cfg.alpha * g_lower * h * lam2 * delta_psi_sq
    return numerator / denominator


def compute_theory_constants(
    system: TrueSystem,
    graph: NetworkGraph,
    cfg: AlgorithmConfig,
    k_max_for_inf: Optional[int] = None,
) -> TheoryConstants:
    """Evaluate every bound for the configured system and report 2*sigma >= 1 - nu."""
    n = system.n
    h = n  # one full cycle of the coding vectors
    phi_bar = system.family.bound()
    psi_bar = 1.0
    theta_bar = cfg.box.sup_norm()
    lam2 = lambda2(graph)
    delta_psi_sq = coding_constant(n, h)
    delta_phi_sq = excitation_constant(system.family, h)
    f_lower = density_lower_bound(system, phi_bar, theta_bar)
    g_lower = g_lower_bound(cfg.nu, psi_bar * theta_bar, k_max_for_inf)

    bounds = {
        "phi_bar": phi_bar,
        "theta_bar": theta_bar,
        "delta_psi_sq": delta_psi_sq,
        "delta_phi_sq": delta_phi_sq,
        "f_lower": f_lower,
        "g_lower": g_lower,
    }
    bad = [name for name, value in bounds.items() if not value > 0.0]
    if bad:
        raise PreconditionError(f"non-positive theory bounds: {', '.join(bad)}")

    sigma = sigma_constant(cfg, h, lam2, f_lower, g_lower, delta_psi_sq, delta_phi_sq, phi_bar)
    met = 2.0 * sigma >= 1.0 - cfg.nu
    if not met:
        logger.warning("rate condition not met", sigma=sigma, two_sigma=2.0 * sigma, one_minus_nu=1.0 - cfg.nu)

    return TheoryConstants(
        h=h,
        delta_phi_sq=delta_phi_sq,
        delta_psi_sq=delta_psi_sq,
        phi_bar=phi_bar,
        psi_bar=psi_bar,
        theta_bar=theta_bar,
        f_lower=f_lower,
        g_lower=g_lower,
        lambda2=lam2,
        sigma=sigma,
        nu=cfg.nu,
        rate_condition_met=met,
    )
