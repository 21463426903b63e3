"""
Monte Carlo metrics: mean squared error, global average communication
bit-rate kappa(k) and log-log slope fits.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Protocol, Sequence, Tuple

import numpy as np
import structlog
from scipy import stats

from core.exceptions import CheckpointError, FitError

logger = structlog.get_logger(__name__)

MIN_FIT_POINTS = 5


class BitAggregate(Protocol):
    """Anything exposing checkpointed sent-bit totals (a trace or a summary)."""

    checkpoints: Tuple[int, ...]
    total_degree: int

    @property
    def bits_sent_total(self) -> np.ndarray: ...


@dataclass(frozen=True)
class SlopeFit:
    series: str
    k_min: int
    k_max: int
    slope: float
    half_width: float
    n_points: int


@dataclass(frozen=True)
class MetricsSummary:
    """Series averaged over runs (and sensors for the MSE)."""

    checkpoints: Tuple[int, ...]
    repetitions: int
    m: int
    total_degree: int
    nu: float
    mse: np.ndarray = field(repr=False)
    mse_stderr: np.ndarray = field(repr=False)
    mse_per_sensor: np.ndarray = field(repr=False)  # (C, m)
    kappa: np.ndarray = field(repr=False)
    bits_sent_total: np.ndarray = field(repr=False)  # per-run mean over all directed channels
    bits_delivered_total: np.ndarray = field(repr=False)
    slopes: Dict[str, SlopeFit] = field(default_factory=dict)
    tau: float = math.nan

    def index_of(self, k: int) -> int:
        return _checkpoint_index(self.checkpoints, k)

    def at(self, k: int) -> Dict[str, float]:
        idx = self.index_of(k)
        return {
            "mse": float(self.mse[idx]),
            "mse_stderr": float(self.mse_stderr[idx]),
            "kappa": float(self.kappa[idx]),
        }


def _checkpoint_index(checkpoints: Sequence[int], k: int) -> int:
    try:
        return list(checkpoints).index(int(k))
    except ValueError:
        raise CheckpointError(f"step {k} was not recorded as a checkpoint") from None


def comm_bit_rate(aggregate: BitAggregate, k: int) -> float:
    """kappa(k) = bits sent up to k / (k * sum_i d_i); counted at the sender."""
    idx = _checkpoint_index(aggregate.checkpoints, k)
    if aggregate.total_degree == 0:
        return 0.0
    return float(aggregate.bits_sent_total[idx]) / (int(k) * aggregate.total_degree)


def fit_loglog_slope(series: Sequence[Tuple[float, float]], k_min: float, k_max: float) -> Tuple[float, float]:
    """OLS slope of ln(value) on ln(k) over [k_min, k_max] and its 95% half-width."""
    pts = np.asarray([(k, v) for k, v in series if k_min <= k <= k_max], dtype=float).reshape(-1, 2)
    if pts.shape[0] < MIN_FIT_POINTS:
        raise FitError(f"need at least {MIN_FIT_POINTS} points in [{k_min}, {k_max}], got {pts.shape[0]}")
    if np.any(pts[:, 1] <= 0.0) or np.any(pts[:, 0] <= 0.0):
        raise FitError("log-log fit needs positive steps and values")
    x, y = np.log(pts[:, 0]), np.log(pts[:, 1])
    if np.ptp(y) == 0.0:
        return 0.0, 0.0
    result = stats.linregress(x, y)
    half_width = float(stats.t.ppf(0.975, pts.shape[0] - 2) * result.stderr)
    return float(result.slope), half_width


def fit_log_factor(ks: Sequence[float], mse: Sequence[float], nu: float, k_min: float, k_max: float) -> float:
    """
    tau in MSE ~ (ln k)^(1+tau) / k^(1-nu), from the slope of ln(MSE*k^(1-nu)) on ln ln k.

    A nuisance estimate only; NaN when the window is too short.
    """
    ks = np.asarray(ks, dtype=float)
    mse = np.asarray(mse, dtype=float)
    mask = (ks >= max(k_min, 3.0)) & (ks <= k_max) & (mse > 0.0)
    if mask.sum() < MIN_FIT_POINTS:
        return math.nan
    x = np.log(np.log(ks[mask]))
    y = np.log(mse[mask]) + (1.0 - nu) * np.log(ks[mask])
    return float(stats.linregress(x, y).slope - 1.0)


def decade_medians(checkpoints: Sequence[int], values: Sequence[float], k_min: int = 1) -> List[Tuple[int, float]]:
    """(10^d, median of values at checkpoints in [10^d, 10^(d+1))) for every decade from k_min on."""
    groups: Dict[int, List[float]] = {}
    for k, v in zip(checkpoints, values):
        if k >= k_min:
            groups.setdefault(len(str(int(k))) - 1, []).append(float(v))
    return [(10**d, float(np.median(groups[d]))) for d in sorted(groups)]


def _try_fit(name: str, ks: Sequence[int], values: np.ndarray, k_range: Tuple[int, int]) -> Optional[SlopeFit]:
    k_min, k_max = k_range
    k_max = min(k_max, ks[-1])
    try:
        slope, half_width = fit_loglog_slope(list(zip(ks, values)), k_min, k_max)
    except FitError as e:
        logger.warning("slope fit skipped", series=name, k_min=k_min, k_max=k_max, reason=str(e))
        return None
    n_points = sum(1 for k in ks if k_min <= k <= k_max)
    return SlopeFit(name, int(k_min), int(k_max), slope, half_width, n_points)


def summarize(
    traces: Sequence["RunTrace"],  # noqa: F821 - runner imports this module
    nu: float,
    mse_fit_range: Tuple[int, int],
    kappa_fit_range: Tuple[int, int],
) -> MetricsSummary:
    """Reduce traces (in run-index order) into the averaged series."""
    if not traces:
        raise FitError("no runs to summarize")
    ordered = sorted(traces, key=lambda t: t.run_index)
    checkpoints = ordered[0].checkpoints
    sq = np.stack([t.sq_errors for t in ordered])  # (R, C, m)
    per_run = sq.mean(axis=2)  # (R, C)
    repetitions = per_run.shape[0]
    mse = per_run.mean(axis=0)
    if repetitions > 1:
        mse_stderr = per_run.std(axis=0, ddof=1) / math.sqrt(repetitions)
    else:
        mse_stderr = np.zeros_like(mse)
    sent = np.stack([t.bits_sent_total for t in ordered]).mean(axis=0)
    delivered = np.stack([t.bits_delivered_total for t in ordered]).mean(axis=0)
    degree = ordered[0].total_degree
    ks = np.asarray(checkpoints, dtype=float)
    kappa = sent / (ks * degree) if degree else np.zeros_like(sent)

    slopes = {}
    for name, values, k_range in (("mse", mse, mse_fit_range), ("kappa", kappa, kappa_fit_range)):
        fit = _try_fit(name, checkpoints, values, k_range)
        if fit is not None:
            slopes[name] = fit

    return MetricsSummary(
        checkpoints=tuple(checkpoints),
        repetitions=repetitions,
        m=sq.shape[2],
        total_degree=degree,
        nu=nu,
        mse=mse,
        mse_stderr=mse_stderr,
        mse_per_sensor=sq.mean(axis=0),
        kappa=kappa,
        bits_sent_total=sent,
        bits_delivered_total=delivered,
        slopes=slopes,
        tau=fit_log_factor(ks, mse, nu, *mse_fit_range),
    )
