"""
Round engine and Monte Carlo driver.

One step k of a run is a synchronous round:
  1. every sensor draws its dither, encodes and decides whether to trigger;
  2. every directed channel resolves its erasure (drawn even when silent);
  3. every sensor takes its binary measurement;
  4. every sensor applies the fusion update with this round's neighbor data.
Runs are independent tasks; the reduction over runs is ordered by run index.
"""

import time
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import structlog
from joblib import Parallel, delayed

from agents.estimator import apply_increments
from agents.protocol import DitheredSignal, erasure, f_hat, g_hat, reconstruct, trigger_threshold
from agents.sensing import coding_indices, measure_block, noise_block
from agents.state import NetworkState
from core.config import settings
from core.exceptions import ConfigurationError, PreconditionError
from core.graph import is_connected, total_degree
from core.math_core import laplace_ppf

from .config import Experiment
from .metrics import MetricsSummary, summarize
from .seeding import block_schedule, run_streams

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class RunTrace:
    """Checkpointed errors and cumulative bit counters of one run."""

    run_index: int
    checkpoints: Tuple[int, ...]
    sq_errors: np.ndarray = field(repr=False)  # (C, m) ||theta_hat_{k,i} - theta||^2
    bits_sent: np.ndarray = field(repr=False)  # (C, E) cumulative, per directed channel
    bits_delivered: np.ndarray = field(repr=False)  # (C, E)
    total_degree: int = 0

    @property
    def mse(self) -> np.ndarray:
        """Sensor-averaged squared error at each checkpoint."""
        return self.sq_errors.mean(axis=1)

    @property
    def bits_sent_total(self) -> np.ndarray:
        return self.bits_sent.sum(axis=1).astype(float)

    @property
    def bits_delivered_total(self) -> np.ndarray:
        return self.bits_delivered.sum(axis=1).astype(float)

    def identical_to(self, other: "RunTrace") -> bool:
        return (
            self.run_index == other.run_index
            and self.checkpoints == other.checkpoints
            and np.array_equal(self.sq_errors, other.sq_errors)
            and np.array_equal(self.bits_sent, other.bits_sent)
            and np.array_equal(self.bits_delivered, other.bits_delivered)
        )


def _check_runnable(exp: Experiment) -> None:
    if exp.horizon < 1:
        raise ConfigurationError("horizon must be at least 1", ["experiment.horizon"])
    if exp.cooperative and not is_connected(exp.graph):
        raise PreconditionError("cooperative mode needs a connected graph")


def run_single(exp: Experiment, run_index: int, chunk_steps: Optional[int] = None) -> RunTrace:
    """Simulate one run of K synchronous rounds and record its checkpoints."""
    _check_runnable(exp)
    system, alg, channel = exp.system, exp.algorithm, exp.channel
    m, n = system.m, system.n
    channels = exp.graph.directed_edges()
    senders = np.array([c[0] for c in channels], dtype=np.intp)
    receivers = np.array([c[1] for c in channels], dtype=np.intp)
    weights = np.array([c[2] for c in channels], dtype=float)
    n_channels = len(channels)

    noise_stream, dither_stream, channel_stream = run_streams(exp.seed, run_index, m, n_channels)
    theta = system.theta
    thresholds = system.thresholds
    noise_groups = system.noise_groups()
    basis = np.eye(n)

    state: NetworkState = {
        "theta_hat": np.tile(exp.initial_estimate, (m, 1)),
        "k": 1,
        "bits_sent": np.zeros(n_channels, dtype=np.int64),
        "bits_delivered": np.zeros(n_channels, dtype=np.int64),
        "run_index": run_index,
        "mode": exp.mode,
        "last_checkpoint": None,
    }

    checkpoints = exp.checkpoints
    sq_errors = np.empty((len(checkpoints), m))
    sent_log = np.empty((len(checkpoints), n_channels), dtype=np.int64)
    delivered_log = np.empty((len(checkpoints), n_channels), dtype=np.int64)
    slot = 0

    chunk = int(chunk_steps or settings.chunk_steps)
    for start, length in block_schedule(exp.horizon, chunk):
        ks = np.arange(start, start + length)
        phis = system.family.block(ks)
        phi_theta = (phis * theta).sum(axis=-1)
        s_block = measure_block(phi_theta, noise_block(system, noise_stream.next_block(length)), thresholds)
        omegas = laplace_ppf(dither_stream.next_block(length))
        delivered_block = erasure(channel, channel_stream.next_block(length))
        c_hats = trigger_threshold(ks, alg.nu)
        coords = coding_indices(ks, n)

        for r in range(length):
            k = start + r
            theta_hat = state["theta_hat"]
            phi = phis[r]
            psi = basis[coords[r]]

            innovation = np.empty(m)
            for model, idx in noise_groups.items():
                innovation[idx] = f_hat(theta_hat[idx], phi[idx], thresholds[idx], model)
            innovation -= s_block[r]

            if exp.cooperative:
                c_hat = c_hats[r]
                signal = DitheredSignal.make(theta_hat, psi, omegas[r])
                triggered = signal.triggered(c_hat)
                sent = triggered[senders]
                gamma = delivered_block[r] * sent
                payload = gamma * signal.z[senders]
                s_hat = reconstruct(gamma, payload, alg.p_assumed)
                own_g = g_hat(theta_hat, psi, c_hat)
                consensus = np.bincount(
                    receivers, weights=weights * (s_hat - own_g[receivers]), minlength=m
                )
                state["bits_sent"] += sent
                state["bits_delivered"] += gamma
                state["theta_hat"] = apply_increments(
                    theta_hat, k, phi, innovation, alg, psi=psi, consensus=consensus
                )
            else:
                state["theta_hat"] = apply_increments(theta_hat, k, phi, innovation, alg)

            state["k"] = k + 1
            if slot < len(checkpoints) and k == checkpoints[slot]:
                diff = state["theta_hat"] - theta
                sq_errors[slot] = (diff * diff).sum(axis=1)
                sent_log[slot] = state["bits_sent"]
                delivered_log[slot] = state["bits_delivered"]
                state["last_checkpoint"] = k
                slot += 1

    return RunTrace(
        run_index=run_index,
        checkpoints=tuple(checkpoints),
        sq_errors=sq_errors,
        bits_sent=sent_log,
        bits_delivered=delivered_log,
        total_degree=total_degree(exp.graph),
    )


def run_traces(
    exp: Experiment,
    run_indices: Optional[Iterable[int]] = None,
    n_jobs: Optional[int] = None,
) -> List[RunTrace]:
    """Execute runs in parallel; the result is ordered by run index whatever the input order."""
    indices: Sequence[int] = list(run_indices) if run_indices is not None else list(range(exp.repetitions))
    jobs = settings.n_jobs if n_jobs is None else n_jobs
    if jobs == 0:
        raise ConfigurationError("worker count must be non-zero", ["n_jobs"])
    if len(indices) <= 1 or jobs == 1:
        traces = [run_single(exp, r) for r in indices]
    else:
        traces = Parallel(n_jobs=jobs)(delayed(run_single)(exp, r) for r in indices)
    return sorted(traces, key=lambda t: t.run_index)


def run_monte_carlo(
    exp: Experiment,
    n_jobs: Optional[int] = None,
    run_indices: Optional[Iterable[int]] = None,
) -> MetricsSummary:
    """R independent runs reduced into MSE and bit-rate series plus slope fits."""
    _check_runnable(exp)
    start = time.perf_counter()
    logger.info(
        "monte carlo started",
        mode=exp.mode,
        nu=exp.algorithm.nu,
        repetitions=exp.repetitions,
        horizon=exp.horizon,
        n_jobs=settings.n_jobs if n_jobs is None else n_jobs,
    )
    traces = run_traces(exp, run_indices, n_jobs)
    summary = summarize(
        traces,
        nu=exp.algorithm.nu,
        mse_fit_range=exp.mse_fit_range,
        kappa_fit_range=exp.kappa_fit_range,
    )
    logger.info(
        "monte carlo finished",
        mode=exp.mode,
        nu=exp.algorithm.nu,
        final_mse=float(summary.mse[-1]),
        final_kappa=float(summary.kappa[-1]),
        elapsed_s=round(time.perf_counter() - start, 3),
    )
    return summary
