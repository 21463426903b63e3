import numpy as np
import pytest

from core.exceptions import ConfigurationError
from experiments.config import compile_experiment
from experiments.metrics import comm_bit_rate, decade_medians
from experiments.presets import expand_preset
from experiments.runner import run_monte_carlo, run_single, run_traces


def test_identical_seed_and_run_give_identical_traces(small_experiment):
    a = run_single(small_experiment, 2)
    b = run_single(small_experiment, 2)
    assert a.identical_to(b)
    assert not a.identical_to(run_single(small_experiment, 3))


def test_trace_does_not_depend_on_block_size(small_experiment):
    a = run_single(small_experiment, 0, chunk_steps=4096)
    b = run_single(small_experiment, 0, chunk_steps=7)
    assert a.identical_to(b)


def test_single_round(config_factory):
    exp = compile_experiment(config_factory(horizon=1, checkpoints=[1]))
    trace = run_single(exp, 0)
    assert trace.checkpoints == (1,)
    assert trace.sq_errors.shape == (1, 6)
    assert np.all(trace.bits_sent <= 1)
    assert trace.bits_sent.shape == (1, 12)


def test_zero_horizon_is_rejected(config_factory):
    with pytest.raises(ConfigurationError):
        compile_experiment(config_factory(horizon=0))


def test_nu_zero_triggers_every_channel_every_step(config_factory):
    cfg = config_factory(horizon=300)
    exp = compile_experiment(cfg.model_copy(update={"algorithm": cfg.algorithm.model_copy(update={"nu": 0.0})}))
    trace = run_single(exp, 1)
    ks = np.array(trace.checkpoints)
    np.testing.assert_array_equal(trace.bits_sent, np.broadcast_to(ks[:, None], trace.bits_sent.shape))
    for k in trace.checkpoints:
        assert comm_bit_rate(trace, k) == 1.0


def test_lossless_channel_delivers_every_sent_bit(config_factory):
    cfg = config_factory(horizon=200)
    cfg = cfg.model_copy(update={
        "channel": cfg.channel.model_copy(update={"p_true": 0.0}),
        "algorithm": cfg.algorithm.model_copy(update={"nu": 0.0}),
    })
    trace = run_single(compile_experiment(cfg), 0)
    np.testing.assert_array_equal(trace.bits_sent, trace.bits_delivered)


def test_bit_counters_monotone_and_bounded(small_experiment):
    trace = run_single(small_experiment, 0)
    ks = np.array(trace.checkpoints)
    assert np.all(np.diff(trace.bits_sent, axis=0) >= 0)
    assert np.all(trace.bits_sent <= ks[:, None])
    assert np.all(trace.bits_delivered <= trace.bits_sent)


def test_estimates_stay_in_box_and_first_error_bounded(small_experiment):
    trace = run_single(small_experiment, 0)
    # max squared distance between two points of the box [0,2]x[-2,0]x[0,2]
    assert np.all(trace.sq_errors <= 12.0)
    assert trace.sq_errors[0].mean() <= 12.0


def test_noncooperative_mode_keeps_error_floor(config_factory):
    exp = compile_experiment(config_factory(mode="noncooperative", horizon=500))
    trace = run_single(exp, 0)
    assert np.all(trace.sq_errors >= 0.5)
    assert np.all(trace.bits_sent == 0)


def test_monte_carlo_single_run_equals_trace(config_factory):
    exp = compile_experiment(config_factory(repetitions=1))
    summary = run_monte_carlo(exp, n_jobs=1)
    trace = run_single(exp, 0)
    np.testing.assert_array_equal(summary.mse, trace.mse)
    np.testing.assert_array_equal(summary.mse_stderr, np.zeros_like(summary.mse))


def test_run_order_does_not_change_summary(small_experiment):
    forward = run_monte_carlo(small_experiment, n_jobs=1, run_indices=[0, 1, 2])
    backward = run_monte_carlo(small_experiment, n_jobs=1, run_indices=[2, 0, 1])
    np.testing.assert_array_equal(forward.mse, backward.mse)
    np.testing.assert_array_equal(forward.kappa, backward.kappa)


def test_parallel_matches_sequential(small_experiment):
    sequential = run_traces(small_experiment, n_jobs=1)
    parallel = run_traces(small_experiment, n_jobs=2)
    assert all(a.identical_to(b) for a, b in zip(sequential, parallel))


def test_kappa_stays_in_unit_interval(small_experiment):
    summary = run_monte_carlo(small_experiment, n_jobs=1)
    assert np.all((summary.kappa >= 0.0) & (summary.kappa <= 1.0))
    assert np.all(np.diff(summary.bits_sent_total) >= 0)


@pytest.mark.slow
def test_cooperative_beats_noncooperative_floor(config_factory):
    exp = compile_experiment(config_factory(repetitions=20, horizon=10_000))
    summary = run_monte_carlo(exp)
    assert summary.at(10_000)["mse"] < 0.05
    assert np.all(summary.mse[summary.index_of(1000):] < 0.5)


@pytest.mark.slow
def test_cooperative_mse_decade_medians_strictly_decrease():
    [(_, cfg)] = expand_preset("paper-s5-convergence")
    summary = run_monte_carlo(compile_experiment(cfg.with_overrides(repetitions=20)))
    medians = [m for _, m in decade_medians(summary.checkpoints, summary.mse, k_min=100)]
    assert len(medians) >= 3
    assert all(later < earlier for earlier, later in zip(medians, medians[1:]))


def test_zero_workers_rejected(small_experiment):
    with pytest.raises(ConfigurationError):
        run_traces(small_experiment, [0, 1], n_jobs=0)
