import math

import numpy as np
import pytest

from agents.protocol import (
    ChannelModel,
    DitheredSignal,
    encode,
    erasure,
    f_hat,
    g_hat,
    reconstruct,
    should_trigger,
    transmit,
    trigger_probability,
    trigger_threshold,
)
from core.exceptions import ConfigurationError, DomainError
from core.math_core import NoiseModel, laplace_cdf, laplace_ppf

E1 = np.array([1.0, 0.0, 0.0])
TRIALS = 1_000_000


def _dithers(seed: int, size: int = TRIALS) -> np.ndarray:
    return laplace_ppf(np.random.default_rng(seed).random(size))


# ==================== ENCODER ====================

@pytest.mark.parametrize("omega, expected", [(0.3, 1), (0.0, -1), (-0.3, -1)])
def test_encode_sign_and_tie(omega, expected):
    assert encode(np.zeros(3), E1, omega) == expected


def test_encode_probability_matches_laplace_cdf():
    x = 0.7
    z = encode(np.array([x, 0.0, 0.0]), E1, _dithers(1))
    assert abs(np.mean(z == 1) - (1.0 - laplace_cdf(-x))) < 0.003


def test_one_dither_feeds_encoder_and_trigger():
    signal = DitheredSignal.make(np.array([0.2, 5.0, 5.0]), E1, -1.5)
    assert signal.inner == pytest.approx(-1.3)
    assert signal.z == -1
    assert signal.triggered(1.0) and not signal.triggered(1.5)


# ==================== TRIGGER ====================

@pytest.mark.parametrize(
    "k, nu, expected",
    [(1, 0.4, 0.0), (math.e, 0.4, 0.4), (100, 0.1, 0.1 * math.log(100))],
)
def test_trigger_threshold_values(k, nu, expected):
    assert trigger_threshold(k, nu) == pytest.approx(expected)


def test_trigger_threshold_rejects_bad_input():
    with pytest.raises(DomainError):
        trigger_threshold(0, 0.1)
    with pytest.raises(DomainError):
        trigger_threshold(5, -0.1)


def test_zero_threshold_always_triggers():
    fired = should_trigger(np.zeros(3), E1, _dithers(2, 100_000), 0.0)
    assert fired.mean() == 1.0


def test_trigger_rate_at_zero_estimate():
    fired = should_trigger(np.zeros(3), E1, _dithers(3), 2.0)
    assert abs(fired.mean() - math.exp(-2.0)) < 0.003


@pytest.mark.parametrize("x, c", [(0.0, 0.5), (0.5, 1.0), (-1.0, 0.3), (2.0, 2.0), (1.5, 0.0)])
def test_trigger_rate_matches_two_tail_formula(x, c):
    fired = should_trigger(np.array([x, 0.0, 0.0]), E1, _dithers(4), c)
    p = trigger_probability(x, c)
    stderr = math.sqrt(p * (1 - p) / TRIALS)
    assert abs(fired.mean() - p) <= max(3 * stderr, 1e-9)


def test_should_trigger_rejects_negative_threshold():
    with pytest.raises(DomainError):
        should_trigger(np.zeros(3), E1, 0.1, -1.0)


# ==================== CHANNEL ====================

def test_transmit_silent_sender_sends_nothing():
    packet = transmit(ChannelModel(0.0), 1, False, np.random.default_rng(0))
    assert (packet.gamma, packet.payload) == (0, 0)


def test_transmit_lossless_passes_sign():
    packet = transmit(ChannelModel(0.0), -1, True, np.random.default_rng(0))
    assert (packet.gamma, packet.payload) == (1, -1)


def test_transmit_consumes_draw_even_when_silent():
    a, b = np.random.default_rng(4), np.random.default_rng(4)
    transmit(ChannelModel(0.1), 1, False, a)
    b.random()
    assert a.random() == b.random()


def test_loss_frequency_at_p_point_one():
    gamma = erasure(ChannelModel(0.1), np.random.default_rng(6).random(100_000))
    assert abs((1 - gamma.mean()) - 0.1) < 0.003


@pytest.mark.parametrize("p", [-0.1, 1.0, 1.5])
def test_channel_rejects_bad_probability(p):
    with pytest.raises(ConfigurationError):
        ChannelModel(p)


# ==================== RECONSTRUCTION ====================

@pytest.mark.parametrize(
    "gamma, payload, p, expected",
    [(0, 0, 0.1, 0.0), (1, 1, 0.1, 1 / 0.9), (1, -1, 0.0, -1.0)],
)
def test_reconstruct_values(gamma, payload, p, expected):
    assert reconstruct(gamma, payload, p) == pytest.approx(expected)


def test_reconstruct_rejects_payload_without_packet():
    with pytest.raises(DomainError):
        reconstruct(0, 1, 0.1)
    with pytest.raises(ConfigurationError):
        reconstruct(1, 1, 1.0)


@pytest.mark.parametrize("p", [0.0, 0.1, 0.5])
def test_reconstruction_is_unbiased(p):
    rng = np.random.default_rng(7)
    theta_hat = np.array([0.4, -1.0, 1.0])
    c_hat = 0.3
    signal = DitheredSignal.make(theta_hat, E1, laplace_ppf(rng.random(TRIALS)))
    gamma = erasure(ChannelModel(p), rng.random(TRIALS)) * signal.triggered(c_hat)
    s_hat = reconstruct(gamma, gamma * signal.z, p)
    stderr = s_hat.std(ddof=1) / math.sqrt(TRIALS)
    assert abs(s_hat.mean() - g_hat(theta_hat, E1, c_hat)) < 4 * stderr


# ==================== COMPENSATION ====================

def test_g_hat_values():
    assert g_hat(np.zeros(3), E1, 0.7) == 0.0
    x = 0.8
    assert g_hat(np.array([x, 0, 0]), E1, 0.0) == pytest.approx(2 * laplace_cdf(x) - 1)
    expected = 0.5 * math.exp(-0.5) - 0.5 * math.exp(-1.5)
    assert g_hat(np.array([0.5, 0, 0]), E1, 1.0) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.19170, abs=1e-5)


def test_f_hat_values():
    gauss = NoiseModel.gaussian()
    assert f_hat(np.zeros(3), E1, 0.0, gauss) == pytest.approx(0.5)
    assert f_hat(np.array([0.3, 0, 0]), E1, 0.3, gauss) == pytest.approx(0.5)
    assert f_hat(np.array([1.0, 5, 5]), E1, 0.0, gauss) == pytest.approx(0.15866, abs=1e-5)


def test_compensation_vectorised_over_sensors():
    theta_hat = np.array([[0.5, 0.0, 0.0], [0.0, 0.0, 0.0]])
    values = g_hat(theta_hat, E1, 1.0)
    assert values.shape == (2,)
    assert values[1] == 0.0


def test_dimension_mismatch_is_rejected():
    with pytest.raises(DomainError):
        g_hat(np.zeros(2), E1, 0.0)
