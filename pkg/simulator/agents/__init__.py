"""Sensor-side algorithm: sensing, one-bit protocol, fusion update and theory constants."""

from .state import AlgorithmConfig, NetworkState, SensorState
from .sensing import PaperExampleFamily, SensorModel, TrueSystem, measure
from .protocol import ChannelModel, encode, reconstruct, should_trigger, transmit
from .estimator import fusion_update, noncooperative_update
from .theory import TheoryConstants, compute_theory_constants

__all__ = [
    "AlgorithmConfig",
    "NetworkState",
    "SensorState",
    "PaperExampleFamily",
    "SensorModel",
    "TrueSystem",
    "measure",
    "ChannelModel",
    "encode",
    "reconstruct",
    "should_trigger",
    "transmit",
    "fusion_update",
    "noncooperative_update",
    "TheoryConstants",
    "compute_theory_constants",
]
