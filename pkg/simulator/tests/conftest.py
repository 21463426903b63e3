import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings as hypothesis_settings

from agents.sensing import PaperExampleFamily, TrueSystem
from agents.state import AlgorithmConfig
from core.graph import NetworkGraph
from core.math_core import Box
from experiments.config import ExperimentConfig, compile_experiment, parse_config

hypothesis_settings.register_profile(
    "default",
    max_examples=100,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
hypothesis_settings.register_profile(
    "ci",
    max_examples=300,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
    print_blob=True,
)
hypothesis_settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))

THETA = np.array([1.0, -1.0, 1.0])
THETA0 = np.array([0.5, -0.5, 0.5])


@pytest.fixture
def box() -> Box:
    return Box(np.array([0.0, -2.0, 0.0]), np.array([2.0, 0.0, 2.0]))


@pytest.fixture
def example_system(box) -> TrueSystem:
    return TrueSystem.build(THETA, box, PaperExampleFamily())


@pytest.fixture
def c6() -> NetworkGraph:
    return NetworkGraph.cycle(6)


@pytest.fixture
def algorithm(box) -> AlgorithmConfig:
    return AlgorithmConfig(alpha=20.0, beta=70.0, nu=0.1, box=box, p_assumed=0.1)


def small_config(**experiment) -> ExperimentConfig:
    """Default six-sensor example shrunk to a few short runs."""
    section = {"repetitions": 3, "horizon": 200, "seed": 11, "mse_fit_range": [10, 200], "kappa_fit_range": [10, 200]}
    section.update(experiment)
    return parse_config({"experiment": section})


@pytest.fixture
def small_experiment():
    return compile_experiment(small_config())


@pytest.fixture
def config_factory():
    return small_config
