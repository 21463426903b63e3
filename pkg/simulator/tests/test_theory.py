import math

import numpy as np
import pytest

from agents.sensing import PaperExampleFamily
from agents.state import AlgorithmConfig
from agents.theory import (
    coding_constant,
    compute_theory_constants,
    density_lower_bound,
    excitation_constant,
    g_lower_bound,
    g_lower_closed_form,
    sigma_constant,
)
from core.exceptions import PreconditionError
from core.graph import NetworkGraph
from core.math_core import laplace_pdf


def _dense_grid_minimum(nu, radius, k_max):
    xs = np.linspace(-radius, radius, int(2 * radius / 0.001) + 1)
    ks = np.unique(np.concatenate([np.arange(1, 3001), np.geomspace(1, k_max, 500)]))
    worst = math.inf
    for k in ks:
        c = nu * math.log(k)
        worst = min(worst, float(np.min(k**nu * (laplace_pdf(xs - c) + laplace_pdf(-xs - c)))))
    return worst


def test_coding_constant_for_unit_basis_cycle():
    assert coding_constant(3, 3) == pytest.approx(1 / 3)
    assert coding_constant(3, 2) == pytest.approx(0.0, abs=1e-15)


def test_excitation_constant_positive_for_example_family():
    value = excitation_constant(PaperExampleFamily(), 3)
    # the weakest window is the first one, dominated by 1 - 2^-k
    assert 0.0 < value <= 3 * 2.0


@pytest.mark.parametrize("nu", [0.0, 0.1, 0.4])
def test_g_lower_grid_matches_dense_minimum(nu):
    radius = math.sqrt(12.0)
    grid = g_lower_bound(nu, radius, k_max_for_inf=100_000)
    assert grid == pytest.approx(_dense_grid_minimum(nu, radius, 100_000), abs=1e-4)
    assert grid == pytest.approx(g_lower_closed_form(nu, radius), abs=1e-4)


def test_g_lower_nu_zero_is_edge_density():
    assert g_lower_bound(0.0, 2.0, k_max_for_inf=1000) == pytest.approx(math.exp(-2.0), rel=1e-12)


def test_density_lower_bound_is_interval_edge(example_system):
    expected = math.exp(-0.5 * 12.0) / math.sqrt(2 * math.pi)
    assert density_lower_bound(example_system, 1.0, math.sqrt(12.0)) == pytest.approx(expected)


def test_sigma_increases_with_alpha(box):
    args = dict(h=3, lam2=3.0, f_lower=0.2, g_lower=0.3, delta_psi_sq=1 / 3, delta_phi_sq=0.5, phi_bar=1.0)
    values = [
        sigma_constant(AlgorithmConfig(alpha=a, beta=70.0, nu=0.1, box=box), **args)
        for a in np.linspace(1.0, 40.0, 40)
    ]
    assert np.all(np.diff(values) > 0.0)


def test_theory_constants_for_example_preset(example_system, c6, algorithm):
    constants = compute_theory_constants(example_system, c6, algorithm, k_max_for_inf=10_000)
    values = constants.to_dict()
    for key in ("h", "delta_phi_sq", "delta_psi_sq", "phi_bar", "psi_bar", "theta_bar",
                "f_lower", "g_lower", "lambda2", "sigma"):
        assert values[key] > 0, key
    assert constants.h == 3
    assert constants.delta_psi_sq == pytest.approx(1 / 3)
    assert constants.lambda2 == pytest.approx(1.0)
    assert constants.phi_bar == 1.0
    assert constants.theta_bar == pytest.approx(math.sqrt(12.0))
    assert constants.rate_condition_met == (2 * constants.sigma >= 1 - algorithm.nu)


def test_theory_constants_need_connected_graph(example_system, algorithm):
    disconnected = NetworkGraph.from_edges(6, [(1, 2), (3, 4), (5, 6)])
    with pytest.raises(PreconditionError):
        compute_theory_constants(example_system, disconnected, algorithm, k_max_for_inf=100)
