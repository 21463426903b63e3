"""
Evaluation Pipeline: acceptance checks against the built-in presets

Runs the convergence and nu-sweep presets, checks the MSE floor, the
convergence and bit-rate slopes, the trade-off ordering and the theory
constants, and saves everything to evaluation-results.json.
"""

import argparse
import json
import math
import sys
import time
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent))

from dotenv import load_dotenv

from agents.theory import compute_theory_constants, g_lower_bound
from core.logging_config import initialize_logging
from core.math_core import laplace_pdf
from experiments.config import compile_experiment
from experiments.metrics import MetricsSummary, decade_medians
from experiments.presets import expand_preset
from experiments.runner import run_monte_carlo

load_dotenv()

NOISE_FLOOR = 0.5
MSE_TARGET = 0.05


def _run(preset: str, repetitions: Optional[int], n_jobs: Optional[int], seed: Optional[int]) -> Dict[str, MetricsSummary]:
    results = {}
    for label, cfg in expand_preset(preset, seed=seed):
        if repetitions is not None:
            cfg = cfg.with_overrides(repetitions=repetitions)
        results[label] = run_monte_carlo(compile_experiment(cfg), n_jobs=n_jobs)
    return results


def check_convergence(summaries: Dict[str, MetricsSummary]) -> Dict:
    """Cooperative MSE(10^4) below the target and below the non-cooperative floor."""
    mse = summaries["cooperative"].at(10_000)["mse"]
    return {"mse_at_1e4": mse, "passed": mse < MSE_TARGET and mse < NOISE_FLOOR}


def check_decade_medians(summaries: Dict[str, MetricsSummary]) -> Dict:
    """Median cooperative MSE per decade of checkpoints strictly decreases from k = 100 on."""
    summary = summaries["cooperative"]
    medians = decade_medians(summary.checkpoints, summary.mse, k_min=100)
    values = [m for _, m in medians]
    return {
        "decade_medians": {str(k): m for k, m in medians},
        "passed": len(values) >= 2 and all(b < a for a, b in zip(values, values[1:])),
    }


def check_mse_slope(sweep: Dict[str, MetricsSummary]) -> Dict:
    fit = sweep["nu_0.1"].slopes.get("mse")
    if fit is None:
        return {"passed": False, "reason": "fit unavailable"}
    return {"slope": fit.slope, "half_width": fit.half_width, "passed": -1.2 <= fit.slope <= -0.6}


def check_kappa_slopes(sweep: Dict[str, MetricsSummary]) -> Dict:
    details = {"nu_0_kappa_is_one": bool(np.all(sweep["nu_0"].kappa == 1.0))}
    passed = details["nu_0_kappa_is_one"]
    for nu in (0.2, 0.4, 0.6):
        fit = sweep[f"nu_{nu:g}"].slopes.get("kappa")
        ok = fit is not None and abs(fit.slope + nu) <= 0.1
        details[f"nu_{nu:g}"] = {"slope": fit.slope if fit else None, "passed": ok}
        passed = passed and ok
    details["passed"] = passed
    return details


def check_tradeoff(sweep: Dict[str, MetricsSummary], k: int = 10_000) -> Dict:
    labels = ["nu_0", "nu_0.1", "nu_0.2", "nu_0.4", "nu_0.6"]
    points = [sweep[label].at(k) for label in labels]
    kappa_decreasing = all(b["kappa"] < a["kappa"] for a, b in zip(points, points[1:]))
    mse_nondecreasing = all(
        b["mse"] >= a["mse"] - math.hypot(a["mse_stderr"], b["mse_stderr"])
        for a, b in zip(points, points[1:])
    )
    return {
        "kappa": [p["kappa"] for p in points],
        "mse": [p["mse"] for p in points],
        "passed": kappa_decreasing and mse_nondecreasing,
    }


def check_theory_constants() -> Dict:
    [(_, cfg)] = expand_preset("paper-s5-convergence")
    exp = compile_experiment(cfg)
    constants = compute_theory_constants(exp.system, exp.graph, exp.algorithm)
    values = constants.to_dict()
    positive = all(values[key] > 0 for key in ("delta_phi_sq", "delta_psi_sq", "phi_bar", "theta_bar",
                                              "f_lower", "g_lower", "lambda2", "sigma"))
    radius = constants.psi_bar * constants.theta_bar
    xs = np.linspace(-radius, radius, 20_001)
    ks = np.unique(np.round(np.geomspace(1, 1_000_000, 5000)))
    dense = min(
        float(np.min(k**exp.algorithm.nu * (laplace_pdf(xs - exp.algorithm.nu * math.log(k))
                                            + laplace_pdf(-xs - exp.algorithm.nu * math.log(k)))))
        for k in ks
    )
    grid = g_lower_bound(exp.algorithm.nu, radius)
    return {
        "constants": values,
        "g_lower_dense": dense,
        "passed": positive and abs(grid - dense) < 1e-4,
    }


def run_evaluation(repetitions: Optional[int] = None, n_jobs: Optional[int] = None, seed: Optional[int] = None) -> Dict:
    """
    Run the presets and evaluate every acceptance check.
    """

    print("\n" + "=" * 60)
    print("EVALUATING EVENT-TRIGGERED ESTIMATION SIMULATOR")
    print("=" * 60 + "\n")

    start = time.time()
    convergence = _run("paper-s5-convergence", repetitions, n_jobs, seed)
    sweep = _run("paper-s5-nu-sweep", repetitions, n_jobs, seed)

    checks: List[tuple] = [
        ("convergence_floor", lambda: check_convergence(convergence)),
        ("mse_decades_decreasing", lambda: check_decade_medians(convergence)),
        ("mse_slope_nu_0.1", lambda: check_mse_slope(sweep)),
        ("kappa_slopes", lambda: check_kappa_slopes(sweep)),
        ("tradeoff_ordering", lambda: check_tradeoff(sweep)),
        ("theory_constants", check_theory_constants),
    ]

    results = {"total": len(checks), "passed": 0, "details": {}}
    for name, check in checks:
        outcome = _evaluate(check)
        results["details"][name] = outcome
        if outcome["passed"]:
            results["passed"] += 1
        status = "✅ PASS" if outcome["passed"] else "❌ FAIL"
        print(f"  {status}  {name}")

    results["elapsed_s"] = time.time() - start

    print("\n" + "=" * 60)
    print("EVALUATION RESULTS")
    print("=" * 60)
    print(f"✅ Passed: {results['passed']}/{results['total']}")
    print(f"⏱️  Elapsed: {results['elapsed_s']:.0f}s")
    print("=" * 60 + "\n")

    return results


def _evaluate(check: Callable[[], Dict]) -> Dict:
    try:
        return check()
    except Exception as e:
        return {"passed": False, "error": str(e)}


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Acceptance checks for the presets")
    parser.add_argument("--repetitions", type=int, default=None, help="override R (default: preset value)")
    parser.add_argument("--jobs", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    args = parser.parse_args()

    initialize_logging()
    results = run_evaluation(args.repetitions, args.jobs, args.seed)

    # Save results
    output_file = Path(__file__).parent.parent.parent / "evaluation-results.json"
    with open(output_file, "w") as f:
        json.dump(results, f, indent=2, default=float)

    print(f"📄 Results saved to: {output_file}")
