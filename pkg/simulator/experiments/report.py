"""
Result files: CSV series, slope tables and the theory-constants report.

Every file opens with `# config_sha256=<hex> seed=<seed>`; floats are written
with 17 significant digits so a rerun with the same seed is byte-identical.
"""

import csv
import hashlib
import json
import math
from pathlib import Path
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

import structlog

from agents.theory import TheoryConstants, compute_theory_constants
from core.exceptions import PreconditionError

from .config import Experiment
from .metrics import MetricsSummary, SlopeFit
from .runner import run_monte_carlo

logger = structlog.get_logger(__name__)

LabelledExperiment = Tuple[str, Experiment]


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def header_line(config_hash: str, seed: int) -> str:
    return f"# config_sha256={config_hash} seed={seed}\n"


def write_csv(path: Path, header: str, columns: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """Header comment, then a plain CSV table."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        f.write(header)
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)
    logger.debug("file written", path=str(path))
    return path


def _slope_rows(fits: Iterable[SlopeFit], prefix: str = "") -> List[List[str]]:
    return [
        [f"{prefix}{fit.series}", str(fit.k_min), str(fit.k_max), fmt(fit.slope), fmt(fit.half_width)]
        for fit in fits
    ]


def format_constants(constants: Optional[TheoryConstants], reason: str = "") -> str:
    """Plain key = value report ending with the 2*sigma >= 1 - nu verdict."""
    if constants is None:
        return f"theory constants unavailable: {reason}\n"
    lines = [f"{key} = {fmt(value) if isinstance(value, float) else value}"
             for key, value in constants.to_dict().items() if key != "rate_condition_met"]
    verdict = "holds" if constants.rate_condition_met else "fails (guidance only)"
    lines.append(f"2*sigma = {fmt(2.0 * constants.sigma)} vs 1 - nu = {fmt(1.0 - constants.nu)}: condition {verdict}")
    return "\n".join(lines) + "\n"


def theory_report(exp: Experiment) -> Tuple[Optional[TheoryConstants], str]:
    """Constants for a compiled experiment, or the reason they cannot be computed."""
    try:
        return compute_theory_constants(exp.system, exp.graph, exp.algorithm), ""
    except PreconditionError as e:
        logger.warning("theory constants unavailable", reason=str(e))
        return None, str(e)


def write_series(out_dir: Path, exp: Experiment, summary: MetricsSummary) -> List[Path]:
    """mse.csv, kappa.csv, slopes.csv, constants.txt and optionally mse_per_sensor.csv."""
    header = header_line(exp.config_hash, exp.seed)
    ks = summary.checkpoints
    written = [
        write_csv(
            out_dir / "mse.csv", header, ["k", "mse", "mse_stderr"],
            ([str(k), fmt(summary.mse[c]), fmt(summary.mse_stderr[c])] for c, k in enumerate(ks)),
        ),
        write_csv(
            out_dir / "kappa.csv", header, ["k", "kappa", "bits_sent", "bits_delivered"],
            (
                [str(k), fmt(summary.kappa[c]), fmt(summary.bits_sent_total[c]), fmt(summary.bits_delivered_total[c])]
                for c, k in enumerate(ks)
            ),
        ),
        write_csv(
            out_dir / "slopes.csv", header, ["series", "k_min", "k_max", "slope", "half_width"],
            _slope_rows(summary.slopes.values()),
        ),
    ]
    if exp.per_sensor:
        written.append(write_csv(
            out_dir / "mse_per_sensor.csv", header, ["k", "sensor", "mse"],
            (
                [str(k), str(i + 1), fmt(summary.mse_per_sensor[c, i])]
                for c, k in enumerate(ks) for i in range(summary.m)
            ),
        ))

    constants, reason = theory_report(exp)
    path = out_dir / "constants.txt"
    path.write_text(header + format_constants(constants, reason), encoding="utf-8")
    written.append(path)
    return written


def summary_line(label: str, summary: MetricsSummary) -> str:
    parts = [
        f"[{label}]",
        f"K={summary.checkpoints[-1]}",
        f"R={summary.repetitions}",
        f"mse={summary.mse[-1]:.6g}",
        f"kappa={summary.kappa[-1]:.6g}",
    ]
    for name, fit in summary.slopes.items():
        parts.append(f"{name}_slope={fit.slope:.4f}±{fit.half_width:.4f}")
    if not math.isnan(summary.tau):
        parts.append(f"tau={summary.tau:.3f}")
    return " ".join(parts)


def _combined_hash(series: Sequence[LabelledExperiment]) -> str:
    digest = hashlib.sha256()
    for label, exp in series:
        digest.update(label.encode("utf-8"))
        digest.update(exp.config_hash.encode("utf-8"))
    return digest.hexdigest()


def run_experiment(
    series: Union[Experiment, Sequence[LabelledExperiment]],
    out_dir: Union[str, Path],
    n_jobs: Optional[int] = None,
    echo: Callable[[str], None] = print,
) -> int:
    """
    Run every series and write its files; returns exit status 0.

    A single experiment writes straight into `out_dir`. Several series get
    one subdirectory each plus a top-level slopes.csv and summary.json.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if isinstance(series, Experiment):
        summary = run_monte_carlo(series, n_jobs=n_jobs)
        write_series(out_dir, series, summary)
        echo(summary_line(series.mode, summary))
        logger.info("results written", out_dir=str(out_dir))
        return 0

    slope_rows: List[List[str]] = []
    overview = []
    for label, exp in series:
        summary = run_monte_carlo(exp, n_jobs=n_jobs)
        write_series(out_dir / label, exp, summary)
        slope_rows.extend(_slope_rows(summary.slopes.values(), prefix=f"{label}/"))
        overview.append({
            "label": label,
            "mode": exp.mode,
            "nu": exp.algorithm.nu,
            "p_true": exp.channel.p_true,
            "p_assumed": exp.algorithm.p_assumed,
            "config_sha256": exp.config_hash,
            "k": summary.checkpoints[-1],
            "final_mse": float(summary.mse[-1]),
            "final_kappa": float(summary.kappa[-1]),
            "slopes": {name: [fit.slope, fit.half_width] for name, fit in summary.slopes.items()},
        })
        echo(summary_line(label, summary))

    seed = series[0][1].seed if series else 0
    combined = _combined_hash(series)
    write_csv(
        out_dir / "slopes.csv", header_line(combined, seed),
        ["series", "k_min", "k_max", "slope", "half_width"], slope_rows,
    )
    (out_dir / "summary.json").write_text(
        json.dumps({"config_sha256": combined, "seed": seed, "series": overview}, indent=2) + "\n",
        encoding="utf-8",
    )
    logger.info("results written", out_dir=str(out_dir), series=len(overview))
    return 0
