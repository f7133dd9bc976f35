"""DSM evaluation metrics over pairs of height grids.

All error statistics run over the jointly valid cells of the estimate and
the ground truth (the intersection of both validity masks):

* MAE -- mean absolute height difference,
* RMSE -- root mean squared height difference,
* percentage of cells with absolute error strictly below each threshold,
* median absolute error (even counts take the midpoint of the two central
  order statistics),
* completeness -- percentage of *all* grid cells that hold a valid value
  in the estimate, regardless of ground-truth validity.

Grids are assumed pre-aligned; no shift search is performed before scoring.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .raster import HeightGrid, atomic_output

#: Default thresholds (meters) for the percent-below metrics.
DEFAULT_THRESHOLDS = (2.5, 7.5)


@dataclass(frozen=True)
class EvalReport:
    """Metric bundle from one estimate/ground-truth comparison."""

    mae: float
    rmse: float
    pct_below: dict[float, float]
    median_abs: float
    completeness: float
    joint_valid_count: int


@dataclass(frozen=True)
class Mvs3dReport:
    """Reduced metric bundle: RMSE, percent below 1 m, and median error."""

    rmse: float
    pct_below_1m: float
    median_abs: float
    joint_valid_count: int


def evaluate(
    est: HeightGrid,
    gt: HeightGrid,
    thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
) -> EvalReport:
    """Score an estimated DSM against ground truth.

    Raises:
        ValueError: mismatched dimensions or an empty joint-valid set.
    """
    if est.shape != gt.shape:
        raise ValueError(f"estimate {est.shape} and ground truth {gt.shape} differ")
    joint = est.mask & gt.mask
    n = int(joint.sum())
    if n == 0:
        raise ValueError("no jointly valid grid cell to evaluate")
    err = np.abs(est.values[joint] - gt.values[joint])
    pct_below = {
        float(t): 100.0 * float((err < t).sum()) / n for t in thresholds
    }
    return EvalReport(
        mae=float(err.mean()),
        rmse=float(np.sqrt((err * err).mean())),
        pct_below=pct_below,
        median_abs=float(np.median(err)),
        completeness=100.0 * est.valid_count / (est.rows * est.cols),
        joint_valid_count=n,
    )


def mvs3d_report(est: HeightGrid, gt: HeightGrid) -> Mvs3dReport:
    """Benchmark preset: RMSE, percent of errors below 1 m, median error."""
    full = evaluate(est, gt, thresholds=(1.0,))
    return Mvs3dReport(
        rmse=full.rmse,
        pct_below_1m=full.pct_below[1.0],
        median_abs=full.median_abs,
        joint_valid_count=full.joint_valid_count,
    )


def _format_threshold(t: float) -> str:
    return f"{t:g}"


def report_items(report: EvalReport) -> list[tuple[str, float]]:
    """Flatten a report to (key, value) pairs in a fixed order.

    Keys: ``mae``, ``rmse``, one ``lt_<t>`` per threshold, ``median``,
    ``comp``.
    """
    items: list[tuple[str, float]] = [("mae", report.mae), ("rmse", report.rmse)]
    for t in sorted(report.pct_below):
        items.append((f"lt_{_format_threshold(t)}", report.pct_below[t]))
    items.append(("median", report.median_abs))
    items.append(("comp", report.completeness))
    return items


def format_report(report: EvalReport) -> str:
    """``key=value`` text form, one metric per line."""
    return "\n".join(f"{k}={v:.6f}" for k, v in report_items(report))


def write_report_csv(report: EvalReport, path: str | os.PathLike) -> None:
    """Write a report as flat CSV with a ``metric,value`` header row."""
    with atomic_output(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "value"])
        for k, v in report_items(report):
            writer.writerow([k, f"{v:.6f}"])
