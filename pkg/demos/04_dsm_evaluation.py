#!/usr/bin/env python3
"""Scoring an estimated DSM against ground truth.

Builds a ground-truth terrain and a degraded estimate (noise plus a hole
of invalid cells), then walks through the full metric bundle and the
reduced RMSE/median benchmark preset.
"""

import numpy as np

from terraslope import (
    HeightGrid,
    TerrainSpec,
    evaluate,
    format_report,
    generate_terrain,
    mvs3d_report,
)

gt = generate_terrain(
    TerrainSpec(rows=80, cols=80, kind="fractal", amplitude=100.0, seed=12)
)

rng = np.random.default_rng(3)
values = gt.values + rng.standard_normal(gt.shape) * 1.5
values[20:28, 30:44] = gt.nodata  # a reconstruction hole
est = HeightGrid(values, nodata=gt.nodata)

report = evaluate(est, gt, thresholds=(2.5, 7.5))
print("full metric bundle (thresholds 2.5 m / 7.5 m):")
print(format_report(report))
print(f"jointly valid cells: {report.joint_valid_count} of {gt.rows * gt.cols}")

compact = mvs3d_report(est, gt)
print("\nreduced benchmark preset:")
print(f"  rmse   = {compact.rmse:.3f} m")
print(f"  <1.0m  = {compact.pct_below_1m:.2f} %")
print(f"  median = {compact.median_abs:.3f} m")
