"""Training-criterion evaluation over staged height and direction maps.

Two criteria are computed per refinement stage and combined with per-stage
weights (default 0.5 / 1.0 / 2.0, coarse to fine):

* height loss -- mean absolute height difference over jointly valid pixels;
* direction loss -- mean squared difference between direction codes,
  compared as plain real numbers.

The overall criterion is a weighted sum of the two totals (default weights
0.5 each).  Everything here is evaluation-only; nothing is differentiated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .raster import HeightGrid, SlopeDirectionGrid

#: Per-stage weights, coarse to fine.
DEFAULT_STAGE_WEIGHTS = (0.5, 1.0, 2.0)


@dataclass(frozen=True)
class LossReport:
    """Loss bundle for one evaluation pass.

    ``per_stage`` holds the unweighted (height, direction) means per stage;
    ``height_loss``/``direction_loss`` are the stage-weighted sums and
    ``overall`` their combination.
    """

    height_loss: float
    direction_loss: float
    overall: float
    per_stage: tuple[tuple[float, float], ...]


def _check_weights(weights: Sequence[float], n_stages: int) -> None:
    if len(weights) != n_stages:
        raise ValueError(f"expected {n_stages} stage weights, got {len(weights)}")
    if any(w <= 0 for w in weights):
        raise ValueError(f"stage weights must be positive, got {tuple(weights)}")


def stage_height_loss(pred: HeightGrid, gt: HeightGrid) -> float:
    """Mean absolute height difference over jointly valid pixels."""
    if pred.shape != gt.shape:
        raise ValueError(f"pred {pred.shape} and gt {gt.shape} differ")
    joint = pred.mask & gt.mask
    if not joint.any():
        raise ValueError("no jointly valid pixel in stage")
    return float(np.abs(pred.values[joint] - gt.values[joint]).mean())


def _stage_smooth_l1(pred: HeightGrid, gt: HeightGrid, beta: float) -> float:
    joint = pred.mask & gt.mask
    if not joint.any():
        raise ValueError("no jointly valid pixel in stage")
    err = np.abs(pred.values[joint] - gt.values[joint])
    per_pixel = np.where(err < beta, 0.5 * err * err / beta, err - 0.5 * beta)
    return float(per_pixel.mean())


def height_loss(
    pred: Sequence[HeightGrid],
    gt: Sequence[HeightGrid],
    weights: Sequence[float] = DEFAULT_STAGE_WEIGHTS,
    smooth: bool = False,
) -> float:
    """Stage-weighted mean absolute height error.

    Each stage contributes ``weight * mean(|pred - gt|)`` over its jointly
    valid pixels.  With ``smooth=True`` the per-pixel term switches to the
    smooth-L1 form with a 1 m transition point.

    Raises:
        ValueError: stage count mismatch, non-positive weight, mismatched
            grid dimensions, or a stage with zero jointly valid pixels.
    """
    if len(pred) != len(gt):
        raise ValueError(f"{len(pred)} predictions vs {len(gt)} ground truths")
    _check_weights(weights, len(pred))
    total = 0.0
    for p, g, w in zip(pred, gt, weights):
        if p.shape != g.shape:
            raise ValueError(f"stage shapes differ: {p.shape} vs {g.shape}")
        stage = _stage_smooth_l1(p, g, 1.0) if smooth else stage_height_loss(p, g)
        total += w * stage
    return total


def stage_direction_loss(pred: SlopeDirectionGrid, gt: SlopeDirectionGrid) -> float:
    """Mean squared difference of direction codes over jointly valid pixels."""
    if pred.codes.shape != gt.codes.shape:
        raise ValueError(
            f"pred {pred.codes.shape} and gt {gt.codes.shape} differ"
        )
    joint = pred.mask & gt.mask
    if not joint.any():
        raise ValueError("no jointly valid pixel in stage")
    diff = pred.codes[joint].astype(np.float64) - gt.codes[joint]
    return float((diff * diff).mean())


def direction_loss(
    pred_dirs: Sequence[SlopeDirectionGrid],
    pseudo_gt_dirs: Sequence[SlopeDirectionGrid],
    weights: Sequence[float] = DEFAULT_STAGE_WEIGHTS,
) -> float:
    """Stage-weighted mean squared error between direction-code maps.

    The reference maps are pseudo ground truth: direction maps computed
    from the ground-truth height grids, so no extra supervision is needed.
    Codes are compared as real numbers.
    """
    if len(pred_dirs) != len(pseudo_gt_dirs):
        raise ValueError(
            f"{len(pred_dirs)} predictions vs {len(pseudo_gt_dirs)} references"
        )
    _check_weights(weights, len(pred_dirs))
    total = 0.0
    for p, g, w in zip(pred_dirs, pseudo_gt_dirs, weights):
        total += w * stage_direction_loss(p, g)
    return total


def overall_loss(h: float, s: float, l1: float = 0.5, l2: float = 0.5) -> float:
    """Weighted combination of the height and direction criteria."""
    return l1 * h + l2 * s
