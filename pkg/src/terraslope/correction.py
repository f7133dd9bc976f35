"""Gaussian height correction.

Height estimates on locally planar terrain should not jump between adjacent
pixels, so a 3x3 Gaussian-weighted average is applied to pull outliers back
toward their neighborhood.  The kernel is the classic binomial pattern
1:2:1 / 2:4:2 / 1:2:1 (divided by 16) multiplied by a single scalar
``scale``; at scale 1 the weights form a partition of unity and constant
terrain passes through unchanged.

The scalar is the one tunable parameter: :func:`fit_scale` solves for the
value that best maps a degraded grid onto a reference in the least-squares
sense, in closed form.

Border and nodata handling match :mod:`terraslope.slope` exactly, so every
3x3 operation in the package sees the same windows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .raster import HeightGrid
from .slope import window_stack

#: Base 3x3 pattern in row-major order; sums to exactly 1.
BASE_WEIGHTS = np.array([1, 2, 1, 2, 4, 2, 1, 2, 1], dtype=np.float64) / 16.0
BASE_WEIGHTS.flags.writeable = False


@dataclass(frozen=True)
class GaussianKernel:
    """3x3 smoothing kernel: the fixed binomial pattern times ``scale``.

    The nine weights sum to exactly ``scale``; at the default scale of 1
    the kernel is a proper averaging filter.
    """

    scale: float = 1.0

    @property
    def weights(self) -> np.ndarray:
        """Row-major (9,) weight vector."""
        return self.scale * BASE_WEIGHTS


def correct(height: HeightGrid, kernel: GaussianKernel = GaussianKernel()) -> HeightGrid:
    """Smooth a height grid with the weighted 3x3 kernel.

    Windows use replicate padding at borders, and invalid neighbors
    contribute the center value; invalid pixels stay invalid.
    """
    stack = window_stack(height)
    smoothed = stack @ kernel.weights
    smoothed[~height.mask] = height.nodata
    return height.with_values(smoothed)


def fit_scale(noisy: HeightGrid, target: HeightGrid) -> GaussianKernel:
    """Least-squares fit of the kernel scale mapping ``noisy`` onto ``target``.

    With C the unit-scale smoothing of ``noisy``, the minimizer of
    ``sum((scale * C - target)^2)`` over jointly valid pixels is
    ``<C, target> / <C, C>``.

    Raises:
        ValueError: mismatched dimensions, no jointly valid pixel, or a
            base-smoothed input that is identically zero on the joint mask
            (the scale is then unidentifiable).
    """
    if noisy.shape != target.shape:
        raise ValueError(f"noisy {noisy.shape} and target {target.shape} differ")
    smoothed = correct(noisy, GaussianKernel(scale=1.0))
    joint = smoothed.mask & target.mask
    if not joint.any():
        raise ValueError("no jointly valid pixel to fit on")
    c = smoothed.values[joint]
    t = target.values[joint]
    cc = float(np.dot(c, c))
    if cc == 0.0:
        raise ValueError("smoothed input is identically zero; scale is unidentifiable")
    return GaussianKernel(scale=float(np.dot(c, t)) / cc)
