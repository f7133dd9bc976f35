"""Pixel-wise height ranges and hypothesis-plane partition.

A sweep over candidate heights evaluates M "hypothesis planes" per pixel.
The baseline spreads them at equal intervals across the pixel's height
range.  The slope-guided variant splits the range at the current height
estimate and reallocates plane counts between the lower and upper subrange
in proportion to the downward/upward slope factors, so the side with more
local relief gets denser sampling.

Plane counts per pixel are always conserved: the lower subrange covers
[low, center) half-open, the upper covers [center, high] closed, and both
sides keep at least one plane.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .raster import HeightGrid
from .slope import SlopeFactors

_PROB_SUM_TOL = 1e-9


def _frozen_array(arr: np.ndarray, dtype=np.float64) -> np.ndarray:
    out = np.ascontiguousarray(np.asarray(arr, dtype=dtype))
    if out is arr:
        out = out.copy()
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class HypothesisPlanes:
    """Per-pixel sorted candidate heights, shape (rows, cols, M).

    ``mask`` marks pixels whose planes are meaningful; planes within a
    valid pixel are non-decreasing.  ``cell_size``/``nodata`` carry the
    metadata of the grid the planes were derived from, so height maps
    regressed from these planes inherit it.
    """

    planes: np.ndarray
    mask: np.ndarray
    cell_size: float = 1.0
    nodata: float = -9999.0

    def __post_init__(self) -> None:
        planes = np.asarray(self.planes, dtype=np.float64)
        mask = np.asarray(self.mask, dtype=bool)
        if planes.ndim != 3:
            raise ValueError(f"planes must be (rows, cols, M), got {planes.shape}")
        if planes.shape[2] < 1:
            raise ValueError("at least one plane per pixel required")
        if mask.shape != planes.shape[:2]:
            raise ValueError(
                f"mask shape {mask.shape} does not match grid {planes.shape[:2]}"
            )
        if mask.any():
            diffs = np.diff(planes[mask], axis=-1)
            if diffs.size and diffs.min() < 0:
                raise ValueError("planes must be non-decreasing within each pixel")
        object.__setattr__(self, "planes", _frozen_array(planes))
        object.__setattr__(self, "mask", _frozen_array(mask, dtype=bool))

    @property
    def plane_count(self) -> int:
        return self.planes.shape[2]

    @property
    def shape(self) -> tuple[int, int]:
        return self.planes.shape[:2]


@dataclass(frozen=True)
class ProbabilityVolume:
    """Per-pixel discrete distribution over M hypothesis planes."""

    probs: np.ndarray
    mask: np.ndarray

    def __post_init__(self) -> None:
        probs = np.asarray(self.probs, dtype=np.float64)
        mask = np.asarray(self.mask, dtype=bool)
        if probs.ndim != 3:
            raise ValueError(f"probs must be (rows, cols, M), got {probs.shape}")
        if mask.shape != probs.shape[:2]:
            raise ValueError(
                f"mask shape {mask.shape} does not match grid {probs.shape[:2]}"
            )
        if probs.size and probs.min() < 0:
            raise ValueError("probabilities must be non-negative")
        if mask.any():
            sums = probs[mask].sum(axis=-1)
            err = np.abs(sums - 1.0).max()
            if err > _PROB_SUM_TOL:
                raise ValueError(
                    f"probabilities must sum to 1 per valid pixel "
                    f"(worst deviation {err:.3e})"
                )
        object.__setattr__(self, "probs", _frozen_array(probs))
        object.__setattr__(self, "mask", _frozen_array(mask, dtype=bool))

    @property
    def plane_count(self) -> int:
        return self.probs.shape[2]


@dataclass(frozen=True)
class PixelRanges:
    """Per-pixel height search range [low, high] centered on an estimate.

    By construction ``high - low == 2 * sigma`` where sigma is the
    (floored) per-pixel uncertainty.  ``cell_size``/``nodata`` carry the
    metadata of the originating height grid.
    """

    low: np.ndarray
    high: np.ndarray
    sigma: np.ndarray
    mask: np.ndarray
    cell_size: float = 1.0
    nodata: float = -9999.0

    def __post_init__(self) -> None:
        low = np.asarray(self.low, dtype=np.float64)
        high = np.asarray(self.high, dtype=np.float64)
        sigma = np.asarray(self.sigma, dtype=np.float64)
        mask = np.asarray(self.mask, dtype=bool)
        if not (low.shape == high.shape == sigma.shape == mask.shape):
            raise ValueError("range component shapes must all match")
        if mask.any():
            if (sigma[mask] < 0).any():
                raise ValueError("sigma must be non-negative")
            if (low[mask] > high[mask]).any():
                raise ValueError("range low must not exceed high")
            width_err = np.abs((high[mask] - low[mask]) - 2.0 * sigma[mask])
            scale = np.maximum(1.0, np.abs(sigma[mask]))
            if (width_err > 1e-9 * scale).any():
                raise ValueError("range width must equal 2 * sigma")
        object.__setattr__(self, "low", _frozen_array(low))
        object.__setattr__(self, "high", _frozen_array(high))
        object.__setattr__(self, "sigma", _frozen_array(sigma))
        object.__setattr__(self, "mask", _frozen_array(mask, dtype=bool))

    @property
    def shape(self) -> tuple[int, int]:
        return self.low.shape


def expected_height(planes: HypothesisPlanes, probs: ProbabilityVolume) -> HeightGrid:
    """Probability-weighted mean height per pixel (soft-argmax regression)."""
    if planes.planes.shape != probs.probs.shape:
        raise ValueError(
            f"planes {planes.planes.shape} and probs {probs.probs.shape} differ"
        )
    height = np.einsum("rcm,rcm->rc", probs.probs, planes.planes)
    mask = planes.mask & probs.mask
    height[~mask] = planes.nodata
    return HeightGrid(height, cell_size=planes.cell_size, nodata=planes.nodata)


def pixel_std(
    planes: HypothesisPlanes, probs: ProbabilityVolume, height: HeightGrid
) -> HeightGrid:
    """Per-pixel standard deviation of the plane distribution around ``height``.

    ``height`` is normally :func:`expected_height` of the same volume, but
    any externally supplied estimate with matching dimensions is accepted.
    """
    if planes.planes.shape != probs.probs.shape:
        raise ValueError(
            f"planes {planes.planes.shape} and probs {probs.probs.shape} differ"
        )
    if height.shape != planes.shape:
        raise ValueError(f"height {height.shape} does not match {planes.shape}")
    dev = planes.planes - height.values[:, :, None]
    var = np.einsum("rcm,rcm->rc", probs.probs, dev * dev)
    sigma = np.sqrt(np.maximum(var, 0.0))
    mask = planes.mask & probs.mask & height.mask
    sigma[~mask] = height.nodata
    return height.with_values(sigma)


def pixel_range(
    height: HeightGrid, sigma: HeightGrid, sigma_floor: float = 0.0
) -> PixelRanges:
    """Symmetric per-pixel range ``height +- max(sigma, sigma_floor)``.

    The floor keeps the search range usable when the distribution collapsed
    to (near) certainty; set it from the refinement schedule.

    Raises:
        ValueError: mismatched dimensions, negative sigma, or negative floor.
    """
    if height.shape != sigma.shape:
        raise ValueError(f"height {height.shape} and sigma {sigma.shape} differ")
    if sigma_floor < 0:
        raise ValueError(f"sigma_floor must be >= 0, got {sigma_floor}")
    mask = height.mask & sigma.mask
    if ((sigma.values < 0) & mask).any():
        raise ValueError("sigma values must be non-negative")
    spread = np.where(mask, np.maximum(sigma.values, sigma_floor), 0.0)
    center = np.where(mask, height.values, 0.0)
    return PixelRanges(
        low=center - spread,
        high=center + spread,
        sigma=spread,
        mask=mask,
        cell_size=height.cell_size,
        nodata=height.nodata,
    )


def _split_counts(
    total: int, drop: np.ndarray, rise: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Distribute ``total`` planes between the lower and upper subrange.

    Lower share is proportional to ``drop``, upper to ``rise``; the lower
    count rounds half-up and the upper takes the complement, so the total
    is conserved exactly.  Zero-slope pixels split evenly (lower gets
    floor(total / 2)) and both sides are clamped to at least one plane.
    """
    denom = drop + rise
    share = drop / np.where(denom > 0, denom, 1.0)
    n_below = np.floor(total * share + 0.5).astype(np.int64)
    n_below[denom == 0] = total // 2
    n_below = np.clip(n_below, 1, total - 1)
    return n_below, total - n_below


def slope_guided_partition(
    height: HeightGrid,
    ranges: PixelRanges,
    factors: SlopeFactors,
    plane_count: int,
) -> HypothesisPlanes:
    """Reallocate planes between the subranges below and above the estimate.

    Per pixel with estimate H in [low, high]: the lower subrange supplies
    ``n_below`` planes from ``low`` stepping by ``(H - low) / n_below``
    (H itself excluded), the upper supplies ``n_above`` planes evenly
    spaced over [H, high] with both endpoints included (a single upper
    plane sits at H).  Counts follow :func:`_split_counts`, so denser
    sampling goes to the side with the larger slope factor.

    Raises:
        ValueError: plane_count < 2 or mismatched shapes.
    """
    if plane_count < 2:
        raise ValueError(f"plane_count must be >= 2, got {plane_count}")
    if height.shape != ranges.shape:
        raise ValueError(f"height {height.shape} and ranges {ranges.shape} differ")
    rise = np.broadcast_to(np.asarray(factors.rise, dtype=np.float64), height.shape)
    drop = np.broadcast_to(np.asarray(factors.drop, dtype=np.float64), height.shape)

    mask = height.mask & ranges.mask
    center = np.where(mask, height.values, 0.0)
    low = np.where(mask, ranges.low, 0.0)
    high = np.where(mask, ranges.high, 0.0)
    n_below, n_above = _split_counts(plane_count, drop, rise)

    idx = np.arange(plane_count)[None, None, :]
    below_count = n_below[:, :, None]
    step_below = (center - low)[:, :, None] / below_count
    lower = low[:, :, None] + idx * step_below

    above_count = n_above[:, :, None]
    span_above = (high - center)[:, :, None]
    step_above = np.where(above_count > 1, span_above / np.maximum(above_count - 1, 1), 0.0)
    upper = center[:, :, None] + (idx - below_count) * step_above

    planes = np.where(idx < below_count, lower, upper)
    # Pin the top sample and clamp float drift: the sweep must stay inside
    # [low, high] and reach high whenever the upper subrange has >= 2 planes.
    planes[:, :, -1] = np.where(n_above >= 2, high, center)
    planes = np.clip(planes, low[:, :, None], high[:, :, None])
    return HypothesisPlanes(
        planes=planes, mask=mask, cell_size=height.cell_size, nodata=height.nodata
    )


def equal_partition(ranges: PixelRanges, plane_count: int) -> HypothesisPlanes:
    """Baseline partition: ``plane_count`` evenly spaced planes per pixel.

    Planes run from ``low`` to ``high`` inclusive; a degenerate range
    yields ``plane_count`` copies of the single height.

    Raises:
        ValueError: plane_count < 2.
    """
    if plane_count < 2:
        raise ValueError(f"plane_count must be >= 2, got {plane_count}")
    steps = np.linspace(0.0, 1.0, plane_count)
    width = (ranges.high - ranges.low)[:, :, None]
    planes = ranges.low[:, :, None] + steps[None, None, :] * width
    planes[:, :, -1] = ranges.high
    return HypothesisPlanes(
        planes=planes, mask=ranges.mask, cell_size=ranges.cell_size, nodata=ranges.nodata
    )
