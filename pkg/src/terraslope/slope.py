"""Slope and slope-direction computation from height grids.

"Slope" here is a pure height difference in meters: for each pixel, the
absolute difference between the maximum of its 3x3 neighborhood and the
center value.  The slope direction is a categorical code 0..8 naming the
neighborhood position of that maximum (see
:data:`terraslope.raster.DIRECTION_LABELS`); code 4 means the center itself
is the maximum.

Window policy, shared by every 3x3 operation in this package:

* positions outside the grid are filled by replicate padding (the nearest
  in-bounds pixel);
* neighbors that are invalid (nodata) contribute the center value instead,
  so sentinels never leak into an extremum.

Both rules keep the computed slope a conservative, zero-biased estimate at
borders and next to holes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .raster import HeightGrid, SlopeDirectionGrid

#: Row-major offsets of a 3x3 window; linear index 4 is the center.
_OFFSETS = [(dr, dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1)]


@dataclass(frozen=True)
class NeighborhoodExtract:
    """One pixel's 3x3 window in row-major order.

    ``neighbors[4]`` always equals ``center``.  ``valid_flags[k]`` is False
    where the window position was out of bounds or hit a nodata cell and was
    therefore filled by the padding rules.
    """

    center: float
    neighbors: np.ndarray
    valid_flags: np.ndarray

    def __post_init__(self) -> None:
        neighbors = np.asarray(self.neighbors, dtype=np.float64)
        flags = np.asarray(self.valid_flags, dtype=bool)
        if neighbors.shape != (9,) or flags.shape != (9,):
            raise ValueError("window must hold exactly 9 values and 9 flags")
        if neighbors[4] != self.center:
            raise ValueError("window position 4 must equal the center value")
        if not flags[4]:
            raise ValueError("center flag must be True")
        object.__setattr__(self, "neighbors", neighbors)
        object.__setattr__(self, "valid_flags", flags)


@dataclass(frozen=True)
class SlopeFactors:
    """Upward and downward height differences within a 3x3 window.

    ``rise`` is |neighborhood max - center|, ``drop`` is
    |neighborhood min - center|.  Fields are scalars for a single window or
    2D arrays for a whole grid.  Both are zero on a locally constant plane.
    """

    rise: float | np.ndarray
    drop: float | np.ndarray


def window_stack(grid: HeightGrid) -> np.ndarray:
    """(rows, cols, 9) stack of 3x3 windows under the shared border policy.

    Entry ``[r, c, k]`` is window position ``k`` (row-major) of pixel
    ``(r, c)``: the replicate-padded neighbor value, or the center value
    where that neighbor is invalid.  Rows whose center is invalid still get
    a window built from the sentinel; callers mask them out.
    """
    values = grid.values
    valid = grid.mask
    padded = np.pad(values, 1, mode="edge")
    padded_valid = np.pad(valid, 1, mode="edge")
    rows, cols = values.shape
    stack = np.empty((rows, cols, 9), dtype=np.float64)
    for k, (dr, dc) in enumerate(_OFFSETS):
        neighbor = padded[1 + dr : 1 + dr + rows, 1 + dc : 1 + dc + cols]
        neighbor_ok = padded_valid[1 + dr : 1 + dr + rows, 1 + dc : 1 + dc + cols]
        stack[:, :, k] = np.where(neighbor_ok, neighbor, values)
    return stack


def extract_3x3(grid: HeightGrid, row: int, col: int) -> NeighborhoodExtract:
    """Extract the 3x3 window centered on a valid pixel.

    Raises:
        IndexError: (row, col) out of bounds.
        ValueError: center pixel is invalid.
    """
    if not (0 <= row < grid.rows and 0 <= col < grid.cols):
        raise IndexError(f"({row}, {col}) outside {grid.rows}x{grid.cols} grid")
    valid = grid.mask
    if not valid[row, col]:
        raise ValueError(f"center pixel ({row}, {col}) is invalid")
    center = float(grid.values[row, col])
    neighbors = np.empty(9, dtype=np.float64)
    flags = np.empty(9, dtype=bool)
    for k, (dr, dc) in enumerate(_OFFSETS):
        r, c = row + dr, col + dc
        in_bounds = 0 <= r < grid.rows and 0 <= c < grid.cols
        rr = min(max(r, 0), grid.rows - 1)
        cc = min(max(c, 0), grid.cols - 1)
        if valid[rr, cc]:
            neighbors[k] = grid.values[rr, cc]
        else:
            neighbors[k] = center
        flags[k] = in_bounds and bool(valid[r, c])
    return NeighborhoodExtract(center=center, neighbors=neighbors, valid_flags=flags)


def slope_map(grid: HeightGrid) -> HeightGrid:
    """Per-pixel slope: |3x3 neighborhood max - center|, in meters.

    Invalid pixels propagate nodata.  The result shares dimensions, cell
    size, and sentinel with the input.
    """
    stack = window_stack(grid)
    slope = np.abs(stack.max(axis=2) - grid.values)
    slope[~grid.mask] = grid.nodata
    return grid.with_values(slope)


def slope_direction_map(grid: HeightGrid) -> SlopeDirectionGrid:
    """Per-pixel direction code of the 3x3 neighborhood maximum.

    If the center attains the maximum (including fully flat windows) the
    code is 4; otherwise the maximum position with the smallest row-major
    index wins ties and the code is ``8 - index``, which maps the window
    corners/edges onto the 0..8 direction table.
    """
    stack = window_stack(grid)
    peak = stack.max(axis=2)
    center_is_peak = stack[:, :, 4] == peak
    first_argmax = np.argmax(stack == peak[:, :, None], axis=2)
    codes = np.where(center_is_peak, 4, 8 - first_argmax)
    mask = grid.mask
    codes = np.where(mask, codes, 4)
    return SlopeDirectionGrid(codes=codes, mask=mask)


def slope_factors(extract: NeighborhoodExtract) -> SlopeFactors:
    """Rise/drop slope factors of a single 3x3 window."""
    rise = float(abs(extract.neighbors.max() - extract.center))
    drop = float(abs(extract.neighbors.min() - extract.center))
    return SlopeFactors(rise=rise, drop=drop)


def slope_factor_maps(grid: HeightGrid) -> SlopeFactors:
    """Rise/drop slope factors for every pixel of a grid.

    Returns a :class:`SlopeFactors` whose fields are (rows, cols) arrays.
    Entries at invalid pixels are zero; consumers mask with ``grid.mask``.
    """
    stack = window_stack(grid)
    rise = np.abs(stack.max(axis=2) - grid.values)
    drop = np.abs(stack.min(axis=2) - grid.values)
    invalid = ~grid.mask
    rise[invalid] = 0.0
    drop[invalid] = 0.0
    return SlopeFactors(rise=rise, drop=drop)


def direction_as_grid(dirs: SlopeDirectionGrid, like: HeightGrid) -> HeightGrid:
    """Direction codes as a height grid, for ASCII/PGM serialization.

    Codes become float cell values; masked-out cells become ``like``'s
    nodata sentinel.  Metadata (cell size, corners) is taken from ``like``.
    """
    values = dirs.codes.astype(np.float64)
    values[~dirs.mask] = like.nodata
    return like.with_values(values)
