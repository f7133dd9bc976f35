"""Independent brute-force reference implementations.

Everything here is written as plain per-pixel Python loops over scalar
values, deliberately sharing no code with the library: these are the
oracles the vectorized implementations are checked against.
"""

from __future__ import annotations

import math


def window_values(values, nodata, row, col):
    """3x3 window of (row, col) under replicate padding and nodata rules.

    Out-of-bounds positions replicate the nearest in-bounds pixel; any
    sampled nodata value is replaced by the center value.
    """
    rows = len(values)
    cols = len(values[0])
    center = values[row][col]
    out = []
    for dr in (-1, 0, 1):
        for dc in (-1, 0, 1):
            r = min(max(row + dr, 0), rows - 1)
            c = min(max(col + dc, 0), cols - 1)
            v = values[r][c]
            out.append(center if v == nodata else v)
    return out


def brute_slope(values, nodata):
    """Per-pixel |window max - center|; nodata cells propagate."""
    rows = len(values)
    cols = len(values[0])
    out = [[nodata] * cols for _ in range(rows)]
    for r in range(rows):
        for c in range(cols):
            if values[r][c] == nodata:
                continue
            win = window_values(values, nodata, r, c)
            out[r][c] = abs(max(win) - values[r][c])
    return out


def brute_direction(values, nodata):
    """Per-pixel direction code: 4 if the center attains the window max,
    else 8 minus the smallest row-major index attaining it."""
    rows = len(values)
    cols = len(values[0])
    out = [[4] * cols for _ in range(rows)]
    for r in range(rows):
        for c in range(cols):
            if values[r][c] == nodata:
                continue
            win = window_values(values, nodata, r, c)
            peak = max(win)
            if win[4] == peak:
                out[r][c] = 4
            else:
                out[r][c] = 8 - win.index(peak)
    return out


def scalar_split(total, drop, rise):
    """Plane-count split between lower/upper subrange for one pixel."""
    if drop + rise == 0:
        n_below = total // 2
    else:
        n_below = math.floor(total * drop / (drop + rise) + 0.5)
    n_below = min(max(n_below, 1), total - 1)
    return n_below, total - n_below


def scalar_partition(center, low, high, rise, drop, total):
    """Direct transcription of the slope-guided sampling for one pixel."""
    n_below, n_above = scalar_split(total, drop, rise)
    planes = []
    step_below = (center - low) / n_below
    for i in range(n_below):
        planes.append(low + i * step_below)
    if n_above == 1:
        planes.append(center)
    else:
        step_above = (high - center) / (n_above - 1)
        for j in range(n_above):
            planes.append(center + j * step_above)
    return planes


def naive_correct(values, nodata, scale):
    """9-term weighted window sum with weights scale/16 * [1 2 1 2 4 2 1 2 1]."""
    base = [1, 2, 1, 2, 4, 2, 1, 2, 1]
    rows = len(values)
    cols = len(values[0])
    out = [[nodata] * cols for _ in range(rows)]
    for r in range(rows):
        for c in range(cols):
            if values[r][c] == nodata:
                continue
            win = window_values(values, nodata, r, c)
            out[r][c] = sum(scale * w / 16.0 * v for w, v in zip(base, win))
    return out


def golden_section_minimize(f, lo, hi, tol=1e-9):
    """Golden-section search for a unimodal scalar minimum on [lo, hi]."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while abs(b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return (a + b) / 2.0


def scalar_metrics(est, gt, est_nodata, gt_nodata, thresholds):
    """Direct transcription of the evaluation metrics for list-of-list grids.

    Returns (mae, rmse, pct_below dict, median, completeness, n_joint).
    """
    errors = []
    est_valid = 0
    rows = len(est)
    cols = len(est[0])
    for r in range(rows):
        for c in range(cols):
            e_ok = est[r][c] != est_nodata
            g_ok = gt[r][c] != gt_nodata
            if e_ok:
                est_valid += 1
            if e_ok and g_ok:
                errors.append(abs(est[r][c] - gt[r][c]))
    n = len(errors)
    if n == 0:
        raise ValueError("empty joint-valid set")
    mae = sum(errors) / n
    rmse = math.sqrt(sum(e * e for e in errors) / n)
    pct = {t: 100.0 * sum(1 for e in errors if e < t) / n for t in thresholds}
    ordered = sorted(errors)
    if n % 2 == 1:
        median = ordered[n // 2]
    else:
        median = (ordered[n // 2 - 1] + ordered[n // 2]) / 2.0
    completeness = 100.0 * est_valid / (rows * cols)
    return mae, rmse, pct, median, completeness, n
