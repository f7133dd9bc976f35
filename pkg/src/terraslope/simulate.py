"""Coarse-to-fine refinement harness on synthetic terrain.

The harness replaces the photometric matching of a real multi-view stereo
network with an oracle: a softmax over the distance between each hypothesis
plane and the (noise-perturbed) ground-truth height.  Everything around the
matcher is the real machinery -- partition, height correction, slope
computation, losses, and metrics -- so A/B experiments isolate exactly the
partition and correction contributions.

The pipeline runs three stages.  Stage 1 sweeps equally spaced planes over
the global height range shared by all pixels; stages 2 and 3 recenter a
per-pixel range on the previous estimate, sized by the distribution spread
(with a per-stage floor), and optionally reallocate planes by local slope.

Paired runs are comparable seed-for-seed: the matcher noise field depends
only on the run seed and the stage index, never on the configuration, so
toggling partition or correction changes nothing else (common random
numbers).
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, replace

import numpy as np

from . import losses
from .correction import GaussianKernel, correct
from .metrics import DEFAULT_THRESHOLDS, EvalReport, evaluate, write_report_csv
from .partition import (
    HypothesisPlanes,
    PixelRanges,
    ProbabilityVolume,
    equal_partition,
    expected_height,
    pixel_range,
    pixel_std,
    slope_guided_partition,
)
from .raster import (
    HeightGrid,
    SlopeDirectionGrid,
    atomic_output,
    render_pgm,
    write_ascii_grid,
)
from .slope import (
    direction_as_grid,
    slope_direction_map,
    slope_factor_maps,
    slope_map,
)

TERRAIN_KINDS = ("ramp", "sinusoidal", "gaussian-hills", "fractal")

#: Published-style refinement schedule: plane counts per stage and the
#: uncertainty floors (half of plane count times stage interval: 32*5/2 and
#: 8*2.5/2).  Stage 1 sweeps the global range, so its floor is unused.
DEFAULT_PLANE_SCHEDULE = (64, 32, 8)
DEFAULT_SIGMA_FLOORS = (0.0, 80.0, 10.0)


@dataclass(frozen=True)
class StageConfig:
    """Parameters of one refinement stage."""

    plane_count: int
    sigma_floor: float = 0.0
    use_slope_partition: bool = False
    use_height_correction: bool = False
    temperature: float = 1.0
    noise: float = 0.0

    def __post_init__(self) -> None:
        if self.plane_count < 2:
            raise ValueError(f"plane_count must be >= 2, got {self.plane_count}")
        if not (self.temperature > 0):
            raise ValueError(f"temperature must be > 0, got {self.temperature}")
        if self.noise < 0:
            raise ValueError(f"noise must be >= 0, got {self.noise}")
        if self.sigma_floor < 0:
            raise ValueError(f"sigma_floor must be >= 0, got {self.sigma_floor}")


def default_stage_configs(
    temperature: float = 2.0,
    noise: float = 3.0,
    use_slope_partition: bool = True,
    use_height_correction: bool = True,
) -> tuple[StageConfig, StageConfig, StageConfig]:
    """Three-stage schedule with the default plane counts and floors."""
    return tuple(
        StageConfig(
            plane_count=m,
            sigma_floor=floor,
            use_slope_partition=use_slope_partition,
            use_height_correction=use_height_correction,
            temperature=temperature,
            noise=noise,
        )
        for m, floor in zip(DEFAULT_PLANE_SCHEDULE, DEFAULT_SIGMA_FLOORS)
    )


@dataclass(frozen=True)
class TerrainSpec:
    """Deterministic synthetic-terrain request."""

    rows: int
    cols: int
    kind: str = "fractal"
    amplitude: float = 100.0
    roughness: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"terrain must be at least 1x1, got {self.rows}x{self.cols}")
        if self.kind not in TERRAIN_KINDS:
            raise ValueError(
                f"unsupported terrain kind {self.kind!r}; choose from {TERRAIN_KINDS}"
            )
        if self.amplitude < 0:
            raise ValueError(f"amplitude must be >= 0, got {self.amplitude}")


@dataclass(frozen=True)
class SimulationResult:
    """Per-stage products of one pipeline run plus its evaluations.

    ``max_plane_spacing`` is the largest gap between consecutive hypothesis
    planes of any valid pixel, per stage: the resolution limit of that
    stage's sweep.
    """

    heights: tuple[HeightGrid, ...]
    slopes: tuple[HeightGrid, ...]
    directions: tuple[SlopeDirectionGrid, ...]
    reports: tuple[EvalReport, ...]
    loss: losses.LossReport
    max_plane_spacing: tuple[float, ...]

    def __post_init__(self) -> None:
        n = len(self.heights)
        if not (
            len(self.slopes)
            == len(self.directions)
            == len(self.reports)
            == len(self.max_plane_spacing)
            == n
        ):
            raise ValueError("per-stage sequences must have equal length")


@dataclass(frozen=True)
class AblationRow:
    """Mean final-stage metrics for one feature combination."""

    label: str
    mae: float
    rmse: float
    pct_lt_2_5: float
    pct_lt_7_5: float


def _ramp(spec: TerrainSpec) -> np.ndarray:
    cols = np.arange(spec.cols, dtype=np.float64)
    profile = cols / (spec.cols - 1) if spec.cols > 1 else np.zeros(spec.cols)
    return np.tile(spec.amplitude * profile, (spec.rows, 1))


def _sinusoidal(spec: TerrainSpec) -> np.ndarray:
    cycles = 1.0 + spec.roughness
    r = np.arange(spec.rows, dtype=np.float64)[:, None] / max(spec.rows - 1, 1)
    c = np.arange(spec.cols, dtype=np.float64)[None, :] / max(spec.cols - 1, 1)
    wave = np.sin(2.0 * np.pi * cycles * r) * np.cos(2.0 * np.pi * cycles * c)
    return 0.5 * spec.amplitude * (1.0 + wave)


def hill_count(roughness: float) -> int:
    """Number of bumps the gaussian-hills generator places."""
    return max(1, int(round(8.0 * roughness)))


def _gaussian_hills(spec: TerrainSpec, rng: np.random.Generator) -> np.ndarray:
    field = np.zeros((spec.rows, spec.cols), dtype=np.float64)
    rr = np.arange(spec.rows, dtype=np.float64)[:, None]
    cc = np.arange(spec.cols, dtype=np.float64)[None, :]
    extent = max(min(spec.rows, spec.cols), 2)
    for _ in range(hill_count(spec.roughness)):
        center_r = rng.uniform(0, spec.rows - 1)
        center_c = rng.uniform(0, spec.cols - 1)
        width = rng.uniform(extent / 12.0, extent / 4.0)
        d2 = (rr - center_r) ** 2 + (cc - center_c) ** 2
        field += spec.amplitude * np.exp(-d2 / (2.0 * width * width))
    return field


def _fractal(spec: TerrainSpec, rng: np.random.Generator) -> np.ndarray:
    """Midpoint-displacement terrain, rescaled to span [0, amplitude]."""
    size = 1
    while size + 1 < max(spec.rows, spec.cols):
        size *= 2
    n = size + 1
    field = np.zeros((n, n), dtype=np.float64)
    field[0, 0], field[0, -1], field[-1, 0], field[-1, -1] = rng.uniform(
        0.0, spec.amplitude, 4
    )
    disp = spec.amplitude * spec.roughness
    step = size
    while step >= 2:
        half = step // 2
        # Diamond step: square centers average their four corners.
        rs = np.arange(half, n, step)
        rr, cc = np.meshgrid(rs, rs, indexing="ij")
        avg = (
            field[rr - half, cc - half]
            + field[rr - half, cc + half]
            + field[rr + half, cc - half]
            + field[rr + half, cc + half]
        ) / 4.0
        field[rr, cc] = avg + rng.uniform(-0.5, 0.5, rr.shape) * disp
        # Square step: edge midpoints average their in-bounds neighbors.
        for row_off, col_off in ((half, 0), (0, half)):
            rs = np.arange(row_off, n, step)
            cs = np.arange(col_off, n, step)
            rr, cc = np.meshgrid(rs, cs, indexing="ij")
            total = np.zeros(rr.shape)
            count = np.zeros(rr.shape)
            for dr, dc in ((-half, 0), (half, 0), (0, -half), (0, half)):
                r2 = rr + dr
                c2 = cc + dc
                ok = (r2 >= 0) & (r2 < n) & (c2 >= 0) & (c2 < n)
                total[ok] += field[r2[ok], c2[ok]]
                count += ok
            field[rr, cc] = total / count + rng.uniform(-0.5, 0.5, rr.shape) * disp
        disp *= spec.roughness
        step = half
    field = field[: spec.rows, : spec.cols]
    span = field.max() - field.min()
    if span == 0.0:
        return np.zeros_like(field)
    return (field - field.min()) / span * spec.amplitude


def generate_terrain(spec: TerrainSpec) -> HeightGrid:
    """Deterministic synthetic terrain of the requested kind.

    The same spec (including seed) always yields the same grid.  Fractal
    terrain spans exactly [0, amplitude]; gaussian-hills are non-negative
    and bounded by amplitude times the hill count; ramp and sinusoidal stay
    within [0, amplitude].
    """
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "ramp":
        field = _ramp(spec)
    elif spec.kind == "sinusoidal":
        field = _sinusoidal(spec)
    elif spec.kind == "gaussian-hills":
        field = _gaussian_hills(spec, rng)
    elif spec.kind == "fractal":
        field = _fractal(spec, rng)
    else:  # unreachable; TerrainSpec validates
        raise ValueError(f"unsupported terrain kind {spec.kind!r}")
    return HeightGrid(field)


def matcher_noise(shape: tuple[int, int], scale: float, seed: int) -> np.ndarray:
    """Zero-mean Gaussian noise field, a pure function of (shape, scale, seed)."""
    if scale == 0.0:
        return np.zeros(shape, dtype=np.float64)
    return scale * np.random.default_rng(seed).standard_normal(shape)


def oracle_matcher(
    planes: HypothesisPlanes,
    gt: HeightGrid,
    temperature: float,
    noise: float,
    seed: int,
) -> ProbabilityVolume:
    """Softmax matching of hypothesis planes against perturbed ground truth.

    Per pixel, plane m gets probability proportional to
    ``exp(-|plane_m - (gt + eps)| / temperature)`` with eps the
    deterministic noise field of :func:`matcher_noise`.  Pixels invalid in
    either input get a uniform distribution and a False mask entry.

    Raises:
        ValueError: non-positive temperature or mismatched dimensions.
    """
    if not (temperature > 0):
        raise ValueError(f"temperature must be > 0, got {temperature}")
    if planes.shape != gt.shape:
        raise ValueError(f"planes {planes.shape} and gt {gt.shape} differ")
    target = gt.values + matcher_noise(gt.shape, noise, seed)
    logits = -np.abs(planes.planes - target[:, :, None]) / temperature
    logits -= logits.max(axis=2, keepdims=True)
    weights = np.exp(logits)
    probs = weights / weights.sum(axis=2, keepdims=True)
    mask = planes.mask & gt.mask
    probs[~mask] = 1.0 / planes.plane_count
    return ProbabilityVolume(probs=probs, mask=mask)


def _global_ranges(gt: HeightGrid, low: float, high: float) -> PixelRanges:
    shape = gt.shape
    sigma = (high - low) / 2.0
    return PixelRanges(
        low=np.full(shape, low),
        high=np.full(shape, high),
        sigma=np.full(shape, sigma),
        mask=gt.mask,
        cell_size=gt.cell_size,
        nodata=gt.nodata,
    )


def run_pipeline(
    gt: HeightGrid,
    global_range: tuple[float, float],
    stages: tuple[StageConfig, StageConfig, StageConfig],
    seed: int = 0,
) -> SimulationResult:
    """Run the three-stage coarse-to-fine estimation against ``gt``.

    Stage 1 partitions the global range equally for every pixel; stages 2
    and 3 recenter per-pixel ranges on the previous stage's height (spread
    floored by ``sigma_floor``) and partition them equally or slope-guided
    per their config.  Each stage matches with the oracle, regresses the
    expected height, optionally applies Gaussian correction, and derives
    slope and direction maps.

    Identical (gt, global_range, stages, seed) yield bit-identical results.

    Raises:
        ValueError: bad range, ground truth outside the range, or a stage
            list that is not exactly three configs.
    """
    low, high = float(global_range[0]), float(global_range[1])
    if not (low < high):
        raise ValueError(f"global range must satisfy low < high, got [{low}, {high}]")
    if len(stages) != 3:
        raise ValueError(f"expected exactly 3 stage configs, got {len(stages)}")
    valid_values = gt.values[gt.mask]
    if valid_values.size == 0:
        raise ValueError("ground truth has no valid pixel")
    if valid_values.min() < low or valid_values.max() > high:
        raise ValueError(
            f"ground truth spans [{valid_values.min():.3f}, "
            f"{valid_values.max():.3f}], outside the global range [{low}, {high}]"
        )

    heights: list[HeightGrid] = []
    slopes: list[HeightGrid] = []
    directions: list[SlopeDirectionGrid] = []
    reports: list[EvalReport] = []
    spacings: list[float] = []

    planes: HypothesisPlanes | None = None
    probs: ProbabilityVolume | None = None
    height: HeightGrid | None = None

    for stage_index, cfg in enumerate(stages):
        if stage_index == 0:
            ranges = _global_ranges(gt, low, high)
            planes = equal_partition(ranges, cfg.plane_count)
        else:
            sigma = pixel_std(planes, probs, height)
            ranges = pixel_range(height, sigma, cfg.sigma_floor)
            if cfg.use_slope_partition:
                factors = slope_factor_maps(height)
                planes = slope_guided_partition(height, ranges, factors, cfg.plane_count)
            else:
                planes = equal_partition(ranges, cfg.plane_count)
        probs = oracle_matcher(
            planes, gt, cfg.temperature, cfg.noise, seed=3 * seed + stage_index
        )
        height = expected_height(planes, probs)
        if cfg.use_height_correction:
            height = correct(height, GaussianKernel(scale=1.0))
        heights.append(height)
        slopes.append(slope_map(height))
        directions.append(slope_direction_map(height))
        reports.append(evaluate(height, gt, thresholds=DEFAULT_THRESHOLDS))
        gaps = np.diff(planes.planes[planes.mask], axis=-1)
        spacings.append(float(gaps.max()) if gaps.size else 0.0)

    pseudo_gt_dir = slope_direction_map(gt)
    gt_stack = [gt] * 3
    pgt_dirs = [pseudo_gt_dir] * 3
    stage_pairs = tuple(
        (losses.stage_height_loss(h, gt), losses.stage_direction_loss(d, pseudo_gt_dir))
        for h, d in zip(heights, directions)
    )
    h_loss = losses.height_loss(heights, gt_stack)
    d_loss = losses.direction_loss(directions, pgt_dirs)
    report = losses.LossReport(
        height_loss=h_loss,
        direction_loss=d_loss,
        overall=losses.overall_loss(h_loss, d_loss),
        per_stage=stage_pairs,
    )
    return SimulationResult(
        heights=tuple(heights),
        slopes=tuple(slopes),
        directions=tuple(directions),
        reports=tuple(reports),
        loss=report,
        max_plane_spacing=tuple(spacings),
    )


#: Feature toggles of the four ablation arms, in report order.
ABLATION_ARMS = (
    ("baseline", False, False),
    ("slope_partition", True, False),
    ("height_correction", False, True),
    ("combined", True, True),
)


def ablation_report(
    gt: HeightGrid,
    global_range: tuple[float, float],
    base_stages: tuple[StageConfig, StageConfig, StageConfig],
    seeds: list[int],
) -> list[AblationRow]:
    """Paired A/B table over the four partition/correction combinations.

    Every arm runs with every seed; arms share noise realizations per seed
    (common random numbers), so differences reflect only the toggled
    features.  Metrics are the final-stage MAE, RMSE, and percent-below
    values, averaged across seeds.
    """
    if not seeds:
        raise ValueError("at least one seed required")
    rows = []
    for label, use_partition, use_correction in ABLATION_ARMS:
        stages = tuple(
            replace(
                cfg,
                use_slope_partition=use_partition,
                use_height_correction=use_correction,
            )
            for cfg in base_stages
        )
        finals = [run_pipeline(gt, global_range, stages, seed=s).reports[-1] for s in seeds]
        rows.append(
            AblationRow(
                label=label,
                mae=float(np.mean([r.mae for r in finals])),
                rmse=float(np.mean([r.rmse for r in finals])),
                pct_lt_2_5=float(np.mean([r.pct_below[2.5] for r in finals])),
                pct_lt_7_5=float(np.mean([r.pct_below[7.5] for r in finals])),
            )
        )
    return rows


def write_ablation_csv(rows: list[AblationRow], path: str | os.PathLike) -> None:
    """Write the ablation table as CSV with a header row."""
    with atomic_output(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(["config", "mae", "rmse", "lt_2.5", "lt_7.5"])
        for row in rows:
            writer.writerow(
                [
                    row.label,
                    f"{row.mae:.6f}",
                    f"{row.rmse:.6f}",
                    f"{row.pct_lt_2_5:.6f}",
                    f"{row.pct_lt_7_5:.6f}",
                ]
            )


def write_run_directory(
    result: SimulationResult,
    gt: HeightGrid,
    global_range: tuple[float, float],
    out_dir: str | os.PathLike,
) -> None:
    """Emit every per-stage grid into ``out_dir`` with the fixed naming scheme.

    Per stage N (1-based): ``stageN_height.asc``, ``stageN_slope.asc``,
    ``stageN_dir.asc`` plus PGM quick-looks of each, and ``stageN_eval.csv``
    with that stage's metrics.  The ground truth is written as ``gt.asc``
    and the loss bundle as ``loss.txt``.
    """
    os.makedirs(out_dir, exist_ok=True)
    lo, hi = global_range
    write_ascii_grid(gt, os.path.join(out_dir, "gt.asc"))
    for i, (height, slope, direction, report) in enumerate(
        zip(result.heights, result.slopes, result.directions, result.reports), start=1
    ):
        write_ascii_grid(height, os.path.join(out_dir, f"stage{i}_height.asc"))
        render_pgm(height, os.path.join(out_dir, f"stage{i}_height.pgm"), lo, hi)
        write_ascii_grid(slope, os.path.join(out_dir, f"stage{i}_slope.asc"))
        slope_hi = max(float(slope.values[slope.mask].max()), 1e-9) if slope.mask.any() else 1.0
        render_pgm(slope, os.path.join(out_dir, f"stage{i}_slope.pgm"), 0.0, slope_hi)
        dir_grid = direction_as_grid(direction, like=height)
        write_ascii_grid(dir_grid, os.path.join(out_dir, f"stage{i}_dir.asc"))
        render_pgm(dir_grid, os.path.join(out_dir, f"stage{i}_dir.pgm"), 0.0, 8.0)
        write_report_csv(report, os.path.join(out_dir, f"stage{i}_eval.csv"))
    with atomic_output(os.path.join(out_dir, "loss.txt"), "w", encoding="ascii") as fh:
        fh.write(f"height_loss={result.loss.height_loss:.6f}\n")
        fh.write(f"direction_loss={result.loss.direction_loss:.6f}\n")
        fh.write(f"overall={result.loss.overall:.6f}\n")
        for i, (h, d) in enumerate(result.loss.per_stage, start=1):
            fh.write(f"stage{i}_height_loss={h:.6f}\n")
            fh.write(f"stage{i}_direction_loss={d:.6f}\n")
