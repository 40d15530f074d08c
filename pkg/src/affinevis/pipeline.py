"""Composed end-to-end runs shared by the CLI and the scenario assertions."""

from __future__ import annotations

import math

from .dimension import DimEstimate, box_count, fit_dimension
from .linalg2 import Direction, ProjLine, proj_distance
from .symbolic import IFS, PointCloud, attractor_cloud
from .visibility import rasterize, visible_exact, visible_sweep


def ladder_scales(lo_exp: int, hi_exp: int, base: float = 2.0) -> list[float]:
    if hi_exp < lo_exp:
        raise ValueError("ladder hi exponent must be >= lo exponent")
    return [base**-k for k in range(lo_exp, hi_exp + 1)]


def ladder_grids(cloud: PointCloud, scales: list[float]) -> list:
    """One rasterization per ladder scale, coarsest first; reusable across
    directions since rasterization does not depend on the direction."""
    return [rasterize(cloud, delta) for delta in sorted(scales, reverse=True)]


def sweep_visible_counts(
    cloud: PointCloud,
    e: Direction,
    scales: list[float],
    grids: list | None = None,
) -> list[int]:
    """Per-scale sizes of the delta-resolution visible part.

    Each scale gets its own rasterization and sweep: delta-visibility is a
    per-scale object, occlusion width and counting width move together.
    """
    if grids is None:
        grids = ladder_grids(cloud, scales)
    return [len(visible_sweep(grid, e)) for grid in grids]


def vis_dim(
    cloud: PointCloud,
    e: Direction,
    scales: list[float],
    exact: bool = False,
    grids: list | None = None,
) -> DimEstimate:
    """Fit the scaling of the visible part over a scale ladder.

    Default mode counts the per-scale sweep (column-quantized visibility).
    ``exact`` mode instead computes the exact-ray visible subset of the
    cloud once and box-counts it across the ladder; use it at exceptional
    orientations, where column quantization collapses structure that exact
    sight lines keep.
    """
    scales = sorted((float(s) for s in scales), reverse=True)
    if exact:
        visible = visible_exact(cloud, e)
        counts = box_count(visible.points, scales)
    else:
        counts = sweep_visible_counts(cloud, e, scales, grids=grids)
    return fit_dimension(counts, scales)


def set_dim(cloud: PointCloud, scales: list[float]) -> DimEstimate:
    """Box-dimension fit of the cloud itself over the ladder."""
    scales = sorted((float(s) for s in scales), reverse=True)
    return fit_dimension(box_count(cloud.points, scales), scales)


def spread_directions(
    n: int, avoid_carrier_angle: float, min_distance: float, offset: float = 0.05
) -> list[Direction]:
    """n near-uniform directions whose carriers all stay at least
    min_distance from the given carrier angle."""
    avoid = ProjLine(avoid_carrier_angle)
    m = n
    while m <= 16 * n:
        m += 1
        cands = [Direction(offset + 2.0 * math.pi * k / m) for k in range(m)]
        kept = [d for d in cands if proj_distance(d.carrier(), avoid) >= min_distance]
        if len(kept) >= n:
            return kept[:n]
    raise ValueError("could not place the requested directions")


def scenario_cloud(ifs: IFS, delta: float, budget: int | None = None) -> PointCloud:
    return attractor_cloud(ifs, delta, budget=budget)
