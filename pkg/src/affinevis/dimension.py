"""Box-counting over scale ladders and a heuristic local-scaling estimator.

Counts come from a single fine grid coarsened level by level; the ladder
must consist of integer multiples of its finest scale (dyadic by default,
ternary for middle-thirds constructions).  The local estimator is a
sampled lower bound for the Assouad dimension and is labeled heuristic in
every report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, TooFewScalesError, budget_limit
from .symbolic import PointCloud
from .visibility import OccupancyGrid

# drop the two coarsest scales and refit when the residual exceeds this
RESIDUAL_TRIM_THRESHOLD = 0.1


@dataclass(frozen=True)
class DimEstimate:
    """Least-squares slope of log N versus log(1/delta).

    ``scales`` are strictly decreasing; ``counts`` are the matching box
    counts; ``residual`` is max |log2 N - fit| / log 2 over the fitted
    points; ``trimmed`` records whether the two coarsest scales were
    dropped as a transient.
    """

    slope: float
    intercept: float
    residual: float
    scales: tuple[float, ...]
    counts: tuple[int, ...]
    trimmed: bool = False


# snap tolerance in cell units: absorbs fp error of non-dyadic scales
# (e.g. 2/3 * 3^8 floors one cell low without it)
_CELL_SNAP = 1e-9


def _cells_of(data, finest: float) -> np.ndarray:
    if isinstance(data, OccupancyGrid):
        pts = data.centers()
        if finest < data.delta:
            raise ValueError(
                f"finest ladder scale {finest} finer than grid delta {data.delta}"
            )
    elif isinstance(data, PointCloud):
        pts = data.points
    else:
        pts = np.atleast_2d(np.asarray(data, dtype=float))
    return np.unique(np.floor(pts / finest + _CELL_SNAP).astype(np.int64), axis=0)


def box_count(data, delta_ladder, budget: int | None = None) -> list[int]:
    """Occupied-cell counts for each ladder scale, coarsest first.

    ``data`` may be a PointCloud, an OccupancyGrid, or a raw (n, 2) array.
    Every ladder scale must be an integer multiple of the finest one so
    that counts come from exact block merges of a single fine grid.
    """
    ladder = sorted((float(d) for d in delta_ladder), reverse=True)
    if not ladder:
        raise ValueError("empty ladder")
    finest = ladder[-1]
    limit = budget_limit(budget)
    cells = _cells_of(data, finest)
    if cells.shape[0] > limit:
        raise BudgetError(f"{cells.shape[0]} occupied cells exceed budget {limit}")
    counts = []
    for delta in ladder:
        ratio = delta / finest
        r = round(ratio)
        if abs(ratio - r) > 1e-9 * max(r, 1):
            raise ValueError(
                f"ladder scale {delta} is not an integer multiple of {finest}"
            )
        if r == 1:
            counts.append(int(cells.shape[0]))
        else:
            coarse = np.unique(np.floor_divide(cells, r), axis=0)
            counts.append(int(coarse.shape[0]))
    return counts


def fit_dimension(counts, scales) -> DimEstimate:
    """Slope of log N against log(1/delta) with a transient-trim rule.

    Requires at least four scales.  When the residual of the full fit
    exceeds 0.1 and enough points remain, the two coarsest scales are
    dropped and the fit is rerun (slowly converging constructions pollute
    the coarse end first).
    """
    scales = [float(s) for s in scales]
    counts = [int(c) for c in counts]
    if len(scales) != len(counts):
        raise ValueError("counts and scales length mismatch")
    if len(scales) < 4:
        raise TooFewScalesError(f"need >= 4 scales, got {len(scales)}")
    order = np.argsort(scales)[::-1]
    s = np.array(scales)[order]
    c = np.array(counts)[order]
    if np.any(c <= 0):
        raise ValueError("counts must be positive")

    def run(sa, ca):
        x = np.log(1.0 / sa)
        y = np.log(ca)
        slope, intercept = np.polyfit(x, y, 1)
        resid = float(np.max(np.abs(y - (slope * x + intercept))) / math.log(2))
        return float(slope), float(intercept), resid

    slope, intercept, resid = run(s, c)
    trimmed = False
    if resid > RESIDUAL_TRIM_THRESHOLD and len(s) >= 6:
        slope, intercept, resid = run(s[2:], c[2:])
        s, c = s[2:], c[2:]
        trimmed = True
    return DimEstimate(
        slope, intercept, resid, tuple(s.tolist()), tuple(int(v) for v in c), trimmed
    )


def dyadic_ladder(lo_exp: int, hi_exp: int, base: float = 2.0) -> list[float]:
    """Scales base^-k for k = lo_exp..hi_exp, coarsest first."""
    if hi_exp < lo_exp:
        raise ValueError("hi_exp must be >= lo_exp")
    return [base**-k for k in range(lo_exp, hi_exp + 1)]


def assouad_estimate(
    cloud: PointCloud,
    n_balls: int = 64,
    scale_pairs: list[tuple[float, float]] | None = None,
    seed: int = 0,
    centers: np.ndarray | None = None,
) -> float:
    """Heuristic local-scaling exponent: worst sampled ball wins.

    The functional is max over sampled centers x and pairs (R, r) of
    log N(B(x, R), r) / log(R / r), with N the number of occupied r-cells
    inside the radius-R ball.  Covering constants are not divided out, so
    at ratio gap g = log2(R/r) even a straight segment reads 1 + 1/g; keep
    g >= 6 when absolute accuracy matters.

    Centers are stratified on a coarse grid unless supplied; default pairs
    use R/r in {2^4, 2^6, 2^8}.  The result samples a lower bound of the
    worst-case local scaling and carries no convergence guarantee.
    """
    pts = cloud.points
    if pts.shape[0] == 0:
        raise ValueError("empty cloud")
    extent = float(max(np.ptp(pts[:, 0]), np.ptp(pts[:, 1])))
    if extent == 0.0:
        return 0.0
    if scale_pairs is None:
        big_r = extent / 4.0
        scale_pairs = [(big_r, big_r / 2.0**g) for g in (4, 6, 8)]
    rng = np.random.default_rng(seed)

    if centers is None:
        coarse = extent / 8.0
        keys = np.floor(pts / coarse).astype(np.int64)
        _, first = np.unique(keys, axis=0, return_index=True)
        centers = pts[np.sort(first)]
        if centers.shape[0] > n_balls:
            idx = rng.choice(centers.shape[0], size=n_balls, replace=False)
            centers = centers[np.sort(idx)]
    else:
        centers = np.atleast_2d(np.asarray(centers, dtype=float))

    best = 0.0
    for center in centers:
        d = np.hypot(pts[:, 0] - center[0], pts[:, 1] - center[1])
        for big_r, small_r in scale_pairs:
            small_r = max(small_r, cloud.resolution)
            if big_r <= small_r:
                continue
            local = pts[d <= big_r]
            if local.shape[0] == 0:
                continue
            n = np.unique(
                np.floor(local / small_r + _CELL_SNAP).astype(np.int64), axis=0
            ).shape[0]
            best = max(best, math.log(n) / math.log(big_r / small_r))
    return best
