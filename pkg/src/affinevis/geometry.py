"""Convex hull of the attractor and the projection-condition decision.

The projection condition asks whether deep cylinders project onto
non-trivial intervals along a direction; by invariance this reduces to
projecting the attractor along pulled-back directions and looking for gaps.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, ExceptionalDirectionError, budget_limit
from .linalg2 import Direction, ProjLine, proj_apply, singular_data
from .regularity import Cone, default_cover_cone, orientation_cover
from .symbolic import IFS, PointCloud, attractor_cloud

COLLINEAR_TOL = 1e-12
# carriers closer than this to the orientation cover are refused: their
# pullbacks would need more refinement depth than the default checks run
DEFAULT_MARGIN = 0.2


@dataclass(frozen=True)
class ConvexPolygon:
    """Counterclockwise vertex list, collinear vertices pruned."""

    vertices: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "vertices", np.atleast_2d(np.asarray(self.vertices, dtype=float))
        )

    def __len__(self) -> int:
        return self.vertices.shape[0]

    def contains(self, point, tol: float = 1e-9) -> bool:
        v = self.vertices
        n = len(self)
        if n == 1:
            return bool(np.hypot(*(point - v[0])) <= tol)
        if n == 2:
            return self.distance(point) <= tol
        p = np.asarray(point, dtype=float)
        nxt = np.roll(v, -1, axis=0)
        cross = (nxt[:, 0] - v[:, 0]) * (p[1] - v[:, 1]) - (nxt[:, 1] - v[:, 1]) * (
            p[0] - v[:, 0]
        )
        return bool(np.all(cross >= -tol * (1 + np.abs(cross).max())))

    def distance(self, point) -> float:
        """Euclidean distance from a point to the polygon (0 inside)."""
        p = np.asarray(point, dtype=float)
        v = self.vertices
        if len(self) == 1:
            return float(np.hypot(*(p - v[0])))
        if len(self) > 2 and self.contains(p, tol=0.0):
            return 0.0
        nxt = np.roll(v, -1, axis=0)
        d = nxt - v
        lens2 = np.maximum((d**2).sum(axis=1), 1e-300)
        t = np.clip(((p - v) * d).sum(axis=1) / lens2, 0.0, 1.0)
        proj = v + t[:, None] * d
        return float(np.hypot(proj[:, 0] - p[0], proj[:, 1] - p[1]).min())


def convex_hull(points: np.ndarray) -> ConvexPolygon:
    """Monotone-chain hull with collinear pruning; ccw vertex order."""
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if pts.shape[0] <= 2:
        return ConvexPolygon(pts)
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]
    scale = max(np.abs(pts).max(), 1.0)
    tol = COLLINEAR_TOL * scale * scale

    def build(seq):
        chain: list[np.ndarray] = []
        for p in seq:
            while len(chain) >= 2:
                o, a = chain[-2], chain[-1]
                if (a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0]) <= tol:
                    chain.pop()
                else:
                    break
            chain.append(p)
        return chain

    lower = build(pts)
    upper = build(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1])
    return ConvexPolygon(hull)


def hausdorff_polygons(a: ConvexPolygon, b: ConvexPolygon) -> float:
    """Hausdorff distance between convex polygons (attained at vertices)."""
    d_ab = max(b.distance(v) for v in a.vertices)
    d_ba = max(a.distance(v) for v in b.vertices)
    return max(d_ab, d_ba)


def attractor_hull(
    ifs: IFS, eps: float, max_iter: int = 1_000, budget: int | None = None
) -> ConvexPolygon:
    """Iterate K <- hull(union of map images of K) until the drift is <= eps.

    The seed polygon circumscribes a self-mapped ball around map 1's fixed
    point, so every iterate contains the attractor and the iteration is
    monotone decreasing; convergence is geometric at rate max alpha1.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    limit = budget_limit(budget)
    x0 = ifs.anchor_point()
    s = max(singular_data(f.linear).alpha1 for f in ifs.maps)
    d0 = max(float(np.hypot(*(f(x0) - x0))) for f in ifs.maps)
    if d0 == 0.0:
        return ConvexPolygon(x0[None, :])
    n_gon = 64
    while math.cos(math.pi / n_gon) <= s:
        n_gon *= 2
        if n_gon > 1_000_000:
            raise BudgetError("contraction ratio too close to 1 for hull seeding")
    radius = d0 / (1.0 - s / math.cos(math.pi / n_gon))
    ang = 2.0 * math.pi * np.arange(n_gon) / n_gon
    seed = x0 + radius / math.cos(math.pi / n_gon) * np.stack(
        [np.cos(ang), np.sin(ang)], axis=1
    )
    poly = convex_hull(seed)
    for _ in range(max_iter):
        images = np.concatenate([f(poly.vertices) for f in ifs.maps])
        if images.shape[0] > limit:
            raise BudgetError(f"hull iteration exceeded budget {limit}")
        new_poly = convex_hull(images)
        drift = hausdorff_polygons(poly, new_poly)
        poly = new_poly
        if drift <= eps:
            return poly
    raise BudgetError(f"hull iteration failed to reach eps={eps} in {max_iter} steps")


@dataclass(frozen=True)
class ProjectionVerdict:
    """Interval check for pulled-back projections at one direction.

    ``passed`` refers to the requested depth; ``first_pass_depth`` records
    the empirical first level at which every pullback projection was free
    of relative gaps (None if no level passed).
    """

    direction: Direction
    passed: bool
    worst_gap: float
    gap_tol: float
    depth: int
    exceptional: bool = False
    first_pass_depth: int | None = None


def projection_condition_check(
    ifs: IFS,
    e: Direction,
    depth: int = 5,
    gap_tol: float | None = None,
    cloud: PointCloud | None = None,
    cover: list[Cone] | None = None,
    margin: float = DEFAULT_MARGIN,
    delta: float = 2.0**-10,
) -> ProjectionVerdict:
    """Decide whether depth-n cylinder projections along ``e`` are intervals.

    For each word of the given length, the direction is pulled back through
    the inverse cylinder map and the attractor cloud is projected onto the
    axis perpendicular to the pulled-back direction; a relative gap larger
    than ``gap_tol`` fails the check.  Verdicts are certified only up to the
    tested depth.

    Directions whose carrier comes within ``margin`` of the orientation
    cover raise ExceptionalDirection.
    """
    if cover is None:
        cover = orientation_cover(ifs, eps=1e-2, x=default_cover_cone(ifs))
    carrier = e.carrier()
    clearance = min(c.line_distance(carrier) for c in cover)
    if clearance < margin:
        raise ExceptionalDirectionError(
            f"carrier at angle {carrier.angle:.4f} within {clearance:.4f} of the "
            f"orientation cover (margin {margin})"
        )
    if cloud is None:
        cloud = attractor_cloud(ifs, delta)
    if gap_tol is None:
        gap_tol_eff = None  # resolved per word from the cloud resolution
    else:
        gap_tol_eff = gap_tol

    # breadth-first pullback of the carrier through inverse factor maps;
    # projectively identical pullbacks collapse, so diagonal systems cost
    # one axis per level instead of kappa^depth
    inverses = [f.linear.inverse for f in ifs.maps]

    def level_verdict(lines: dict[float, ProjLine]) -> tuple[bool, float]:
        back_angles = np.array(sorted(lines.keys()))
        # project along the pulled-back direction = onto its perpendicular axis
        axes = np.stack([-np.sin(back_angles), np.cos(back_angles)], axis=1)
        vals = np.sort(cloud.points @ axes.T, axis=0)
        spans = vals[-1] - vals[0]
        if vals.shape[0] >= 2:
            gaps = np.max(np.diff(vals, axis=0), axis=0)
        else:
            gaps = np.zeros_like(spans)
        ok = spans > 0
        rel = np.zeros_like(spans)
        rel[ok] = gaps[ok] / spans[ok]
        if gap_tol_eff is not None:
            tols = np.full_like(spans, gap_tol_eff)
        else:
            # a delta-net can show spurious gaps up to ~2 delta
            tols = np.zeros_like(spans)
            tols[ok] = 3.0 * cloud.resolution / spans[ok]
        return bool(np.all(rel[ok] <= tols[ok])), float(rel[ok].max(initial=0.0))

    level = {round(carrier.angle, 12): carrier}
    first_pass: int | None = None
    passed = False
    worst = 0.0
    for n in range(1, depth + 1):
        nxt: dict[float, ProjLine] = {}
        for line in level.values():
            for inv in inverses:
                img = proj_apply(inv, line)
                nxt.setdefault(round(img.angle, 12), img)
        level = nxt
        level_ok, level_worst = level_verdict(level)
        if level_ok and first_pass is None:
            first_pass = n
        if n == depth:
            passed = level_ok
            worst = level_worst
    tol_repr = gap_tol_eff if gap_tol_eff is not None else 3.0 * cloud.resolution
    return ProjectionVerdict(e, passed, worst, float(tol_repr), depth, False, first_pass)


def direction_scan(
    ifs: IFS,
    n_dirs: int,
    depth: int = 5,
    gap_tol: float | None = None,
    margin: float = DEFAULT_MARGIN,
    delta: float = 2.0**-10,
    threads: int = 1,
) -> list[ProjectionVerdict]:
    """Projection verdicts on a uniform angular grid over [0, 2*pi).

    Exceptional directions are flagged rather than raised; rows are returned
    in grid order regardless of worker count.
    """
    if n_dirs < 4:
        raise ValueError("n_dirs must be >= 4")
    cover = orientation_cover(ifs, eps=1e-2, x=default_cover_cone(ifs))
    cloud = attractor_cloud(ifs, delta)
    dirs = [Direction(2.0 * math.pi * k / n_dirs) for k in range(n_dirs)]

    def row(d: Direction) -> ProjectionVerdict:
        try:
            return projection_condition_check(
                ifs, d, depth, gap_tol, cloud=cloud, cover=cover, margin=margin
            )
        except ExceptionalDirectionError:
            return ProjectionVerdict(d, False, math.nan, math.nan, depth, True)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(row, dirs))
    return [row(d) for d in dirs]
