"""Magnification frames, approximating rectangles, and tangent sequences.

A frame (x, r) sends y to (y - x) / r.  The approximating rectangle of a
cylinder under a frame is the smallest rectangle aligned with the
cylinder's singular orientations that contains the magnified cylinder;
its long side h grows like alpha1/r and its short side v shrinks like
alpha2/r, so under domination the rectangles become long needles whose
directions accumulate on the limit-orientation set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyCylinderViewError, NoExitError
from .linalg2 import PI, ProjLine
from .symbolic import (
    IFS,
    PointCloud,
    Word,
    attractor_cloud,
    cyclic_prefix,
    cylinder,
)
from .visibility import KakeyaSet

DEFAULT_RECT_DELTA = 0.01


@dataclass(frozen=True)
class TangentFrame:
    """Magnification window: center on the set, scale in (0, 1]."""

    center: tuple[float, float]
    scale: float

    def __post_init__(self) -> None:
        if not 0.0 < self.scale <= 1.0:
            raise ValueError(f"frame scale {self.scale} outside (0, 1]")

    def __call__(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return (pts - np.asarray(self.center)) / self.scale


@dataclass(frozen=True)
class ApproxRect:
    """Smallest rectangle around a magnified cylinder, axes along the
    cylinder's singular orientations; h along theta1, v along theta2."""

    center: np.ndarray
    orientation: ProjLine
    h: float
    v: float
    word: Word

    def long_axis(self) -> np.ndarray:
        return self.orientation.vector()

    def short_side_centers(self) -> tuple[np.ndarray, np.ndarray]:
        u = self.long_axis()
        return self.center - 0.5 * self.h * u, self.center + 0.5 * self.h * u


def magnify(cloud: PointCloud, frame: TangentFrame) -> PointCloud:
    """Frame image of a cloud, clipped to the closed unit ball."""
    pts = frame(cloud.points)
    keep = np.hypot(pts[:, 0], pts[:, 1]) <= 1.0
    return PointCloud(pts[keep], cloud.resolution / frame.scale)


def approx_rect(
    ifs: IFS,
    frame: TangentFrame,
    w: Sequence[int],
    delta: float = DEFAULT_RECT_DELTA,
    base_cloud: PointCloud | None = None,
) -> ApproxRect:
    """Bounding rectangle of the magnified cylinder in its singular frame.

    The cylinder's point set is the pushforward of a delta-resolution base
    cloud through the cylinder map, so the strongly contracted extent keeps
    its relative accuracy; h and v carry about +/- 2 delta relative error.
    Raises EmptyCylinderView when the magnified cylinder misses the unit
    ball entirely.
    """
    cyl = cylinder(ifs, tuple(w))
    if base_cloud is None:
        base_cloud = attractor_cloud(ifs, delta)
    pts = frame(cyl.map(base_cloud.points))
    if np.min(np.hypot(pts[:, 0], pts[:, 1])) > 1.0:
        raise EmptyCylinderViewError(
            f"cylinder {cyl.word} does not meet the unit ball in this frame"
        )
    u1 = cyl.sdata.theta1.vector()
    u2 = cyl.sdata.theta2.vector()
    s1 = pts @ u1
    s2 = pts @ u2
    h = float(s1.max() - s1.min())
    v = float(s2.max() - s2.min())
    mid = 0.5 * (s1.max() + s1.min()) * u1 + 0.5 * (s2.max() + s2.min()) * u2
    return ApproxRect(mid, cyl.sdata.theta1, h, v, cyl.word)


def tangent_sequence(
    ifs: IFS,
    i_stream: Sequence[int] | Iterable[int],
    n_max: int,
    c: float = 1.0,
    delta: float = DEFAULT_RECT_DELTA,
) -> list[tuple[TangentFrame, ApproxRect]]:
    """Frames and rectangles along growing prefixes of a symbol stream.

    The n-th frame centers at the anchor of the length-n prefix and uses
    scale r_n = n * alpha2(prefix) / c, so alpha2 = c * r_n / n holds by
    construction.  Under domination h_n = c * (alpha1/alpha2) / n grows
    geometrically while v_n = c / n decays; both trends are measurable on
    the emitted rectangles.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if c <= 0:
        raise ValueError("c must be positive")
    symbols = cyclic_prefix(i_stream, n_max)
    base_cloud = attractor_cloud(ifs, delta)
    out: list[tuple[TangentFrame, ApproxRect]] = []
    for n in range(1, n_max + 1):
        word = symbols[:n]
        cyl = cylinder(ifs, word)
        r_n = min(1.0, n * cyl.alpha2 / c)
        anchor = cyl.map(ifs.anchor_point())
        frame = TangentFrame((float(anchor[0]), float(anchor[1])), r_n)
        rect = approx_rect(ifs, frame, word, delta, base_cloud=base_cloud)
        out.append((frame, rect))
    return out


def _circular_mean(angles: np.ndarray) -> float:
    s = np.sin(angles).sum()
    c = np.cos(angles).sum()
    return math.atan2(s, c) % (2.0 * PI)


def _cluster_angles(angles: np.ndarray, tol: float) -> np.ndarray:
    """Snap full-circle angles to the circular mean of their tol-cluster."""
    if angles.size <= 1:
        return angles.copy()
    order = np.argsort(angles)
    sorted_a = angles[order]
    gaps = np.diff(sorted_a)
    wrap_gap = sorted_a[0] + 2.0 * PI - sorted_a[-1]
    breaks = np.flatnonzero(gaps > tol)
    if wrap_gap <= tol and breaks.size > 0:
        # rotate so the wraparound cluster is contiguous
        start = breaks[0] + 1
        sorted_a = np.concatenate([sorted_a[start:], sorted_a[:start] + 2.0 * PI])
        order = np.concatenate([order[start:], order[:start]])
        gaps = np.diff(sorted_a)
        breaks = np.flatnonzero(gaps > tol)
    out = np.empty_like(sorted_a)
    lo = 0
    for b in list(breaks) + [len(sorted_a) - 1]:
        mean = _circular_mean(sorted_a[lo : b + 1])
        out[lo : b + 1] = mean
        lo = b + 1
    result = np.empty_like(out)
    result[order] = out % (2.0 * PI)
    return result


def kakeya_extract(rects: Sequence[ApproxRect], cluster_tol: float = 1e-2) -> KakeyaSet:
    """Kakeya-set structure from a family of long approximating rectangles.

    Each rectangle must have h > 2 so at least one short side lies outside
    the unit ball; the extracted direction is the long-axis carrier signed
    toward an exiting side.  Directions within ``cluster_tol`` are snapped
    to their circular mean; base points are the long-axis points nearest
    the origin.
    """
    if not rects:
        raise ValueError("no rectangles given")
    bases = []
    raw_angles = []
    for r in rects:
        if r.h <= 2.0:
            raise NoExitError(f"rectangle for word {r.word} has h = {r.h:.3f} <= 2")
        u = r.long_axis()
        lo_side, hi_side = r.short_side_centers()
        u2 = np.array([-u[1], u[0]])

        def side_clears_ball(s_center: np.ndarray) -> bool:
            ends = np.stack([s_center - 0.5 * r.v * u2, s_center + 0.5 * r.v * u2])
            d = _segment_min_distance_to_origin(ends[0], ends[1])
            return d > 1.0

        hi_ok = side_clears_ball(hi_side)
        lo_ok = side_clears_ball(lo_side)
        if not hi_ok and not lo_ok:
            raise NoExitError(
                f"rectangle for word {r.word} has no short side clear of the ball"
            )
        sign = 1.0 if hi_ok else -1.0
        angle = math.atan2(sign * u[1], sign * u[0]) % (2.0 * PI)
        raw_angles.append(angle)
        t = float(np.clip(-(r.center @ u), -0.5 * r.h, 0.5 * r.h))
        bases.append(r.center + t * u)
    thetas = _cluster_angles(np.array(raw_angles), cluster_tol)
    return KakeyaSet(np.array(bases), thetas)


def _segment_min_distance_to_origin(a: np.ndarray, b: np.ndarray) -> float:
    d = b - a
    len2 = float(d @ d)
    if len2 == 0.0:
        return float(np.hypot(*a))
    t = float(np.clip(-(a @ d) / len2, 0.0, 1.0))
    p = a + t * d
    return float(np.hypot(*p))
