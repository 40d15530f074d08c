"""Domination diagnostics, invariant cones, orientation covers, distortion.

A cone is a proper closed interval in the projective line.  The checks
here are finite certificates: a passing verdict is certified up to the
tested depth, a failing cone search is not a disproof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BudgetError,
    ConeNotFoundError,
    ImproperConeError,
    NoConeError,
    NoGapError,
    budget_limit,
)
from .linalg2 import (
    Mat2,
    ProjLine,
    alpha_pair_of_stack,
    proj_apply,
    proj_distance,
    proj_signed_gap,
    singular_data,
)
from .symbolic import IFS, Word, cylinder, cyclic_prefix

PI = math.pi

# "strictly inside" margin for cone containment certificates
STRICT_MARGIN = 1e-9
# domination verdict threshold for the per-level ratio root
TAU_MIN_DEFAULT = 1.01
# exhaustive level enumeration cap (kappa^n words)
EXHAUSTIVE_WORDS = 1_000_000


@dataclass(frozen=True)
class Cone:
    """Closed angular interval [center - half_width, center + half_width] in P^1."""

    center: ProjLine
    half_width: float

    def __post_init__(self) -> None:
        if not 0.0 < self.half_width < PI / 2:
            raise ImproperConeError(
                f"half_width {self.half_width} outside (0, pi/2)"
            )

    @property
    def diameter(self) -> float:
        return 2.0 * self.half_width

    def endpoints(self) -> tuple[ProjLine, ProjLine]:
        return (
            ProjLine(self.center.angle - self.half_width),
            ProjLine(self.center.angle + self.half_width),
        )

    def contains_line(self, line: ProjLine, margin: float = 0.0) -> bool:
        return abs(proj_signed_gap(line, self.center)) <= self.half_width - margin

    def contains_cone(self, other: "Cone", margin: float = 0.0) -> bool:
        gap = abs(proj_signed_gap(other.center, self.center))
        return gap + other.half_width <= self.half_width - margin

    def line_distance(self, line: ProjLine) -> float:
        """Angular distance from a line to this interval (0 if inside)."""
        return max(0.0, abs(proj_signed_gap(line, self.center)) - self.half_width)


def cone_image(m: Mat2, cone: Cone) -> Cone:
    """Image interval of a cone under an invertible linear map.

    Projective maps are homeomorphisms of P^1, so the image of an interval
    is the arc between the endpoint images that contains the center image.
    """
    lo, hi = cone.endpoints()
    lo_i = proj_apply(m, lo)
    hi_i = proj_apply(m, hi)
    c_i = proj_apply(m, cone.center)
    d_lo = proj_signed_gap(lo_i, c_i)
    d_hi = proj_signed_gap(hi_i, c_i)
    if d_lo > d_hi:
        d_lo, d_hi = d_hi, d_lo
    center = ProjLine(c_i.angle + 0.5 * (d_lo + d_hi))
    half_width = 0.5 * (d_hi - d_lo)
    if half_width >= PI / 2:
        raise ImproperConeError("image interval spans at least a half turn")
    if half_width <= 0.0:
        half_width = 1e-15
    return Cone(center, half_width)


def cones_disjoint(a: Cone, b: Cone) -> bool:
    gap = proj_distance(a.center, b.center)
    return gap > a.half_width + b.half_width


def merge_cones(cones: list[Cone], tol: float = 1e-12) -> list[Cone]:
    """Merge overlapping/touching angular intervals on the circle of length pi."""
    if not cones:
        return []
    # normalize each interval's left endpoint into [0, pi)
    raw = []
    for c in cones:
        lo = (c.center.angle - c.half_width) % PI
        raw.append((lo, lo + c.diameter))
    raw.sort()
    merged: list[list[float]] = []
    for lo, hi in raw:
        if merged and lo <= merged[-1][1] + tol:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    # the last interval may spill past pi and absorb leading ones
    if len(merged) >= 2 and merged[-1][1] > PI:
        overhang = merged[-1][1] - PI
        while len(merged) >= 2 and merged[0][0] <= overhang + tol:
            overhang = max(overhang, merged[0][1])
            merged[-1][1] = PI + overhang
            merged.pop(0)
    out: list[Cone] = []
    for lo, hi in merged:
        if hi - lo >= PI - tol:
            raise ImproperConeError("merged intervals cover the projective line")
        out.append(Cone(ProjLine(0.5 * (lo + hi)), max(0.5 * (hi - lo), 1e-15)))
    out.sort(key=lambda c: c.center.angle)
    return out


# ---------------------------------------------------------------------------
# domination


@dataclass(frozen=True)
class DominationReport:
    """Per-level minima of (alpha1/alpha2)^(1/n), a fitted growth rate, verdict."""

    levels: tuple[int, ...]
    min_ratio_roots: tuple[float, ...]
    tau_estimate: float
    tau_min: float
    verdict: bool
    exhaustive_up_to: int
    sampled_words_per_level: int


def domination_report(
    ifs: IFS,
    n_max: int,
    tau_min: float = TAU_MIN_DEFAULT,
    samples: int = 4096,
    seed: int = 0,
    budget: int | None = None,
) -> DominationReport:
    """Minimum singular-value ratio root per word length.

    Levels with at most EXHAUSTIVE_WORDS words are enumerated exactly;
    deeper levels are probed with ``samples`` random words.  The verdict is
    true when every level's minimum n-th ratio root stays >= tau_min; a pass
    certifies domination only up to ``n_max``.  Determinants are tracked as
    exact factor products so the ratio alpha1/alpha2 = alpha1^2/|det| stays
    accurate at any depth.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    limit = budget_limit(budget)
    rng = np.random.default_rng(seed)
    lin = ifs.linear_stack()
    map_dets = np.array([f.linear.det for f in ifs.maps])
    kappa = ifs.kappa

    levels: list[int] = []
    roots: list[float] = []
    exhaustive_up_to = 0
    mats = np.eye(2)[None, :, :]
    dets = np.ones(1)
    exhaustive = True
    for n in range(1, n_max + 1):
        if exhaustive and mats.shape[0] * kappa <= min(EXHAUSTIVE_WORDS, limit):
            mats = np.einsum("nij,kjl->nkil", mats, lin).reshape(-1, 2, 2)
            dets = np.multiply.outer(dets, map_dets).reshape(-1)
            level_mats, level_dets = mats, dets
            exhaustive_up_to = n
        else:
            if exhaustive:
                exhaustive = False
            words = rng.integers(0, kappa, size=(samples, n))
            level_mats = np.broadcast_to(np.eye(2), (samples, 2, 2)).copy()
            level_dets = np.ones(samples)
            for k in range(n):
                level_mats = np.einsum("nij,njl->nil", level_mats, lin[words[:, k]])
                level_dets = level_dets * map_dets[words[:, k]]
        a1, a2 = alpha_pair_of_stack(level_mats, dets=level_dets)
        ratio = a1 / a2
        roots.append(float(np.min(ratio) ** (1.0 / n)))
        levels.append(n)

    # fit log(min ratio at level n) = n log(tau) + const
    log_min = np.array([n * math.log(max(r, 1e-300)) for r, n in zip(roots, levels)])
    if len(levels) >= 2:
        slope = np.polyfit(levels, log_min, 1)[0]
    else:
        slope = log_min[0]
    tau_est = float(math.exp(slope))
    verdict = all(r >= tau_min for r in roots)
    return DominationReport(
        tuple(levels),
        tuple(roots),
        tau_est,
        tau_min,
        verdict,
        exhaustive_up_to,
        0 if exhaustive else samples,
    )


# ---------------------------------------------------------------------------
# invariant cones


def _theta1_lines(ifs: IFS, depth: int, transpose: bool = False) -> list[ProjLine]:
    mats = np.eye(2)[None, :, :]
    lin = ifs.linear_stack()
    if transpose:
        lin = np.transpose(lin, (0, 2, 1))
    lines: list[ProjLine] = []
    for _ in range(depth):
        mats = np.einsum("nij,kjl->nkil", mats, lin).reshape(-1, 2, 2)
        if mats.shape[0] > 200_000:
            break
    for m in mats:
        lines.append(singular_data(Mat2.from_array(m)).theta1)
    return lines


def angular_hull(lines: list[ProjLine]) -> Cone:
    """Smallest projective interval containing the given lines.

    The hull is the complement of the largest gap between consecutive
    angles on the half-turn circle.
    """
    if not lines:
        raise ValueError("empty line set")
    angles = np.sort(np.array([l.angle for l in lines]))
    if angles.size == 1:
        return Cone(ProjLine(angles[0]), 1e-12)
    gaps = np.diff(angles)
    wrap = angles[0] + PI - angles[-1]
    k = int(np.argmax(gaps)) if gaps.size and gaps.max() > wrap else -1
    if k == -1:
        lo, hi = angles[0], angles[-1]
    else:
        lo, hi = angles[k + 1], angles[k] + PI
    hw = 0.5 * (hi - lo)
    if hw >= PI / 2:
        raise ImproperConeError("angular hull spans at least a half turn")
    return Cone(ProjLine(0.5 * (lo + hi)), max(hw, 1e-12))


def cone_is_invariant(ifs: IFS, x: Cone, margin: float = STRICT_MARGIN) -> bool:
    """A_i(X) and A_i^T(X) strictly inside X for every map."""
    try:
        for f in ifs.maps:
            if not x.contains_cone(cone_image(f.linear, x), margin):
                return False
            if not x.contains_cone(cone_image(f.linear.transpose, x), margin):
                return False
    except ImproperConeError:
        return False
    return True


def invariant_cone_search(ifs: IFS, depth: int) -> Cone:
    """Search for a cone X with A_i(X), A_i^T(X) strictly inside X.

    Seeds from the angular hull of depth-limited cylinder orientations
    (both for the maps and their transposes, since transpose invariance is
    part of the certificate), then inflates the hull until a candidate
    verifies or the cone stops being proper.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    lines = _theta1_lines(ifs, depth) + _theta1_lines(ifs, depth, transpose=True)
    try:
        hull = angular_hull(lines)
    except ImproperConeError:
        raise ConeNotFoundError("cylinder orientations span a half turn")
    for inflate in (1.1, 1.25, 1.5, 2.0, 3.0):
        hw = max(hull.half_width * inflate, 0.02 * inflate)
        if hw >= PI / 2 - 1e-9:
            continue
        candidate = Cone(hull.center, hw)
        if cone_is_invariant(ifs, candidate):
            return candidate
    raise ConeNotFoundError(f"no invariant cone certificate at depth {depth}")


@dataclass(frozen=True)
class SeparationReport:
    verdict: bool
    invariant: bool
    disjoint: bool
    witness: tuple[int, int] | None
    images: tuple[Cone, ...]


def strong_cone_separation_check(ifs: IFS, x: Cone) -> SeparationReport:
    """Check A_i(X), A_i^T(X) strictly inside X and pairwise disjoint images.

    The witness names the first overlapping (or touching) image pair on
    failure, 1-based.
    """
    invariant = cone_is_invariant(ifs, x)
    images = tuple(cone_image(f.linear, x) for f in ifs.maps)
    witness = None
    disjoint = True
    for i in range(len(images)):
        for j in range(i + 1, len(images)):
            if not cones_disjoint(images[i], images[j]):
                disjoint = False
                witness = (i + 1, j + 1)
                break
        if witness:
            break
    return SeparationReport(invariant and disjoint, invariant, disjoint, witness, images)


# ---------------------------------------------------------------------------
# orientation cover


def _normalize_projective_key(m: np.ndarray) -> bytes:
    n = m / np.linalg.norm(m)
    flat = n.ravel()
    idx = np.argmax(np.abs(flat) > 1e-13)
    if flat[idx] < 0:
        n = -n
    return np.round(n, 13).tobytes()


def default_cover_cone(ifs: IFS, depth: int = 6) -> Cone:
    """Seed cone from the angular hull of depth-limited orientations, +10%."""
    hull = angular_hull(_theta1_lines(ifs, depth))
    hw = min(max(hull.half_width * 1.1, 0.01), PI / 2 - 1e-6)
    return Cone(hull.center, hw)


def orientation_cover(
    ifs: IFS,
    eps: float,
    x: Cone | None = None,
    budget: int | None = None,
    check_domination: bool = True,
) -> list[Cone]:
    """Certified interval cover of the limit-orientation set.

    Refines the nested image intervals A_w(X) until every interval has
    angular diameter <= eps, then merges overlaps.  Projectively identical
    products are deduplicated, so self-similar direction dynamics (e.g.
    diagonal systems) refine in linear time.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    limit = budget_limit(budget)
    if x is None:
        x = default_cover_cone(ifs)
    else:
        forward_ok = True
        try:
            for f in ifs.maps:
                if not x.contains_cone(cone_image(f.linear, x), 0.0):
                    forward_ok = False
                    break
        except ImproperConeError:
            forward_ok = False
        if not forward_ok:
            raise NoConeError("cone is not forward invariant; cover not certified")
    if check_domination and not domination_report(ifs, 4).verdict:
        raise NoConeError("domination not verified at probe depth; cover not certified")
    if x.diameter <= eps:
        return [x]

    lin = [f.linear.as_array() for f in ifs.maps]
    active: dict[bytes, np.ndarray] = {}
    for m in lin:
        active.setdefault(_normalize_projective_key(m), m)
    finished: list[Cone] = []
    total = 0
    while active:
        next_active: dict[bytes, np.ndarray] = {}
        for m in active.values():
            img = cone_image(Mat2.from_array(m), x)
            if img.diameter <= eps:
                finished.append(img)
                continue
            for l in lin:
                child = m @ l
                next_active.setdefault(_normalize_projective_key(child), child)
        total += len(next_active)
        if total + len(finished) > limit:
            raise BudgetError(f"orientation cover exceeded budget {limit}")
        active = next_active
    return merge_cones(finished)


def limit_orientation(
    ifs: IFS,
    prefix: Word,
    n: int,
    cone: Cone | None = None,
) -> tuple[ProjLine, float]:
    """Orientation of the depth-n cylinder along prefix^infinity, with bound.

    The certified distance to the limit orientation is M * pi * alpha2/alpha1
    of the depth-n cylinder; without a cone certificate the bound degrades
    to the trivial pi/2.
    """
    word = cyclic_prefix(prefix if prefix else (1,), n)
    sd = cylinder(ifs, word).sdata
    if cone is None:
        try:
            cone = invariant_cone_search(ifs, depth=min(6, n))
        except ConeNotFoundError:
            return sd.theta1, PI / 2
    consts = distortion_constants(ifs, cone)
    bound = min(consts.M * PI * sd.alpha2 / sd.alpha1, PI / 2)
    return sd.theta1, bound


# ---------------------------------------------------------------------------
# distortion and porosity


@dataclass(frozen=True)
class DistortionConstants:
    """Angular separation of the weak singular directions from the cone, and
    the tangent bi-Lipschitz constant derived from it."""

    delta_sep: float
    M: float

    def __post_init__(self) -> None:
        if self.delta_sep <= 0:
            raise NoConeError("eta2 directions not separated from the cone")
        if self.M * self.delta_sep < PI - self.delta_sep - 1e-9:
            raise ValueError("M too small for the separation constraint")


def distortion_constants(ifs: IFS, x: Cone, probe_depth: int = 5) -> DistortionConstants:
    """delta_sep = min distance of eta2(w) lines from X over shallow words;
    M = max of the interval constraint (pi - d)/d and the tangent derivative
    bound sec^2(pi/2 - d/2)."""
    mats = np.eye(2)[None, :, :]
    lin = ifs.linear_stack()
    d_min = math.inf
    for _ in range(probe_depth):
        mats = np.einsum("nij,kjl->nkil", mats, lin).reshape(-1, 2, 2)
        for m in mats:
            sd = singular_data(Mat2.from_array(m))
            eta2_line = ProjLine(math.atan2(sd.eta2[1], sd.eta2[0]))
            d_min = min(d_min, x.line_distance(eta2_line))
        if mats.shape[0] > 50_000:
            break
    if not math.isfinite(d_min) or d_min <= 0:
        raise NoConeError("eta2 directions touch the cone; constants undefined")
    m_interval = (PI - d_min) / d_min
    m_tangent = 1.0 / math.sin(0.5 * d_min) ** 2
    return DistortionConstants(d_min, max(m_interval, m_tangent))


@dataclass(frozen=True)
class DistortionReport:
    constants: DistortionConstants
    word_length: int
    k0: int
    samples: int
    violations: int
    max_upper_excess: float
    max_lower_excess: float
    min_ratio: float
    max_ratio: float


def _max_image_diameter(ifs: IFS, x: Cone, depth: int) -> float:
    mats = np.eye(2)[None, :, :]
    lin = ifs.linear_stack()
    worst = 0.0
    for _ in range(depth):
        mats = np.einsum("nij,kjl->nkil", mats, lin).reshape(-1, 2, 2)
    for m in mats:
        worst = max(worst, cone_image(Mat2.from_array(m), x).diameter)
    return worst


def smallest_contraction_depth(ifs: IFS, x: Cone, delta_sep: float, depth_cap: int = 12) -> int:
    """First depth at which every image interval has diameter <= delta_sep."""
    for k in range(1, depth_cap + 1):
        if _max_image_diameter(ifs, x, k) <= delta_sep:
            return k
    return depth_cap


def distortion_check(
    ifs: IFS,
    x: Cone,
    samples: int = 10_000,
    word_length: int = 8,
    seed: int = 0,
) -> DistortionReport:
    """Sample the two-sided angular contraction sandwich on the cone.

    For random line pairs a, b in X and random words w of the given length,
    the angle between the images must lie between
    M^-1 (alpha2/alpha1) angle(a,b)   and   M^2 (alpha2/alpha1) angle(a,b).
    Report-only: violations are counted, never raised.
    """
    consts = distortion_constants(ifs, x)
    k0 = smallest_contraction_depth(ifs, x, consts.delta_sep)
    rng = np.random.default_rng(seed)
    lin = ifs.linear_stack()
    map_dets = np.array([f.linear.det for f in ifs.maps])
    kappa = ifs.kappa

    words = rng.integers(0, kappa, size=(samples, word_length))
    mats = np.broadcast_to(np.eye(2), (samples, 2, 2)).copy()
    dets = np.ones(samples)
    for k in range(word_length):
        mats = np.einsum("nij,njl->nil", mats, lin[words[:, k]])
        dets = dets * map_dets[words[:, k]]
    a1, a2 = alpha_pair_of_stack(mats, dets=dets)
    rho = a2 / a1

    ang_a = x.center.angle + rng.uniform(-x.half_width, x.half_width, samples)
    ang_b = x.center.angle + rng.uniform(-x.half_width, x.half_width, samples)
    va = np.stack([np.cos(ang_a), np.sin(ang_a)], axis=1)
    vb = np.stack([np.cos(ang_b), np.sin(ang_b)], axis=1)
    ia = np.einsum("nij,nj->ni", mats, va)
    ib = np.einsum("nij,nj->ni", mats, vb)

    def pair_angle(p, q):
        ta = np.arctan2(p[:, 1], p[:, 0]) % PI
        tb = np.arctan2(q[:, 1], q[:, 0]) % PI
        d = np.abs(ta - tb) % PI
        return np.minimum(d, PI - d)

    ang_in = pair_angle(va, vb)
    ang_out = pair_angle(ia, ib)
    nz = ang_in > 1e-13
    lower = rho[nz] * ang_in[nz] / consts.M
    upper = rho[nz] * ang_in[nz] * consts.M**2
    out = ang_out[nz]
    up_excess = np.maximum(out - upper, 0.0) / np.maximum(upper, 1e-300)
    lo_excess = np.maximum(lower - out, 0.0) / np.maximum(lower, 1e-300)
    violations = int(np.count_nonzero((up_excess > 1e-9) | (lo_excess > 1e-9)))
    ratios = out / ang_in[nz]
    return DistortionReport(
        consts,
        word_length,
        k0,
        samples,
        violations,
        float(up_excess.max(initial=0.0)),
        float(lo_excess.max(initial=0.0)),
        float(ratios.min(initial=math.inf)),
        float(ratios.max(initial=0.0)),
    )


def _level1_gaps(ifs: IFS, x: Cone) -> list[Cone]:
    """Gap intervals between consecutive level-1 image intervals inside X."""
    images = [cone_image(f.linear, x) for f in ifs.maps]
    if len(images) < 2:
        raise NoGapError("a single map produces a single interval")
    spans = sorted(
        (img.center.angle - img.half_width, img.center.angle + img.half_width)
        for img in images
    )
    gaps: list[Cone] = []
    for (lo1, hi1), (lo2, hi2) in zip(spans, spans[1:]):
        if lo2 > hi1 + 1e-12:
            gaps.append(Cone(ProjLine(0.5 * (hi1 + lo2)), 0.5 * (lo2 - hi1)))
    if not gaps:
        raise NoGapError("level-1 image intervals touch or overlap")
    return gaps


def porosity_gap_levels(ifs: IFS, x: Cone, depth: int) -> list[float]:
    """Per-level minimum of diam(A_w(I)) / diam(A_w(X)) for the widest
    level-1 gap I, over deduplicated words w of each length 1..depth."""
    gaps = _level1_gaps(ifs, x)
    widest = max(gaps, key=lambda g: g.half_width)
    lin = [f.linear.as_array() for f in ifs.maps]
    active: dict[bytes, np.ndarray] = {_normalize_projective_key(np.eye(2)): np.eye(2)}
    out: list[float] = []
    for _ in range(depth):
        next_active: dict[bytes, np.ndarray] = {}
        for m in active.values():
            for l in lin:
                child = m @ l
                next_active.setdefault(_normalize_projective_key(child), child)
        if len(next_active) > 100_000:
            raise BudgetError("porosity refinement too wide; reduce depth")
        level_min = math.inf
        for m in next_active.values():
            mm = Mat2.from_array(m)
            g = cone_image(mm, widest).diameter
            s = cone_image(mm, x).diameter
            level_min = min(level_min, g / s)
        out.append(level_min)
        active = next_active
    return out


def porosity_gap(ifs: IFS, x: Cone, depth: int) -> float:
    """Measured minimum relative gap over levels 1..depth (positive if the
    level-1 images are separated; NoGap otherwise)."""
    levels = porosity_gap_levels(ifs, x, depth)
    val = min(levels)
    if val <= 0:
        raise NoGapError("relative gap vanished during refinement")
    return val
