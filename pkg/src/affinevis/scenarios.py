"""Built-in study configurations and IFS config-file loading.

Three scenarios ship with the tool:

* ``carpet-5.1``      - a three-map carpet with one exceptional orientation;
* ``harmonic-5.2``    - the harmonic-sum product set, a countable compact
  set with full box dimension whose visible part stays large;
* ``positive-cone``   - a positive-matrix pair with separated invariant
  cones, exercising the cone, distortion and porosity machinery.

Expected values carry a source label: "closed-form" (evaluates from an
exact formula), "known-value" (established in the literature for this
construction), or "measured" (frozen from this tool's own reference runs).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError, UnknownScenarioError
from .linalg2 import AffineMap2, Mat2
from .symbolic import IFS, PointCloud

LOG32 = math.log(2.0) / math.log(3.0)


@dataclass(frozen=True)
class ExpectedValue:
    name: str
    value: float
    source: str
    note: str = ""


@dataclass(frozen=True)
class ScenarioSpec:
    """A named configuration with its expected values and default knobs."""

    name: str
    kind: str  # "ifs" or "pointset"
    description: str
    expected: tuple[ExpectedValue, ...]
    defaults: dict = field(default_factory=dict)

    def build_ifs(self) -> IFS:
        if self.kind != "ifs":
            raise ValueError(f"scenario {self.name} is not IFS-backed")
        return _BUILDERS[self.name]()

    def expected_value(self, name: str) -> float:
        for ev in self.expected:
            if ev.name == name:
                return ev.value
        raise KeyError(name)


def carpet_ifs() -> IFS:
    lin = Mat2.diag(1.0 / 3.0, 0.5)
    return IFS(
        (
            AffineMap2(lin, (0.0, 0.0)),
            AffineMap2(lin, (1.0 / 3.0, 0.5)),
            AffineMap2(lin, (2.0 / 3.0, 0.0)),
        )
    )


def positive_cone_ifs() -> IFS:
    b1 = Mat2(2.0 / 5.0, 1.0 / 5.0, 1.0 / 5.0, 1.0 / 5.0)
    b2 = Mat2(3.0 / 5.0, 1.0 / 5.0, 2.0 / 5.0, 1.0 / 5.0)
    return IFS((AffineMap2(b1, (0.0, 0.0)), AffineMap2(b2, (0.5, 0.25))))


_BUILDERS = {"carpet-5.1": carpet_ifs, "positive-cone": positive_cone_ifs}

_SCENARIOS = {
    "carpet-5.1": ScenarioSpec(
        name="carpet-5.1",
        kind="ifs",
        description="three-map carpet, linear part diag(1/3, 1/2); the only "
        "exceptional orientation is vertical",
        expected=(
            ExpectedValue(
                "hausdorff_dimension",
                math.log2(2.0**LOG32 + 1.0),
                "known-value",
                "log2(2^log3(2) + 1)",
            ),
            ExpectedValue(
                "assouad_dimension", 1.0 + LOG32, "known-value", "1 + log3(2)"
            ),
            ExpectedValue(
                "box_dimension",
                1.0 + math.log(1.5) / math.log(3.0),
                "closed-form",
                "1 + log3(3/2), uniform bottom-row fibers",
            ),
            ExpectedValue(
                "visible_slope", 1.0, "known-value", "off the vertical carrier"
            ),
            ExpectedValue(
                "exceptional_angle", math.pi / 2, "closed-form", "vertical carrier"
            ),
            ExpectedValue(
                "tangent_collapse_slope",
                LOG32,
                "closed-form",
                "downward visible part of the Cantor-cross tangent",
            ),
        ),
        defaults={"delta": 2.0**-12, "ladder": (6, 12), "depth": 5},
    ),
    "harmonic-5.2": ScenarioSpec(
        name="harmonic-5.2",
        kind="pointset",
        description="A = {0} united with reciprocals of harmonic partial sums; "
        "K = A x A is countable and compact with full box dimension",
        expected=(
            ExpectedValue("box_dimension_A", 1.0, "known-value"),
            ExpectedValue("box_dimension_K", 2.0, "known-value"),
        ),
        defaults={"count_levels": (100, 1000, 10000), "sample_side": 70},
    ),
    "positive-cone": ScenarioSpec(
        name="positive-cone",
        kind="ifs",
        description="two positive matrices (scaled by 1/5) with disjoint "
        "cone images inside a common invariant cone",
        expected=(
            ExpectedValue("domination", 1.0, "measured", "verdict true, tau ~ 6.8"),
            ExpectedValue("separation", 1.0, "measured", "disjoint cone images"),
        ),
        defaults={"cone_depth": 6, "distortion_samples": 10_000, "word_length": 8},
    ),
}


def scenario_names() -> list[str]:
    return sorted(_SCENARIOS)


def scenario(name: str) -> ScenarioSpec:
    try:
        return _SCENARIOS[name]
    except KeyError:
        raise UnknownScenarioError(
            f"unknown scenario {name!r}; available: {', '.join(scenario_names())}"
        )


# ---------------------------------------------------------------------------
# harmonic-sum point set


def harmonic_sums(n: int) -> np.ndarray:
    """Partial sums 1 + 1/2 + ... + 1/k for k = 1..n."""
    return np.cumsum(1.0 / np.arange(1, n + 1))


def harmonic_gap(n: int) -> float:
    """Gap between consecutive reciprocal sums at index n."""
    s = harmonic_sums(n + 1)
    return float(1.0 / s[n - 1] - 1.0 / s[n])


def harmonic_points(k_max: int) -> np.ndarray:
    """{0} and the reciprocal partial sums down to index k_max, on the line."""
    s = harmonic_sums(k_max)
    return np.concatenate([[0.0], 1.0 / s[::-1]])


def harmonic_cell_count_1d(n: int, delta: float | None = None) -> int:
    """Exact count of occupied delta-cells for the full (infinite) set.

    At delta = gap(n), every cell of [0, 1/S_n] is occupied because the tail
    gaps are smaller than the cells; the finitely many points above 1/S_n
    contribute their own cells.  This sidesteps the impossibility of
    enumerating the tail (reaching 1/S_k < delta needs k ~ exp(1/delta)).
    """
    s = harmonic_sums(n + 1)
    if delta is None:
        delta = float(1.0 / s[n - 1] - 1.0 / s[n])
    base_max = int(math.floor((1.0 / s[n - 1]) / delta))
    heads = np.floor((1.0 / s[: n - 1]) / delta).astype(np.int64)
    extra = np.unique(heads[heads > base_max]).size
    return base_max + 1 + extra


def harmonic_product_count(n: int, delta: float | None = None) -> int:
    """Occupied-cell count of the product set at scale delta: the grid of a
    product is the product of the grids, so the count is the square."""
    c = harmonic_cell_count_1d(n, delta)
    return c * c


def harmonic_product_sample(side: int = 70) -> PointCloud:
    """Finite sample of the product set: pair grid plus both axes."""
    s = harmonic_sums(side)
    a = np.concatenate([[0.0], 1.0 / s])
    xx, yy = np.meshgrid(a, a)
    pts = np.stack([xx.ravel(), yy.ravel()], axis=1)
    return PointCloud(pts, 1e-9)


def cantor_cross_segment(depth: int = 8) -> PointCloud:
    """Net of C x [0, 1] at resolution 3^-depth, C the middle-thirds set."""
    xs = np.array([0.0])
    for _ in range(depth):
        xs = np.concatenate([xs / 3.0, xs / 3.0 + 2.0 / 3.0])
    step = 3.0**-depth
    ys = np.arange(0.0, 1.0 + step / 2, step)
    xx, yy = np.meshgrid(np.sort(xs), ys)
    pts = np.stack([xx.ravel(), yy.ravel()], axis=1)
    return PointCloud(pts, step)


# ---------------------------------------------------------------------------
# config files


def load_ifs(path: str | Path) -> IFS:
    """Parse {"maps": [{"a": [[a11, a12], [a21, a22]], "t": [tx, ty]}, ...]}.

    Matrices are row-major; entries are plain JSON numbers.  Raises
    ParseError for malformed files, SingularInput for non-invertible linear
    parts, NotContractive for maps with alpha1 >= 1.
    """
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read IFS config {path}: {exc}") from exc
    if not isinstance(payload, dict) or "maps" not in payload:
        raise ParseError(f"{path}: expected an object with a 'maps' array")
    entries = payload["maps"]
    if not isinstance(entries, list) or not entries:
        raise ParseError(f"{path}: 'maps' must be a non-empty array")
    maps = []
    for k, entry in enumerate(entries):
        try:
            a = entry["a"]
            t = entry["t"]
            lin = Mat2(
                float(a[0][0]), float(a[0][1]), float(a[1][0]), float(a[1][1])
            )
            tr = (float(t[0]), float(t[1]))
        except (KeyError, TypeError, IndexError, ValueError) as exc:
            raise ParseError(f"{path}: map {k}: {exc}") from exc
        maps.append(AffineMap2(lin, tr))
    # IFS validation raises SingularInput / NotContractive as appropriate
    return IFS(tuple(maps))
