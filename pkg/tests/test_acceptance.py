"""Acceptance battery: every numbered criterion prints one PASS/FAIL line.

Scenario-bound criteria run through the same assertion suites the CLI
``scenario run`` command executes, with fixed seeds; the oracle and
envelope criteria are seeded property suites.
"""

import math

import numpy as np
import pytest

from affinevis.linalg2 import Direction
from affinevis.runner import run_scenario
from affinevis.symbolic import PointCloud
from affinevis.visibility import (
    KakeyaSet,
    rasterize,
    visible_bruteforce,
    visible_envelope,
    visible_sweep,
)


@pytest.fixture(scope="module")
def carpet_report():
    return run_scenario("carpet-5.1", seed=0)


@pytest.fixture(scope="module")
def harmonic_report():
    return run_scenario("harmonic-5.2", seed=0)


@pytest.fixture(scope="module")
def positive_report():
    return run_scenario("positive-cone", seed=0)


def _verdict(report, names):
    entries = {a["name"]: a for a in report.assertions}
    missing = [n for n in names if n not in entries]
    assert not missing, f"missing assertions: {missing}"
    passed = all(entries[n]["passed"] for n in names)
    detail = "; ".join(entries[n]["detail"] for n in names)
    return passed, detail


def _announce(capsys, label, passed, detail):
    with capsys.disabled():
        print(f"\n{label}: {'PASS' if passed else 'FAIL'} - {detail}")


def test_criterion_1_visible_dimension_off_vertical(carpet_report, capsys):
    passed, detail = _verdict(carpet_report, ["visible-dimension-off-vertical"])
    _announce(capsys, "CRITERION 1 (visible dimension off the exceptional carrier)", passed, detail)
    assert passed, detail


def test_criterion_2_sharpness_at_exceptional_direction(carpet_report, capsys):
    passed, detail = _verdict(carpet_report, ["exceptional-direction-sharpness"])
    _announce(capsys, "CRITERION 2 (sharpness at the exceptional direction)", passed, detail)
    assert passed, detail


def test_criterion_3_tangent_visibility_collapse(carpet_report, capsys):
    passed, detail = _verdict(carpet_report, ["tangent-visibility-collapse"])
    _announce(capsys, "CRITERION 3 (tangent visibility collapse)", passed, detail)
    assert passed, detail


def test_criterion_4_harmonic_counterexample(harmonic_report, capsys):
    passed, detail = _verdict(
        harmonic_report,
        ["product-count-matches-gap-scaling", "generic-direction-keeps-countable-set"],
    )
    _announce(capsys, "CRITERION 4 (harmonic product counterexample)", passed, detail)
    assert passed, detail


def test_criterion_5_oracle_equivalence(capsys):
    rng = np.random.default_rng(20240)
    delta = 2.0**-6
    mismatches = 0
    for _ in range(100):
        n_cells = int(rng.integers(5, 2000))
        cells = np.unique(rng.integers(-64, 64, size=(n_cells, 2)), axis=0)
        cloud = PointCloud((cells + 0.5) * delta, delta)
        e = Direction(rng.uniform(0.0, 2.0 * math.pi))
        grid = rasterize(cloud, delta)
        got = sorted(map(tuple, visible_sweep(grid, e).centers()))
        want = sorted(map(tuple, visible_bruteforce(cloud, e, delta).points))
        if not (len(got) == len(want) and np.allclose(got, want, rtol=0, atol=0)):
            mismatches += 1
    passed = mismatches == 0
    detail = f"100 snapped clouds, random directions: {mismatches} mismatches"
    _announce(capsys, "CRITERION 5 (sweep equals brute-force oracle)", passed, detail)
    assert passed, detail


def test_criterion_6_orientation_set_and_cones(carpet_report, positive_report, capsys):
    ok1, d1 = _verdict(carpet_report, ["orientation-cover-singleton"])
    ok2, d2 = _verdict(
        positive_report,
        ["strong-cone-separation", "bounded-distortion-sandwich", "porosity-gap-stability"],
    )
    passed = ok1 and ok2
    detail = f"{d1}; {d2}"
    _announce(capsys, "CRITERION 6 (orientation set and cones)", passed, detail)
    assert passed, detail


def test_criterion_7_structure_lemmas(carpet_report, positive_report, capsys):
    ok1, d1 = _verdict(
        carpet_report, ["tangent-rectangle-trends", "kakeya-directions-in-cover"]
    )
    ok2, d2 = _verdict(
        positive_report, ["tangent-rectangle-trends", "kakeya-directions-in-cover"]
    )
    passed = ok1 and ok2
    detail = f"carpet: {d1} | positive-cone: {d2}"
    _announce(capsys, "CRITERION 7 (tangent structure)", passed, detail)
    assert passed, detail


def test_criterion_8_envelope_properties(capsys):
    rng = np.random.default_rng(808)
    down = Direction(-math.pi / 2)
    worst = -math.inf
    total_jumps = 0
    for _ in range(50):
        n = int(rng.integers(2, 40))
        bases = rng.uniform(-0.8, 0.8, size=(n, 2))
        thetas = []
        while len(thetas) < n:
            t = rng.uniform(0.0, 2.0 * math.pi)
            if abs(math.cos(t)) >= math.sin(0.35):
                thetas.append(t)
        k = KakeyaSet(bases, np.array(thetas))
        envs, exceptional = visible_envelope(k, down)
        assert len(exceptional) == len(set(exceptional))
        total_jumps += len(exceptional)
        for env in envs:
            worst = max(worst, env.max_violation())
    passed = worst <= 1e-9
    detail = (
        f"50 random Kakeya sets: worst semi-monotonicity violation {worst:.2e}, "
        f"{total_jumps} exceptional abscissas (finite)"
    )
    _announce(capsys, "CRITERION 8 (envelope semi-monotonicity)", passed, detail)
    assert passed, detail
