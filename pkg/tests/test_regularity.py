import math

import numpy as np
import pytest

from affinevis.errors import (
    ConeNotFoundError,
    ImproperConeError,
    NoConeError,
    NoGapError,
)
from affinevis.linalg2 import Mat2, ProjLine, proj_apply, proj_distance
from affinevis.regularity import (
    Cone,
    cone_image,
    cones_disjoint,
    distortion_check,
    distortion_constants,
    domination_report,
    invariant_cone_search,
    limit_orientation,
    merge_cones,
    orientation_cover,
    porosity_gap,
    porosity_gap_levels,
    strong_cone_separation_check,
)
from affinevis.symbolic import cylinder

VERTICAL = ProjLine(math.pi / 2)
QUADRANT_MARGIN = Cone(ProjLine(math.pi / 4), math.pi / 4 - 0.05)


class TestCone:
    def test_improper_rejected(self):
        with pytest.raises(ImproperConeError):
            Cone(ProjLine(0.0), math.pi / 2)
        with pytest.raises(ImproperConeError):
            Cone(ProjLine(0.0), 0.0)

    def test_contains_across_wrap(self):
        c = Cone(ProjLine(0.05), 0.2)
        assert c.contains_line(ProjLine(math.pi - 0.05))
        assert not c.contains_line(ProjLine(0.5))

    def test_image_under_diagonal(self):
        # diag(1/3, 1/2) pulls lines toward the vertical: tan of the angle
        # from vertical contracts by 2/3
        x = Cone(VERTICAL, 0.3)
        img = cone_image(Mat2.diag(1.0 / 3.0, 0.5), x)
        expected_hw = math.atan(2.0 / 3.0 * math.tan(0.3))
        assert img.center.angle == pytest.approx(math.pi / 2)
        assert img.half_width == pytest.approx(expected_hw, rel=1e-9)

    def test_merge_cones_wraparound(self):
        a = Cone(ProjLine(0.05), 0.1)
        b = Cone(ProjLine(math.pi - 0.04), 0.1)
        merged = merge_cones([a, b])
        assert len(merged) == 1
        assert merged[0].contains_line(ProjLine(0.0))

    def test_merge_keeps_disjoint(self):
        a = Cone(ProjLine(0.3), 0.05)
        b = Cone(ProjLine(1.2), 0.05)
        assert len(merge_cones([a, b])) == 2


class TestDomination:
    def test_carpet_exact_tau(self, carpet):
        rep = domination_report(carpet, 6)
        assert rep.verdict
        assert rep.exhaustive_up_to == 6
        for root in rep.min_ratio_roots:
            assert root == pytest.approx(1.5, rel=1e-9)
        assert rep.tau_estimate == pytest.approx(1.5, rel=1e-6)

    def test_rotation_pair_fails(self, rotation_pair):
        # brute force over all words up to length 6: a quarter turn swaps the
        # expanding axis, so some product becomes near-conformal
        rep = domination_report(rotation_pair, 6)
        assert not rep.verdict

    def test_duplicated_single_map(self):
        from affinevis.linalg2 import AffineMap2

        lin = Mat2.diag(1.0 / 3.0, 0.5)
        ifs = type(
            "x", (), {}
        )  # placeholder to appease linters; construct the real one below
        from affinevis.symbolic import IFS

        ifs = IFS(
            (AffineMap2(lin, (0.0, 0.0)), AffineMap2(lin, (0.5, 0.5)))
        )
        rep = domination_report(ifs, 5)
        assert rep.verdict
        assert rep.tau_estimate == pytest.approx(1.5, rel=1e-6)

    def test_positive_pair_dominates(self, positive_pair):
        rep = domination_report(positive_pair, 8)
        assert rep.verdict
        assert rep.tau_estimate > 2.0

    def test_verdict_monotone_in_depth(self, carpet, rotation_pair):
        # a failing verdict never recovers at larger n_max; a passing one
        # only certifies the levels it saw
        for n_lo, n_hi in [(3, 6), (4, 7)]:
            assert domination_report(carpet, n_lo).verdict
            assert domination_report(carpet, n_hi).verdict
            if not domination_report(rotation_pair, n_lo).verdict:
                assert not domination_report(rotation_pair, n_hi).verdict


class TestInvariantCone:
    def test_carpet_vertical_cone(self, carpet):
        cone = invariant_cone_search(carpet, depth=4)
        assert proj_distance(cone.center, VERTICAL) < 0.2
        # the classical wide cone verifies as well
        wide = Cone(VERTICAL, math.pi / 4)
        for f in carpet.maps:
            assert wide.contains_cone(cone_image(f.linear, wide), 1e-9)

    def test_positive_pair_found(self, positive_pair):
        cone = invariant_cone_search(positive_pair, depth=6)
        rep = strong_cone_separation_check(positive_pair, cone)
        assert rep.invariant

    def test_rotation_pair_not_found(self, rotation_pair):
        with pytest.raises(ConeNotFoundError):
            invariant_cone_search(rotation_pair, depth=4)


class TestStrongConeSeparation:
    def test_carpet_identical_images_fail(self, carpet):
        rep = strong_cone_separation_check(carpet, Cone(VERTICAL, 0.3))
        assert rep.invariant
        assert not rep.disjoint
        assert rep.witness == (1, 2)
        assert not rep.verdict

    def test_positive_pair_passes(self, positive_pair):
        cone = invariant_cone_search(positive_pair, depth=6)
        rep = strong_cone_separation_check(positive_pair, cone)
        assert rep.verdict, rep
        assert rep.witness is None
        assert cones_disjoint(rep.images[0], rep.images[1])

    def test_quadrant_cone_images_touch(self, positive_pair):
        # both maps send the vertical boundary line to the same image line,
        # so the margin-shrunk quadrant still fails disjointness
        rep = strong_cone_separation_check(positive_pair, QUADRANT_MARGIN)
        assert rep.invariant
        assert not rep.disjoint

    def test_improper_cone_rejected(self):
        with pytest.raises(ImproperConeError):
            Cone(ProjLine(math.pi / 4), math.pi / 2)


class TestOrientationCover:
    def test_carpet_cover_is_single_vertical_interval(self, carpet):
        cover = orientation_cover(carpet, eps=1e-3)
        assert len(cover) == 1
        assert cover[0].contains_line(VERTICAL)
        assert cover[0].diameter <= 1e-3

    def test_positive_pair_cover_splits(self, positive_pair):
        cone = invariant_cone_search(positive_pair, depth=6)
        cover = orientation_cover(positive_pair, eps=1e-2, x=cone)
        assert len(cover) >= 2
        for a, b in zip(cover, cover[1:]):
            assert cones_disjoint(a, b)

    def test_eps_wider_than_cone(self, positive_pair):
        cone = invariant_cone_search(positive_pair, depth=6)
        cover = orientation_cover(positive_pair, eps=2 * math.pi, x=cone)
        assert cover == [cone]

    def test_non_invariant_cone_rejected(self, positive_pair):
        bad = Cone(ProjLine(2.5), 0.1)
        with pytest.raises(NoConeError):
            orientation_cover(positive_pair, eps=0.1, x=bad)

    def test_budget_enforced(self, positive_pair):
        from affinevis.errors import BudgetError

        cone = invariant_cone_search(positive_pair, depth=6)
        with pytest.raises(BudgetError):
            orientation_cover(positive_pair, eps=1e-7, x=cone, budget=64)

    def test_cover_nesting_across_eps(self, positive_pair):
        cone = invariant_cone_search(positive_pair, depth=6)
        coarse = orientation_cover(positive_pair, eps=5e-2, x=cone)
        fine = orientation_cover(positive_pair, eps=5e-3, x=cone)
        for c in fine:
            assert any(
                big.contains_cone(c, -1e-9) or big.contains_line(c.center)
                for big in coarse
            )

    def test_theta1_inside_cover(self, positive_pair):
        cone = invariant_cone_search(positive_pair, depth=6)
        cover = orientation_cover(positive_pair, eps=1e-2, x=cone)
        for word in [(1,), (2,), (1, 2), (2, 1), (1, 1, 2, 2), (2, 2, 1, 1)]:
            theta, _ = limit_orientation(positive_pair, word, 14, cone=cone)
            assert any(c.contains_line(theta, -1e-6) for c in cover)


class TestLimitOrientation:
    def test_carpet_exact_vertical(self, carpet):
        for n in (1, 4, 9):
            theta, bound = limit_orientation(carpet, (1, 2, 3), n)
            assert theta.angle == pytest.approx(math.pi / 2)
            assert bound >= 0

    def test_invariance_relation(self, positive_pair):
        # pushing the limit orientation of j through A_w approximates the
        # limit orientation of the concatenated word
        from affinevis.symbolic import cyclic_prefix

        cone = invariant_cone_search(positive_pair, depth=6)
        w = (2, 1)
        j = (1, 2)
        n = 14
        theta_j, bound_j = limit_orientation(positive_pair, j, n, cone=cone)
        word_wj = w + cyclic_prefix(j, n)
        cyl_wj = cylinder(positive_pair, word_wj)
        theta_wj = cyl_wj.sdata.theta1
        bound_wj = 0.0  # direct cylinder orientation, no extra truncation
        cyl_w = cylinder(positive_pair, w)
        pushed = proj_apply(cyl_w.map.linear, theta_j)
        # the projective action of A_w stretches angles by at most its
        # singular ratio, so the finite-depth discrepancy is controlled
        lipschitz_w = cyl_w.sdata.ratio
        assert (
            proj_distance(pushed, theta_wj)
            <= lipschitz_w * bound_j + bound_wj + 1e-12
        )

    def test_drift_within_bound(self, positive_pair):
        cone = invariant_cone_search(positive_pair, depth=6)
        theta_12, bound_12 = limit_orientation(positive_pair, (1,), 12, cone=cone)
        theta_24, _ = limit_orientation(positive_pair, (1,), 24, cone=cone)
        assert proj_distance(theta_12, theta_24) <= bound_12


class TestDistortion:
    def test_constants_satisfy_interval_constraint(self, positive_pair):
        cone = invariant_cone_search(positive_pair, depth=6)
        consts = distortion_constants(positive_pair, cone)
        assert consts.delta_sep > 0
        assert consts.M * consts.delta_sep >= math.pi - consts.delta_sep - 1e-9

    def test_equal_lines_give_zero(self, positive_pair):
        cone = invariant_cone_search(positive_pair, depth=6)
        m = cylinder(positive_pair, (1, 2, 1)).map.linear
        l = ProjLine(cone.center.angle + 0.01)
        assert proj_distance(proj_apply(m, l), proj_apply(m, l)) == 0.0

    def test_positive_pair_no_violations(self, positive_pair):
        cone = invariant_cone_search(positive_pair, depth=6)
        rep = distortion_check(positive_pair, cone, samples=10_000, word_length=8)
        assert rep.violations == 0
        assert rep.k0 >= 1

    def test_carpet_sandwich_on_vertical_cone(self, carpet):
        # separation fails for the carpet, but the two-sided bound is still
        # measurable on the invariant vertical cone: the tangent contraction
        # factor is exactly (2/3)^n
        cone = Cone(VERTICAL, 0.3)
        n = 5
        rep = distortion_check(carpet, cone, samples=2000, word_length=n, seed=1)
        consts = rep.constants
        ratio = (2.0 / 3.0) ** n
        assert rep.min_ratio >= ratio / consts.M - 1e-12
        assert rep.max_ratio <= ratio * consts.M**2 + 1e-12
        assert rep.violations == 0


class TestPorosity:
    def test_positive_pair_gap_stable(self, positive_pair):
        cone = invariant_cone_search(positive_pair, depth=6)
        levels = porosity_gap_levels(positive_pair, cone, depth=6)
        assert len(levels) == 6
        assert min(levels) > 0
        consts = distortion_constants(positive_pair, cone)
        assert max(levels) / min(levels) <= consts.M**3

    def test_carpet_no_gap(self, carpet):
        with pytest.raises(NoGapError):
            porosity_gap(carpet, Cone(VERTICAL, 0.3), depth=3)

    def test_single_map_no_gap(self, single_map):
        with pytest.raises(NoGapError):
            porosity_gap(single_map, Cone(VERTICAL, 0.3), depth=2)
