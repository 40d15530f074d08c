import json
import math

import numpy as np
import pytest

from affinevis.errors import (
    NotContractiveError,
    ParseError,
    SingularInputError,
    UnknownScenarioError,
)
from affinevis.scenarios import (
    cantor_cross_segment,
    harmonic_cell_count_1d,
    harmonic_gap,
    harmonic_points,
    harmonic_product_count,
    harmonic_product_sample,
    harmonic_sums,
    load_ifs,
    scenario,
    scenario_names,
)

LOG32 = math.log(2) / math.log(3)


class TestScenarioRegistry:
    def test_names(self):
        assert scenario_names() == ["carpet-5.1", "harmonic-5.2", "positive-cone"]

    def test_unknown(self):
        with pytest.raises(UnknownScenarioError):
            scenario("nope")

    def test_carpet_maps(self):
        ifs = scenario("carpet-5.1").build_ifs()
        assert ifs.kappa == 3
        for f in ifs.maps:
            assert f.linear.as_array() == pytest.approx(np.diag([1 / 3, 1 / 2]))

    def test_carpet_expected_values(self):
        spec = scenario("carpet-5.1")
        assert spec.expected_value("hausdorff_dimension") == pytest.approx(
            math.log2(2.0**LOG32 + 1.0)
        )
        assert spec.expected_value("hausdorff_dimension") == pytest.approx(1.3497, abs=1e-4)
        assert spec.expected_value("assouad_dimension") == pytest.approx(1.6309, abs=1e-4)
        assert spec.expected_value("box_dimension") == pytest.approx(1.3691, abs=1e-4)

    def test_harmonic_expected(self):
        spec = scenario("harmonic-5.2")
        assert spec.expected_value("box_dimension_A") == 1.0
        assert spec.expected_value("box_dimension_K") == 2.0

    def test_sources_labeled(self):
        for name in scenario_names():
            for ev in scenario(name).expected:
                assert ev.source in {"closed-form", "known-value", "measured"}


class TestHarmonicSet:
    def test_sums(self):
        s = harmonic_sums(4)
        assert s[-1] == pytest.approx(1 + 0.5 + 1 / 3 + 0.25)

    def test_points_sorted_with_zero(self):
        pts = harmonic_points(50)
        assert pts[0] == 0.0
        assert np.all(np.diff(pts) > 0)
        assert pts[-1] == 1.0

    @pytest.mark.parametrize("n", [100, 1000, 10_000])
    def test_cell_count_tracks_gap_scaling(self, n):
        s = harmonic_sums(n + 1)
        dn = harmonic_gap(n)
        target = (1.0 / dn) * (1.0 / s[n - 1])
        count = harmonic_cell_count_1d(n)
        assert target / 4 <= count <= target * 4

    def test_product_count_is_square(self):
        assert harmonic_product_count(100) == harmonic_cell_count_1d(100) ** 2

    def test_truncated_enumeration_agrees_where_it_can(self):
        # direct enumeration of the truncated set matches the analytic count
        # once the truncation covers the whole gap range
        n = 100
        dn = harmonic_gap(n)
        k_max = 200_000
        pts = harmonic_points(k_max)
        cells = np.unique(np.floor(pts / dn + 1e-9).astype(np.int64))
        analytic = harmonic_cell_count_1d(n)
        # truncation misses only cells below 1/S_kmax
        s_kmax = harmonic_sums(k_max)[-1]
        missing_bound = (1.0 / s_kmax) / dn + 1
        assert analytic - cells.size <= missing_bound

    def test_sample_contains_axes(self):
        cloud = harmonic_product_sample(30)
        pts = cloud.points
        assert (pts[:, 0] == 0).sum() == 31
        assert len(cloud) == 31 * 31


class TestCantorCross:
    def test_shape(self):
        cloud = cantor_cross_segment(4)
        xs = np.unique(cloud.points[:, 0])
        assert xs.size == 16
        ys = np.unique(cloud.points[:, 1])
        assert ys.size == 3**4 + 1


class TestLoadIFS(object):
    def write(self, tmp_path, payload):
        p = tmp_path / "ifs.json"
        p.write_text(json.dumps(payload))
        return p

    def test_carpet_roundtrip(self, tmp_path):
        cfg = {
            "maps": [
                {"a": [[1 / 3, 0.0], [0.0, 0.5]], "t": [0.0, 0.0]},
                {"a": [[1 / 3, 0.0], [0.0, 0.5]], "t": [1 / 3, 0.5]},
                {"a": [[1 / 3, 0.0], [0.0, 0.5]], "t": [2 / 3, 0.0]},
            ]
        }
        ifs = load_ifs(self.write(tmp_path, cfg))
        assert ifs.kappa == 3
        assert ifs.maps[2].translation == pytest.approx((2 / 3, 0.0))

    def test_singular_rejected(self, tmp_path):
        cfg = {"maps": [{"a": [[0.5, 0.5], [0.5, 0.5]], "t": [0, 0]}]}
        with pytest.raises(SingularInputError):
            load_ifs(self.write(tmp_path, cfg))

    def test_expansive_rejected(self, tmp_path):
        cfg = {"maps": [{"a": [[1.2, 0.0], [0.0, 0.5]], "t": [0, 0]}]}
        with pytest.raises(NotContractiveError):
            load_ifs(self.write(tmp_path, cfg))

    def test_malformed_rejected(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        with pytest.raises(ParseError):
            load_ifs(p)
        with pytest.raises(ParseError):
            load_ifs(self.write(tmp_path, {"maps": []}))
        with pytest.raises(ParseError):
            load_ifs(self.write(tmp_path, {"maps": [{"a": [[1, 0]], "t": [0, 0]}]}))
