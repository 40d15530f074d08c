import json
import math

import numpy as np
import pytest

from affinevis.cli import main
from affinevis.report import RunReport, write_csv, write_json, write_report


@pytest.fixture()
def carpet_cfg(tmp_path):
    cfg = {
        "maps": [
            {"a": [[1 / 3, 0.0], [0.0, 0.5]], "t": [0.0, 0.0]},
            {"a": [[1 / 3, 0.0], [0.0, 0.5]], "t": [1 / 3, 0.5]},
            {"a": [[1 / 3, 0.0], [0.0, 0.5]], "t": [2 / 3, 0.0]},
        ]
    }
    p = tmp_path / "carpet.json"
    p.write_text(json.dumps(cfg))
    return p


class TestReportEmission:
    def test_csv_rfc4180(self, tmp_path):
        p = tmp_path / "t.csv"
        write_csv(p, ["a", "b"], [(1.5, 'say "hi"'), (2, "x,y")])
        data = p.read_bytes()
        assert b"\r\n" in data
        assert b'"say ""hi"""' in data
        assert b'"x,y"' in data

    def test_json_deterministic(self, tmp_path):
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        obj = {"z": [1.0, 2.5], "a": {"nested": np.float64(0.1)}}
        write_json(p1, obj)
        write_json(p2, obj)
        assert p1.read_bytes() == p2.read_bytes()
        assert b"np.float64" not in p1.read_bytes()

    def test_report_timings_sidecar(self, tmp_path):
        rep = RunReport(command="x", params={"seed": 0})
        rep.add_assertion("check", True, "fine")
        rep.timings["seconds"] = 1.23
        out = tmp_path / "rep.json"
        write_report(rep, out)
        payload = json.loads(out.read_text())
        assert "timings" not in payload  # timings stay out of the main report
        side = json.loads((tmp_path / "rep.timings.json").read_text())
        assert side["seconds"] == 1.23


class TestCLI:
    def test_scenario_list(self, capsys):
        assert main(["scenario", "list"]) == 0
        out = capsys.readouterr().out
        assert "carpet-5.1" in out and "positive-cone" in out

    def test_gen_writes_csv(self, tmp_path, capsys):
        out = tmp_path / "pts.csv"
        svg = tmp_path / "pts.svg"
        code = main(
            [
                "gen",
                "--scenario",
                "carpet-5.1",
                "--delta",
                "0.125",
                "--out",
                str(out),
                "--svg",
                str(svg),
            ]
        )
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "x,y"
        assert len(lines) == 1 + 27  # alpha1 <= 1/8 needs three symbols
        assert svg.read_text().startswith("<svg")

    def test_gen_from_config_file(self, tmp_path, carpet_cfg, capsys):
        out = tmp_path / "pts.csv"
        assert main(["gen", "--ifs", str(carpet_cfg), "--delta", "0.25", "--out", str(out)]) == 0
        assert len(out.read_text().strip().splitlines()) == 1 + 9

    def test_gen_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["gen", "--scenario", "carpet-5.1", "--delta", "0.125", "--out", str(a)])
        main(["gen", "--scenario", "carpet-5.1", "--delta", "0.125", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_check_report(self, tmp_path):
        out = tmp_path / "check.json"
        code = main(
            ["check", "--scenario", "carpet-5.1", "--all", "--depth", "4", "--out", str(out)]
        )
        payload = json.loads(out.read_text())
        assert payload["results"]["domination"]["verdict"] is True
        assert payload["results"]["cone"]["found"] is True
        # identical linear parts cannot separate
        assert payload["results"]["cone"]["separation"] is False
        assert code == 4  # separation assertion fails for the carpet

    def test_check_domination_only(self, tmp_path):
        code = main(["check", "--scenario", "carpet-5.1", "--domination"])
        assert code == 0

    def test_orient(self, tmp_path, capsys):
        out = tmp_path / "cover.csv"
        code = main(
            ["orient", "--scenario", "carpet-5.1", "--eps", "1e-3", "--out", str(out)]
        )
        assert code == 0
        rows = out.read_text().strip().splitlines()
        assert len(rows) == 2  # header + one interval
        center = float(rows[1].split(",")[0])
        assert center == pytest.approx(math.pi / 2, abs=1e-3)

    def test_vis_and_svg(self, tmp_path):
        out = tmp_path / "cells.csv"
        svg = tmp_path / "vis.svg"
        code = main(
            [
                "vis",
                "--scenario",
                "carpet-5.1",
                "--dir",
                str(-math.pi / 4),
                "--delta",
                str(2.0**-6),
                "--out",
                str(out),
                "--svg",
                str(svg),
            ]
        )
        assert code == 0
        assert len(out.read_text().splitlines()) > 10
        assert "<rect" in svg.read_text()

    def test_vis_dim_report(self, tmp_path):
        out = tmp_path / "vd.json"
        code = main(
            [
                "vis-dim",
                "--scenario",
                "carpet-5.1",
                "--dir",
                str(-math.pi / 4),
                "--ladder",
                "4:8",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        payload = json.loads(out.read_text())
        slope = payload["results"]["estimate"]["slope"]
        assert 0.85 <= slope <= 1.15
        assert payload["results"]["estimate"]["mode"] == "per-scale-sweep"

    def test_scan_table(self, tmp_path):
        out = tmp_path / "scan.csv"
        code = main(
            [
                "scan",
                "--scenario",
                "carpet-5.1",
                "--dirs",
                "8",
                "--depth",
                "3",
                "--delta",
                str(2.0**-7),
                "--out",
                str(out),
            ]
        )
        assert code == 0
        rows = out.read_text().strip().splitlines()
        assert len(rows) == 9
        flags = [int(r.split(",")[1]) for r in rows[1:]]
        assert sum(flags) == 2

    def test_tangent_table(self, tmp_path):
        out = tmp_path / "tan.csv"
        code = main(
            [
                "tangent",
                "--scenario",
                "carpet-5.1",
                "--stream",
                "2",
                "--n-max",
                "6",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        rows = out.read_text().strip().splitlines()
        assert len(rows) == 7

    def test_validation_exit_code(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"maps": [{"a": [[2.0, 0.0], [0.0, 0.5]], "t": [0, 0]}]}')
        assert main(["gen", "--ifs", str(bad), "--out", str(tmp_path / "x.csv")]) == 2

    def test_budget_exit_code(self, tmp_path):
        code = main(
            [
                "gen",
                "--scenario",
                "carpet-5.1",
                "--delta",
                str(2.0**-9),
                "--budget",
                "50",
                "--out",
                str(tmp_path / "x.csv"),
            ]
        )
        assert code == 3

    def test_unknown_scenario_exit_code(self):
        assert main(["orient", "--scenario", "missing", "--eps", "0.1"]) == 2

    def test_scenario_run_positive_cone(self, tmp_path, capsys):
        out = tmp_path / "run.json"
        code = main(["scenario", "run", "positive-cone", "--out", str(out)])
        assert code == 0
        text = capsys.readouterr().out
        assert "[PASS]" in text and "[FAIL]" not in text
        payload = json.loads(out.read_text())
        assert all(a["passed"] for a in payload["assertions"])
        assert (tmp_path / "run.timings.json").exists()

    def test_scenario_run_report_deterministic(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        main(["scenario", "run", "positive-cone", "--seed", "1", "--out", str(a)])
        main(["scenario", "run", "positive-cone", "--seed", "1", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()
