"""CLI surface: commands, formats, exit codes, determinism."""

import json

import pytest

from twobridge.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestIdentity:
    def test_json(self, capsys):
        code, out, _ = run(capsys, "identity", "2/5")
        assert code == 0
        doc = json.loads(out)
        assert abs(doc["series_S1"][0] + doc["series_S2"][0] + 1) < 1e-6
        assert abs(doc["lambda_link"][1] - 3.4641016151377544) < 1e-6

    def test_non_hyperbolic_exit_2(self, capsys):
        code, _, err = run(capsys, "identity", "1/3")
        assert code == 2
        assert "+-1 mod p" in err

    def test_csv_census(self, capsys):
        code, out, _ = run(capsys, "identity", "2/5", "--format", "csv")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0].startswith("schema,slope,phi_re")
        assert any(row.split(",")[1] == "1/5" for row in lines[1:])

    def test_eps_controls_tail(self, capsys):
        _, out1, _ = run(capsys, "identity", "5/17", "--eps", "1e-4")
        _, out2, _ = run(capsys, "identity", "5/17", "--eps", "1e-8")
        t1 = json.loads(out1)["tail_bound_1"]
        t2 = json.loads(out2)["tail_bound_1"]
        assert t2 <= t1


class TestCusp:
    def test_svg_and_json(self, capsys, tmp_path):
        path = tmp_path / "cusp.svg"
        code, out, _ = run(capsys, "cusp", "5/17", "-o", str(path))
        assert code == 0
        doc = json.loads(out)
        assert doc["folds_ok"]
        svg = path.read_text()
        assert svg.count("<polyline") == 6  # 5 zigzag lines + longitude

    def test_deterministic_reruns(self, capsys, tmp_path):
        p1, p2 = tmp_path / "a.svg", tmp_path / "b.svg"
        run(capsys, "cusp", "2/5", "-o", str(p1))
        run(capsys, "cusp", "2/5", "-o", str(p2))
        assert p1.read_bytes() == p2.read_bytes()


class TestLongitude:
    def test_oracle_equality(self, capsys):
        code, out, _ = run(capsys, "longitude", "2/5")
        assert code == 0
        doc = json.loads(out)
        assert doc["lk_formula"] == doc["lk_diagram"] == -2

    def test_orientation_flag(self, capsys):
        code, out, _ = run(capsys, "longitude", "3/8", "--orientation", "reversed")
        assert code == 0
        assert json.loads(out)["orientation"] == "reversed"


class TestEndinv:
    def test_exceptional(self, capsys):
        code, out, _ = run(capsys, "endinv", "3/7", "--depth", "2")
        assert code == 0
        doc = json.loads(out)
        assert doc["case"] == "exceptional-2"
        assert doc["extra_orbits"] == ["4/7"]

    def test_gaps_sorted(self, capsys):
        from fractions import Fraction
        _, out, _ = run(capsys, "endinv", "2/5", "--depth", "3")
        doc = json.loads(out)
        lefts = [Fraction(g["interval"][0]) for g in doc["gap_system"]["gaps"]]
        assert lefts == sorted(lefts)


class TestBatch:
    def test_csv_rows(self, capsys):
        code, out, _ = run(capsys, "batch", "--pmax", "8")
        assert code == 0
        lines = out.strip().splitlines()
        header = lines[0].split(",")
        assert header[0] == "schema" and "lk_formula" in header
        # hyperbolic slopes with p <= 8: 2/5, 3/5, 2/7, 3/7, 4/7, 5/7, 3/8, 5/8
        assert len(lines) - 1 == 8

    def test_json_format(self, capsys):
        code, out, _ = run(capsys, "batch", "--pmax", "5", "--format", "json")
        rows = json.loads(out)
        assert [row["r"] for row in rows] == ["2/5", "3/5"]
        for row in rows:
            assert row["identity_residual"] < 1e-6
            assert row["lk_formula"] == row["lk_diagram"]


class TestParsing:
    def test_bad_slope_exit_1(self, capsys):
        code, _, err = run(capsys, "identity", "5/3")
        assert code == 1
        assert "error" in err
