import contextlib
import io
import json

import numpy as np
import pytest

import hcatenoid as hc
from hcatenoid.cli import main, parse_prescription
from hcatenoid.errors import ParseError


def run_cli(args):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(args)
    return code, out.getvalue(), err.getvalue()


class TestParsePrescription:
    def test_power_law(self):
        H = parse_prescription("powerlaw:alpha=2")
        assert H.value(0.5) == -0.5625

    def test_expression(self):
        H = parse_prescription("expr:-(1-y^2)^2*(2-y^2)")
        assert H.value(0.0) == -2.0

    def test_scale_recursive(self):
        H = parse_prescription("scale:0.5:powerlaw:alpha=2")
        assert H.value(0.0) == -0.5
        H2 = parse_prescription("scale:2:scale:0.25:powerlaw:alpha=1")
        assert H2.value(0.0) == -0.5

    def test_table(self, tmp_path):
        ys = np.linspace(-1.0, 1.0, 201)
        path = tmp_path / "h.csv"
        path.write_text("y,h\n" + "\n".join(
            f"{float(y)!r},{float(hc.power_law(2).value(float(y)))!r}" for y in ys))
        H = parse_prescription(f"table:{path}")
        assert H.value(0.0) == pytest.approx(-1.0, abs=1e-9)

    def test_errors(self, tmp_path):
        with pytest.raises(ParseError):
            parse_prescription("nope:1")
        with pytest.raises(ParseError):
            parse_prescription("powerlaw:beta=2")
        with pytest.raises(ParseError):
            parse_prescription("scale:xx:powerlaw:alpha=2")
        with pytest.raises(ValueError):
            parse_prescription("table:/does/not/exist.csv")
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError):
            parse_prescription(f"table:{bad}")


class TestExitCodes:
    def test_usage_errors(self):
        code, _, err = run_cli(["classify", "--h", "bogus:1"])
        assert code == 2
        assert err.startswith("error:")
        code, _, _ = run_cli(["classify"])      # missing --h
        assert code == 2
        code, _, _ = run_cli(["frobnicate"])    # unknown subcommand
        assert code == 2
        code, _, _ = run_cli(["classify", "--h", "powerlaw:alpha=2", "--r0", "-1"])
        assert code == 2
        code, _, _ = run_cli(["profile", "--h", "powerlaw:alpha=2", "--xmax", "0.5"])
        assert code == 2

    def test_success(self, tmp_path):
        code, _, _ = run_cli(["profile", "--h", "powerlaw:alpha=2", "--r0", "1",
                              "--xmax", "1e3", "--out", str(tmp_path / "p.csv")])
        assert code == 0

    def test_property_failure_exit_one(self):
        # pair not equivalent at either endpoint: the requested check fails
        code, out, err = run_cli(["equiv", "--h", "powerlaw:alpha=2",
                                  "--f", "powerlaw:alpha=1.5", "--r0", "1"])
        assert code == 1
        doc = json.loads(out)
        assert doc["endpoints"]["+1"]["equivalent"] is False


class TestSubcommands:
    def test_profile_csv_monotone_radius(self, tmp_path):
        path = tmp_path / "p.csv"
        code, _, _ = run_cli(["profile", "--h", "powerlaw:alpha=2", "--r0", "1",
                              "--xmax", "1e4", "--out", str(path)])
        assert code == 0
        lines = path.read_text().splitlines()
        upper_x = [float(l.split(",")[1]) for l in lines[1:] if l.endswith("upper")]
        assert upper_x == sorted(upper_x)

    def test_profile_round_trip(self, tmp_path):
        path = tmp_path / "p.csv"
        run_cli(["profile", "--h", "powerlaw:alpha=2", "--r0", "1",
                 "--xmax", "1e3", "--out", str(path)])
        cat = hc.integrate_catenoid(hc.power_law(2), 1.0, hc.IntegratorConfig(x_max=1e3))
        for line in path.read_text().splitlines()[1:]:
            parts = line.split(",")
            x, z, branch = float(parts[1]), float(parts[2]), parts[8]
            if x > 1.0:
                assert abs(z - hc.height_at(cat, branch, x)) <= 1e-9

    def test_classify_json(self):
        code, out, _ = run_cli(["classify", "--h", "powerlaw:alpha=2", "--r0", "1",
                                "--xmax", "1e4"])
        assert code == 0
        doc = json.loads(out)
        assert doc["branches"]["upper"]["verdict"] == "Unbounded"
        assert doc["branches"]["lower"]["verdict"] == "Unbounded"

    def test_classify_single_branch(self):
        code, out, _ = run_cli(["classify", "--h", "powerlaw:alpha=2", "--r0", "1",
                                "--xmax", "1e4", "--branch", "upper"])
        assert code == 0
        assert list(json.loads(out)["branches"]) == ["upper"]

    def test_compare_json_and_csv(self, tmp_path):
        code, out, _ = run_cli(["compare", "--h", "powerlaw:alpha=2",
                                "--f", "scale:2:powerlaw:alpha=2", "--r0", "1",
                                "--xmax", "100"])
        assert code == 0
        doc = json.loads(out)
        assert doc["height_ok"] and doc["derivative_ok"]
        csv_path = tmp_path / "rows.csv"
        code, _, _ = run_cli(["compare", "--h", "powerlaw:alpha=2",
                              "--f", "scale:2:powerlaw:alpha=2", "--r0", "1",
                              "--xmax", "100", "--format", "csv",
                              "--out", str(csv_path)])
        assert code == 0
        assert csv_path.read_text().startswith("x,h_plus")

    def test_compare_window_flag(self):
        code, out, _ = run_cli(["compare", "--h", "powerlaw:alpha=2",
                                "--f", "scale:2:powerlaw:alpha=2", "--r0", "1",
                                "--window", "1.5,50"])
        assert code == 0
        rows = json.loads(out)["rows"]
        assert rows[-1][0] <= 50.0

    def test_equiv_json(self):
        code, out, _ = run_cli(["equiv", "--h", "powerlaw:alpha=2",
                                "--f", "scale:0.25:powerlaw:alpha=2", "--r0", "1"])
        assert code == 0
        doc = json.loads(out)
        assert doc["endpoints"]["+1"]["transfer_ok"]
        assert doc["endpoints"]["-1"]["transfer_ok"]

    def test_certify_json(self):
        code, out, _ = run_cli(["certify", "--h", "powerlaw:alpha=2"])
        assert code == 0
        doc = json.loads(out)
        assert doc["excluded"] == ["lower", "upper"]
        code, out, _ = run_cli(["certify", "--h", "powerlaw:alpha=0.5"])
        assert code == 0
        assert json.loads(out)["excluded"] == []

    def test_mesh_obj(self, tmp_path):
        path = tmp_path / "m.obj"
        code, _, _ = run_cli(["mesh", "--h", "powerlaw:alpha=2", "--r0", "1",
                              "--rings", "4", "--segments", "6",
                              "--xmax", "10", "--out", str(path)])
        assert code == 0
        lines = path.read_text().splitlines()
        assert sum(1 for l in lines if l.startswith("v ")) == 4 * 6 * 2
        assert sum(1 for l in lines if l.startswith("f ")) == 3 * 6 * 2

    def test_sweep_ordered(self):
        code, out, _ = run_cli(["sweep", "--h", "powerlaw:alpha=2",
                                "--r-list", "2,0.5,1"])
        assert code == 0
        doc = json.loads(out)
        assert [item["r0"] for item in doc["items"]] == [2.0, 0.5, 1.0]
        for item in doc["items"]:
            assert item["branches"]["upper"]["verdict"] == "Unbounded"


class TestConfigFile:
    def test_config_supplies_defaults_and_flags_win(self, tmp_path):
        cfg = tmp_path / "run.toml"
        cfg.write_text('h = "powerlaw:alpha=2"\nr0 = 1.0\nxmax = 1e4\n')
        code, out, _ = run_cli(["classify", "--config", str(cfg)])
        assert code == 0
        assert json.loads(out)["prescription"] == "powerlaw:alpha=2.0"
        code, out, _ = run_cli(["classify", "--config", str(cfg),
                                "--h", "powerlaw:alpha=3"])
        assert code == 0
        assert json.loads(out)["prescription"] == "powerlaw:alpha=3.0"


class TestDeterminism:
    @pytest.mark.parametrize("args", [
        ["classify", "--h", "powerlaw:alpha=2", "--r0", "1", "--xmax", "1e4"],
        ["certify", "--h", "powerlaw:alpha=2"],
        ["equiv", "--h", "powerlaw:alpha=2", "--f", "scale:0.5:powerlaw:alpha=2",
         "--r0", "1"],
        ["sweep", "--h", "powerlaw:alpha=2", "--r-list", "0.5,1"],
    ])
    def test_stdout_byte_identical(self, args):
        code1, out1, _ = run_cli(args)
        code2, out2, _ = run_cli(args)
        assert code1 == code2 == 0
        assert out1 == out2

    def test_artifact_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            run_cli(["profile", "--h", "powerlaw:alpha=2", "--r0", "1",
                     "--xmax", "1e3", "--out", str(path)])
        assert a.read_bytes() == b.read_bytes()
        ma, mb = tmp_path / "a.obj", tmp_path / "b.obj"
        for path in (ma, mb):
            run_cli(["mesh", "--h", "powerlaw:alpha=2", "--r0", "1", "--rings", "3",
                     "--segments", "4", "--xmax", "10", "--out", str(path)])
        assert ma.read_bytes() == mb.read_bytes()
