import json
import math

import numpy as np
import pytest

from soapcert import Model, SpaceForm
from soapcert import shapes
from soapcert.cli import run

FLAT = SpaceForm(Model.FLAT, 3)


@pytest.fixture()
def circle_file(tmp_path):
    g = shapes.circle_graph(FLAT, 1.0, 1024)
    path = tmp_path / "circle.graph.json"
    path.write_text(json.dumps(shapes.graph_document(g)))
    return str(path)


@pytest.fixture()
def cube_file(tmp_path):
    g = shapes.cube_skeleton_graph()
    path = tmp_path / "cube.graph.json"
    path.write_text(json.dumps(shapes.graph_document(g)))
    return str(path)


def run_capture(capsys, argv):
    code = run(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestTC:
    def test_circle_total(self, capsys, circle_file):
        code, out, _ = run_capture(capsys, ["tc", circle_file])
        assert code == 0
        assert "total cone curvature: 6.2831" in out
        assert "(2.0000 pi)" in out

    def test_inputs_echoed(self, capsys, circle_file):
        code, out, _ = run_capture(capsys, ["tc", circle_file, "--seed", "7"])
        assert code == 0
        assert "space=flat dim=3" in out
        assert "seed=7" in out
        assert "h=native" in out

    def test_env_seed_overrides_flag(self, capsys, circle_file, monkeypatch):
        monkeypatch.setenv("SOAPCERT_SEED", "99")
        code, out, _ = run_capture(capsys, ["tc", circle_file, "--seed", "7"])
        assert code == 0
        assert "seed=99" in out

    def test_resampling_step_flag(self, capsys, circle_file):
        code, out, _ = run_capture(capsys, ["tc", circle_file, "--h", "0.05"])
        assert code == 0
        assert "h=0.05" in out
        total = float(out.splitlines()[-1].split(":")[1].split("rad")[0])
        assert total == pytest.approx(2.0 * math.pi, abs=2e-3)


class TestCone:
    def test_circle_quantities(self, capsys, circle_file):
        code, out, _ = run_capture(capsys,
                                   ["cone", "--apex", "0,0,0", circle_file])
        assert code == 0
        hat_line = next(ln for ln in out.splitlines() if "Theta(C^,p)" in ln)
        assert float(hat_line.split("=")[-1]) == pytest.approx(1.0, abs=1e-4)
        residual = float(out.splitlines()[-1].split("=")[-1])
        assert residual < 1e-3

    def test_apex_on_graph_is_numerical_failure(self, capsys, circle_file):
        code, _, err = run_capture(capsys,
                                   ["cone", "--apex", "1,0,0", circle_file])
        assert code == 3
        assert "numerical error" in err

    def test_bad_apex_is_validation_failure(self, capsys, circle_file):
        code, _, err = run_capture(capsys,
                                   ["cone", "--apex", "0,0", circle_file])
        assert code == 2
        assert "validation error" in err


class TestDevelop:
    def test_csv_columns_and_svg(self, capsys, tmp_path, circle_file):
        out_csv = tmp_path / "dev.csv"
        out_svg = tmp_path / "dev.svg"
        code, out, _ = run_capture(capsys, [
            "develop", "--apex", "0,0,0", "--out", str(out_csv),
            "--svg", str(out_svg), circle_file])
        assert code == 0
        lines = out_csv.read_text().splitlines()
        assert lines[0] == "edge_id,s,r,theta,khat_nu"
        rows = [ln.split(",") for ln in lines[1:]]
        r = np.array([float(row[2]) for row in rows])
        theta = np.array([float(row[3]) for row in rows])
        assert np.max(np.abs(r - 1.0)) < 1e-8
        from soapcert import develop_cone, load_graph_file

        g = load_graph_file(circle_file)
        dev = develop_cone(g.space, np.zeros(3), g)
        assert theta[-1] == pytest.approx(2.0 * math.pi * dev.hat_density,
                                          abs=1e-9)
        svg = out_svg.read_text()
        assert svg.count("<polyline") == 1
        assert "<circle" in svg

    def test_unwritable_path_is_numerical_failure(self, capsys, circle_file):
        code, _, err = run_capture(capsys, [
            "develop", "--apex", "0,0,0.5",
            "--out", "/nonexistent-dir/dev.csv", circle_file])
        assert code == 3

    def test_validation_failure_writes_nothing(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"space": {"model": "flat", "dim": 3},
                                   "vertices": [], "edges": []}))
        out_csv = tmp_path / "never.csv"
        code, _, err = run_capture(capsys, [
            "develop", "--apex", "0,0,1", "--out", str(out_csv), str(bad)])
        assert code in (2, 3)
        assert not out_csv.exists()


class TestCertify:
    def test_circle_all_verdicts(self, capsys, circle_file):
        code, out, _ = run_capture(capsys, [
            "certify", "--simple-curve", circle_file])
        assert code == 0
        for name in ("SimpleCurveEmbedded", "EmbeddedOrY",
                     "YSingularitiesOnly"):
            assert name in out

    def test_cube_no_certificate(self, capsys, cube_file):
        code, out, _ = run_capture(capsys, ["certify", cube_file])
        assert code == 0
        assert "NoCertificate" in out
        margin = 3.0 * math.pi - 14.770158
        assert f"margin {margin:.4f}"[:12] in out


class TestDensityMapAndGBCheck:
    def test_density_map_file(self, capsys, tmp_path, circle_file):
        out_csv = tmp_path / "map.csv"
        code, out, _ = run_capture(capsys, [
            "density-map", "--grid", "40", "--out", str(out_csv), circle_file])
        assert code == 0
        lines = out_csv.read_text().splitlines()
        assert lines[0] == "x0,x1,x2,bound"
        assert len(lines) > 10
        bounds = np.array([float(ln.split(",")[-1]) for ln in lines[1:]])
        assert np.allclose(bounds, 1.0, atol=1e-3)

    def test_density_map_spherical(self, capsys, tmp_path):
        space = SpaceForm(Model.SPHERICAL, 3, 1.0)
        g = shapes.circle_graph(space, 0.5, 256)
        path = tmp_path / "loop.json"
        path.write_text(json.dumps(shapes.graph_document(g)))
        out_csv = tmp_path / "map.csv"
        code, _, _ = run_capture(capsys, ["density-map", "--grid", "20",
                                          "--out", str(out_csv), str(path)])
        assert code == 0
        lines = out_csv.read_text().splitlines()
        assert lines[0] == "x0,x1,x2,x3,bound"
        bounds = np.array([float(ln.split(",")[-1]) for ln in lines[1:]])
        # with positive curvature the bound grows with the cone area term
        assert np.all(bounds >= 1.0 - 1e-3)

    def test_gb_check(self, capsys, circle_file):
        code, out, _ = run_capture(capsys, [
            "gb-check", "--trials", "3", "--seed", "5", circle_file])
        assert code == 0
        assert "max residual over 3 trials" in out
        worst = float(out.splitlines()[-1].split(":")[-1])
        assert worst < 1e-3


class TestExitCodes:
    def test_unknown_flag_is_usage_error(self, capsys, circle_file):
        code, _, err = run_capture(capsys, ["tc", "--bogus", circle_file])
        assert code == 64
        assert "usage" in err

    def test_unknown_command_is_usage_error(self, capsys):
        code, _, _ = run_capture(capsys, ["frobnicate"])
        assert code == 64

    def test_missing_file_is_io_failure(self, capsys):
        code, _, _ = run_capture(capsys, ["tc", "/nonexistent/x.json"])
        assert code == 3

    def test_invalid_graph_is_validation_failure(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({
            "space": {"model": "flat", "dim": 3, "curv": 0.0},
            "vertices": [{"id": "a", "coords": [0, 0, 0]},
                         {"id": "b", "coords": [1, 0, 0]}],
            "edges": [{"id": "e", "endpoints": ["a", "b"],
                       "samples": [[0, 0, 0], [1, 0, 0]]}],
        }))
        code, _, err = run_capture(capsys, ["tc", str(bad)])
        assert code == 2
        assert "validation error" in err


class TestDeterminism:
    def test_reports_byte_identical(self, capsys, circle_file):
        _, out1, _ = run_capture(capsys, ["tc", circle_file, "--seed", "3"])
        _, out2, _ = run_capture(capsys, ["tc", circle_file, "--seed", "3"])
        assert out1 == out2

    def test_develop_files_byte_identical(self, capsys, tmp_path, circle_file):
        texts = []
        for tag in ("a", "b"):
            csv_path = tmp_path / f"{tag}.csv"
            svg_path = tmp_path / f"{tag}.svg"
            run_capture(capsys, ["develop", "--apex", "0,0,0.5",
                                 "--out", str(csv_path), "--svg",
                                 str(svg_path), circle_file])
            texts.append((csv_path.read_bytes(), svg_path.read_bytes()))
        assert texts[0] == texts[1]

    def test_certify_heuristic_deterministic(self, capsys, tmp_path):
        g = shapes.theta_graph(samples_per_edge=64)
        path = tmp_path / "theta.json"
        path.write_text(json.dumps(shapes.graph_document(g)))
        _, out1, _ = run_capture(capsys, ["certify", "--mode", "heuristic",
                                          "--grid", "30", str(path)])
        _, out2, _ = run_capture(capsys, ["certify", "--mode", "heuristic",
                                          "--grid", "30", str(path)])
        assert out1 == out2
