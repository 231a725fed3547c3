import json

import pytest

from hilbertflow.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def test_compute_dist(capsys, tmp_path):
    path = tmp_path / "disk.json"
    path.write_text('{"type": "ellipsoid", "dim": 2}')
    code, out = run_json(capsys, "compute", "dist", "--domain", str(path), "--x", "0,0", "--y", "0.5,0")
    assert code == 0 and out == {"d": 0.5493061443340549}


def test_compute_ell(capsys):
    code, out = run_json(capsys, "compute", "ell", "--matrix", "4,0,0;0,2,0;0,0,1")
    assert code == 0 and out == {"ell": 0.6931471805599453}


def test_exterior_point_is_an_input_error(capsys):
    code, out = run_json(capsys, "compute", "dist", "--x", "2,0", "--y", "0,0")
    assert code == 2 and out["error"] == "NotInterior"


def test_compute_flow_and_endpoints(capsys):
    code, out = run_json(capsys, "compute", "flow", "--x", "0,0", "--dir", "1,0", "--t", "1")
    assert code == 0 and out["base"]["chart"][0] == pytest.approx(0.7615941559557649)
    code, out = run_json(capsys, "compute", "endpoints", "--x", "0,0", "--dir", "1,0")
    assert out["a"]["chart"] == pytest.approx([-1.0, 0.0]) and out["b"]["chart"] == pytest.approx([1.0, 0.0])


def test_compute_psd_endpoints(capsys):
    code, out = run_json(capsys, "compute", "endpoints", "--domain", "psd3", "--x", "1,0,0;0,1,0;0,0,1",
                         "--dir=1,0,0;0,-1,0;0,0,0")
    assert code == 0 and "matrix" in out["b"]


def test_compute_proximal_and_rank_one(capsys):
    code, out = run_json(capsys, "compute", "proximal", "--matrix", "4,0,0;0,2,0;0,0,1")
    assert out["is_biproximal"] and out["x_plus"] == [1.0, 0.0, 0.0]
    code, out = run_json(capsys, "compute", "rank-one", "--domain", "triangle",
                         "--matrix", "4,0,0;0,2,0;0,0,1")
    assert code == 0 and out["rank_one"] is False and not any(out["criteria"].values())


def test_compute_sync_and_delta(capsys):
    code, out = run_json(capsys, "compute", "sync-time", "--x", "0,0.3", "--y", "0,-0.3", "--xi", "1,0")
    assert code == 0 and out["t0"] == pytest.approx(0.0, abs=1e-12)
    code, out = run_json(capsys, "compute", "sync-time", "--domain", "triangle", "--x", "0.2,0.5,0.3",
                         "--y", "0.3,0.2,0.5", "--xi", "1,0,0")
    assert code == 2 and out["error"] == "NotSmoothEndpoint"
    code, out = run_json(capsys, "compute", "delta", "--domain", "triangle", "--x", "0.27,0.67,0.06",
                         "--y", "0.66,0.14,0.2", "--xi", "1,0,0")
    assert code == 0 and out["delta"] > 0


def test_compute_gap_and_density(capsys):
    assert run_json(capsys, "compute", "gap", "--values", "1,2")[1] == {"gap": 1.0}
    code, out = run_json(capsys, "compute", "eps-dense", "--x", "1", "--eps", "0.2", "--A", "0.2857142857142857")
    assert code == 0
    code, out = run_json(capsys, "compute", "eps-dense", "--x", "1", "--eps", "0.5", "--A", "1")
    assert code == 2 and out["error"] == "NoneFound"


def test_compute_reduce(capsys):
    code, out = run_json(capsys, "compute", "reduce", "--X", "1,0,0;0,1,0;0,0,1", "--D=-2,0,0;0,1,0;0,0,1")
    assert code == 0 and out["stratum"] == [1, 2] and out["InNW"] and out["residual"] < 1e-8
    code, out = run_json(capsys, "compute", "reduce", "--X", "1,0,0;0,1,0;0,0,1", "--D=1,0,0;0,-1,0;0,0,0")
    assert code == 0 and out == {"stratum": [2, 2], "InNW": False}


def test_rank_ambiguity_exit_code(capsys):
    code, out = run_json(capsys, "compute", "reduce", "--X", "1,0,0;0,1,0;0,0,1",
                         "--D=1,0,0;0,-1,0;0,0,-0.999999999")
    assert code == 3 and out["error"] == "RankAmbiguous"


def test_verify_reports(capsys):
    code, out = run_json(capsys, "verify", "crampon", "--samples", "2000", "--seed", "42")
    assert code == 0 and out["failures"] == [] and out["tolerance"] == 1e-9
    assert "wall_time" not in out
    code, out = run_json(capsys, "verify", "stratum", "--N", "3", "--samples", "2000", "--timing")
    assert code == 0 and "wall_time" in out


def test_verify_errors(capsys):
    code, out = run_json(capsys, "verify", "metric-axioms", "--domain", "triangle", "--samples", "0")
    assert code == 2 and out["error"] == "BadConfig"
    code, out = run_json(capsys, "verify", "bogus")
    assert code == 2 and out["error"] == "UnknownSuite"
    code, out = run_json(capsys, "compute", "nonsense")
    assert code == 2 and out["error"] == "BadConfig"


def test_verify_failure_exit_code(capsys):
    code, out = run_json(capsys, "verify", "length-spectrum", "--L", "2", "--tol", "1e-6")
    assert code == 1 and out["failure_count"] > 0


def test_verify_csv(capsys, tmp_path):
    path = tmp_path / "crampon.csv"
    code, _ = run_json(capsys, "verify", "crampon", "--samples", "400", "--csv", str(path))
    assert code == 0 and path.read_text().startswith("domain,")


def test_verify_is_deterministic(capsys, monkeypatch):
    monkeypatch.setenv("HD_THREADS", "1")
    first = run(capsys, "verify", "metric-axioms", "--samples", "2000", "--seed", "4")
    monkeypatch.setenv("HD_THREADS", "2")
    second = run(capsys, "verify", "metric-axioms", "--samples", "2000", "--seed", "4")
    assert first == second


def test_render_to_stdout_and_file(capsys, tmp_path):
    code, svg = run(capsys, "render", "chord", "--domain", "disk")
    assert code == 0 and svg.startswith("<svg")
    path = tmp_path / "stable.svg"
    code, out = run_json(capsys, "render", "stable", "--out", str(path))
    assert code == 0 and out["bytes"] == len(path.read_bytes())
    code, again = run(capsys, "render", "chord", "--domain", "disk")
    assert again == svg
    code, out = run_json(capsys, "render", "chord", "--domain", "psd3")
    assert code == 2 and out["error"] == "NotPlanar"


def test_schottky_certify_and_spectrum(capsys, tmp_path):
    path = tmp_path / "cert.json"
    code, out = run_json(capsys, "schottky", "certify", "--out", str(path))
    assert code == 0 and out["verdict"] == "Certified"
    code, out = run_json(capsys, "schottky", "spectrum", "--cert", str(path), "--L", "3")
    assert code == 0 and len(out["lengths"]) == 2 + 4 + 8
    code, out = run_json(capsys, "schottky", "certify", "--n-max", "1")
    assert code == 1 and out["error"] == "NoNFound"


def test_bad_environment(capsys, monkeypatch):
    monkeypatch.setenv("HD_THREADS", "zero")
    code, out = run_json(capsys, "verify", "crampon", "--samples", "2000")
    assert code == 2 and out["error"] == "BadConfig"
