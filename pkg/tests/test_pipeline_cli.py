import json
import math
import subprocess
import sys

import pytest

from momentsum.cli import main
from momentsum.dsl import parse_problem_file
from momentsum.pipeline import StageError, rerun_from_manifest, run_pipeline
from momentsum.series import monomial

EXPECTED_FILES = {"solution.json", "solution.csv", "growth.json", "growth.csv", "run-manifest.json"}


def load(problems_dir, name, **kw):
    return parse_problem_file((problems_dir / name).read_text(), **kw)


def test_heat_defaults(problems_dir, tmp_path):
    res = run_pipeline(load(problems_dir, "heat.txt"), out_dir=tmp_path, stages=("solve", "growth"))
    growth = json.loads((tmp_path / "growth.json").read_text())
    assert 0.9 <= growth["fitted_sigma"] <= 1.1
    assert growth["predicted_sigma"] == 1
    assert growth["radius_estimate"] == 0
    assert growth["schema_version"] == 1
    assert {p.name for p in tmp_path.iterdir()} == EXPECTED_FILES
    header = (tmp_path / "growth.csv").read_text().splitlines()[0]
    assert header == "n,s_n,fit_prediction"
    assert res.summation is None


def test_convergent_case(problems_dir, tmp_path):
    res = run_pipeline(load(problems_dir, "convergent.txt"), out_dir=tmp_path, stages=("solve", "growth"))
    assert -0.1 <= res.growth.fitted_sigma <= 0.1
    assert res.radius > 0


def test_trivial_case(problems_dir, tmp_path):
    res = run_pipeline(load(problems_dir, "trivial.txt"), {"direction": math.pi}, tmp_path)
    assert res.solution.u.rows[0] == monomial(1, res.solution.nz)
    assert all(r.is_zero() for r in res.solution.u.rows[1:])
    summary = json.loads((tmp_path / "summation.json").read_text())
    assert summary["pade_diagnostics"]["singular_directions"] == []


def test_sum_stage_and_labels(problems_dir, tmp_path):
    pf = load(problems_dir, "heat.txt", nt=30, nz=10)
    res = run_pipeline(pf, {"direction": math.pi}, tmp_path)
    assert res.summation.pade_diagnostics["singular_directions"] == [pytest.approx(0.0, abs=0.05)]
    with pytest.raises(StageError) as info:
        run_pipeline(pf, {"direction": 0.0}, None)
    assert info.value.stage == "sum"
    assert str(info.value).startswith("[sum]")


def test_rerun_is_byte_identical(problems_dir, tmp_path):
    first = tmp_path / "a"
    run_pipeline(load(problems_dir, "heat_sum.txt", nt=30, nz=10), {}, first)
    rerun_from_manifest(first / "run-manifest.json", tmp_path / "b")
    rerun_from_manifest(tmp_path / "b" / "run-manifest.json", tmp_path / "c")
    for name in (p.name for p in first.iterdir()):
        data = (first / name).read_bytes()
        assert (tmp_path / "b" / name).read_bytes() == data
        assert (tmp_path / "c" / name).read_bytes() == data
    manifest = json.loads((first / "run-manifest.json").read_text())
    assert set(manifest["versions"]) >= {"python", "numpy", "mpmath", "scipy"}
    assert "seed" in manifest and manifest["options"]["nt"] == 30


def test_cli_exit_codes(problems_dir, tmp_path, capsys):
    heat = str(problems_dir / "heat.txt")
    assert main(["solve", heat, "--nt", "6", "--nz", "4", "--out", str(tmp_path / "s")]) == 0
    assert main(["growth", heat, "--rprime", "1/3", "--out", str(tmp_path / "g")]) == 0
    assert main(["sum", heat, "--nt", "30", "--nz", "10", "--direction", "pi", "--out", str(tmp_path / "p")]) == 0
    assert main(["sum", heat, "--nt", "30", "--nz", "10", "--direction", "0", "--out", str(tmp_path / "q")]) == 3
    bad = tmp_path / "bad.txt"
    bad.write_text("k = 3\np = 2\nm1 = gevrey(1)\nm2 = gevrey(1)\na = 1\nphi_0 = 1\nphi_1 = 1\nphi_2 = 1\n")
    assert main(["solve", str(bad)]) == 2
    assert main(["solve", str(tmp_path / "missing.txt")]) == 2
    assert main(["kernels", "check", "--pmax", "3"]) == 0
    assert main(["sequence", "audit", "qfact(1/2)", "--prefix", "20"]) == 0
    assert main(["sequence", "audit", "gevrey(", "--prefix", "20"]) == 2
    out = capsys.readouterr()
    assert "k<p required" in out.err


def test_cli_numerical_failure_code(problems_dir, tmp_path, monkeypatch):
    from momentsum import pipeline
    from momentsum.errors import QuadratureError

    def boom(*a, **k):
        raise QuadratureError("forced failure", 7)

    monkeypatch.setattr(pipeline, "sum_grid", boom)
    heat = str(problems_dir / "heat.txt")
    assert main(["sum", heat, "--nt", "20", "--nz", "6", "--direction", "pi", "--out", str(tmp_path)]) == 4


def test_console_script(problems_dir, tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "momentsum.cli", "run", str(problems_dir / "convergent.txt"),
         "--out", str(tmp_path)],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0, proc.stderr
    summary = json.loads(proc.stdout)
    assert summary["radius_estimate"] > 0
