import json

import numpy as np
import pytest

from cstarmod import cli, fileio, harness
from cstarmod.errors import ConfigError
from cstarmod.hmod import span
from cstarmod.modop import ModuleOperator

from conftest import space


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_config_validation():
    with pytest.raises(ConfigError):
        harness.RunConfig(trials=0)
    with pytest.raises(ConfigError):
        harness.RunConfig(algebra_dims=[])
    with pytest.raises(ConfigError):
        harness.RunConfig(tolerances={"nonsense": 1.0})
    assert harness.RunConfig(algebra_dims=[1, 2]).algebra_dims == [[1, 2]]


def test_koliha_ten_trials(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "koliha", "--trials", "10", "--seed", "42", "--algebra", "1")
    assert code == 0
    total = json.loads(out)["checks"]["koliha"]["total"]
    assert total["passed"] == 10 and total["trials"] == 10


def test_all_suites_scalar_algebra(tmp_path):
    out = tmp_path / "r.json"
    code = cli.main(["verify", "--trials", "100", "--algebra", "1", "--rank-k", "2", "--rank-m", "2", "--out", str(out)])
    report = json.loads(out.read_text())
    assert code == 0
    assert report["failure_count"] == 0
    assert set(report["checks"]) == set(harness.SUITES)
    assert report["finite_dim_shadow"] is True
    assert "PCG64" in report["rng_algorithm"]


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, "verify", "--trials", "0")[0] == 2
    assert run(capsys, "verify", "--suite", "nope")[0] == 2
    assert run(capsys, "verify", "--algebra", "1,x")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    code, _, err = run(capsys, "verify", "--suite", "koliha", "--trials", "1", "--out", str(tmp_path / "no" / "r.json"))
    assert code == 2 and "no/r.json" in err


def test_verification_failure_exit_code(tmp_path):
    # an impossible tolerance forces failures
    code = cli.main(["verify", "--suite", "penrose", "--trials", "3", "--tol", "penrose=-1", "--out", str(tmp_path / "r.json")])
    assert code == 1


def test_csv_report(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "koliha", "--trials", "2", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0].startswith("check,algebra,trials")


def test_scan_csv(tmp_path):
    out = tmp_path / "scan.csv"
    code = cli.main(["scan-defect", "--trials", "40", "--algebra", "1,1", "--algebra", "1", "--out", str(out)])
    assert code == 0
    text = out.read_text()
    assert text.splitlines()[0] == "seed,block_dims,k,trial,gamma_pq,delta,defect,degenerate"
    rows = harness.read_scan_csv(text)
    assert len(rows) == 81
    witness = [r for r in rows if r["trial"] == "-1"]
    assert len(witness) == 1 and witness[0]["block_dims"] == "1-1"
    footer = [ln for ln in text.splitlines() if ln.startswith("#")]
    assert any(ln.startswith("# near_equality=") for ln in footer)
    for r in rows:
        if r["degenerate"] == "true":
            assert r["defect"] == "" and r["gamma_pq"] == ""
        else:
            assert float(r["defect"]) >= -1e-8


def test_scan_summary_excludes_degenerate():
    rows = [
        harness.ScanRecord(0, "1", 1, 0, None, None, None, True),
        harness.ScanRecord(0, "1", 1, 1, 1.0, 0.0, 0.25, False),
        harness.ScanRecord(0, "1", 1, 2, 1.0, 0.0, 0.0, False),
    ]
    s = harness.scan_summary(rows)
    assert s["degenerate"] == 1 and s["min_defect"] == 0.0 and s["mean_defect"] == 0.125
    assert s["near_equality"] == 1


def test_compute_examples(tmp_path, capsys):
    sp = space((1,), 3)
    fileio.write_operator(ModuleOperator.identity(sp), tmp_path / "i.json")
    fileio.write_operator(ModuleOperator(sp, sp, (np.diag([3.0, 0.1, 0.0]).astype(complex),)), tmp_path / "d.json")
    plane = space((1,), 2)
    fileio.write_submodule(span([plane.vector([np.array([[1.0, 0.0]])])]), tmp_path / "x.json")
    fileio.write_submodule(span([plane.vector([np.array([[0.0, 1.0]])])]), tmp_path / "y.json")

    code, out, _ = run(capsys, "compute", "gamma", str(tmp_path / "d.json"))
    assert code == 0 and float(out) == pytest.approx(0.1)
    code, out, _ = run(capsys, "compute", "c0", str(tmp_path / "x.json"), str(tmp_path / "y.json"))
    assert code == 0 and float(out) == 0.0
    code, _, _ = run(capsys, "compute", "mpinv", str(tmp_path / "i.json"), "--out", str(tmp_path / "inv.json"))
    assert code == 0
    inv = fileio.read_operator(tmp_path / "inv.json")
    assert np.array_equal(inv.blocks[0], np.eye(3))
    code, _, err = run(capsys, "compute", "c0", str(tmp_path / "x.json"), str(tmp_path / "d.json"))
    assert code == 2 and "different modules" in err
    (tmp_path / "bad.json").write_text('{"algebra": {"blocks": [1]}, "domain_rank": 1,\n')
    code, _, err = run(capsys, "compute", "gamma", str(tmp_path / "bad.json"))
    assert code == 2 and "line 2" in err


def test_compute_defect(tmp_path, capsys):
    from cstarmod.instances import line_projection

    plane = space((1,), 2)
    fileio.write_operator(line_projection(plane, [np.pi / 4]), tmp_path / "p.json")
    fileio.write_operator(line_projection(plane, [0.0]), tmp_path / "q.json")
    code, out, _ = run(capsys, "compute", "defect", str(tmp_path / "p.json"), str(tmp_path / "q.json"))
    assert code == 0
    values = dict(line.split("=") for line in out.split())
    assert abs(float(values["defect"])) <= 1e-12


def test_reports_identical_across_worker_counts(tmp_path):
    paths = []
    for workers in (1, 3):
        out = tmp_path / f"r{workers}.json"
        cli.main(["verify", "--suite", "spectral,oracle", "--trials", "6", "--seed", "9", "--workers", str(workers), "--out", str(out)])
        paths.append(out.read_bytes())
    assert paths[0] == paths[1]
