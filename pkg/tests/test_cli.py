"""End-to-end runs of the console entry point on desk-sized configs."""

import json

import pytest

from bottlenecklab.bottleneck import REPORT_COLUMNS
from bottlenecklab.cli import main
from bottlenecklab.model import REGISTRY, checks_to_text
from bottlenecklab.stability import stability_sweep, sweep_to_csv

VQ_BASE = {
    "model": "ising_ring",
    "n": 4,
    "betas": [1.0],
    "subspace": {"centers": [0], "radius": 1},
    "partition_radius": 3,
}


def run(subcommand, cfg, tmp_path, out_name="out", jobs=None):
    cfg_path = tmp_path / f"{out_name}.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / out_name
    argv = [subcommand, "--config", str(cfg_path), "--out", str(out)]
    if jobs is not None:
        argv += ["--jobs", str(jobs)]
    return main(argv), out


def read_rows(out):
    header, *rows = (out / "report.csv").read_text().splitlines()
    return header, [r.split(",") for r in rows]


def test_verify_quantum_single_row(tmp_path):
    code, out = run("verify-quantum", VQ_BASE, tmp_path)
    assert code == 0
    header, rows = read_rows(out)
    assert header == ",".join(REPORT_COLUMNS)
    assert len(rows) == 1
    assert rows[0][11] == "local(r=3)"
    assert float(rows[0][3]) <= float(rows[0][4]) + 1e-8
    assert json.loads((out / "failures.json").read_text()) == []
    payload = json.loads((out / "report.json").read_text())
    assert payload[0]["model"] == "ising_ring"
    assert payload[0]["beta"] == 1.0


def test_rerun_is_byte_identical(tmp_path):
    _, first = run("verify-quantum", VQ_BASE, tmp_path, "a")
    _, second = run("verify-quantum", VQ_BASE, tmp_path, "b")
    assert (first / "report.csv").read_bytes() == (second / "report.csv").read_bytes()
    assert (first / "report.json").read_bytes() == (second / "report.json").read_bytes()


def test_worker_count_does_not_change_bytes(tmp_path, monkeypatch):
    cfg = {
        "model": "ising_ring",
        "n": 6,
        "betas": [0.5, 1.0, 2.0],
        "partition": {"center": 0, "inner": 1, "width": 1},
    }
    monkeypatch.delenv("BOTTLENECKLAB_JOBS", raising=False)
    code1, serial = run("verify-classical", cfg, tmp_path, "serial")
    code2, pooled = run("verify-classical", cfg, tmp_path, "pooled", jobs=3)
    monkeypatch.setenv("BOTTLENECKLAB_JOBS", "2")
    code3, via_env = run("verify-classical", cfg, tmp_path, "via-env", jobs=1)
    assert code1 == code2 == code3 == 0
    ref = (serial / "report.csv").read_bytes()
    assert (pooled / "report.csv").read_bytes() == ref
    assert (via_env / "report.csv").read_bytes() == ref


def test_classical_rows_stay_under_bound(tmp_path):
    cfg = {
        "model": "ising_ring",
        "n": 6,
        "betas": [0.5, 1.0, 2.0],
        "partition": {"center": 0, "inner": 1, "width": 1},
    }
    code, out = run("verify-classical", cfg, tmp_path)
    assert code == 0
    _, rows = read_rows(out)
    assert len(rows) == 3
    for row in rows:
        lhs, bound = float(row[4]), float(row[5])
        assert lhs <= bound + 1e-12
        assert float(row[9]) == 0.0


def test_negative_beta_rejected_before_compute(tmp_path):
    cfg = dict(VQ_BASE, betas=[-1.0])
    code, out = run("verify-quantum", cfg, tmp_path)
    assert code == 2
    failures = json.loads((out / "failures.json").read_text())
    assert failures[0]["reason"] == "ConfigInvalid"
    assert not (out / "report.csv").exists()


def test_unknown_model_and_unknown_key(tmp_path):
    code, out = run("verify-quantum", dict(VQ_BASE, model="kagome"), tmp_path, "m")
    assert code == 2
    assert json.loads((out / "failures.json").read_text())[0]["reason"] == "ModelNotFound"
    code, out = run("verify-quantum", dict(VQ_BASE, betaz=[1.0]), tmp_path, "k")
    assert code == 2
    msg = json.loads((out / "failures.json").read_text())[0]["message"]
    assert "betaz" in msg


def test_bad_jobs_env_rejected(tmp_path, monkeypatch):
    monkeypatch.setenv("BOTTLENECKLAB_JOBS", "many")
    code, out = run("verify-quantum", VQ_BASE, tmp_path)
    assert code == 2
    assert json.loads((out / "failures.json").read_text())[0]["reason"] == "ConfigInvalid"


def test_missing_config_file(tmp_path):
    out = tmp_path / "out"
    code = main(["model-info", "--config", str(tmp_path / "no.json"), "--out", str(out)])
    assert code == 2


def test_barrier_scan_rows(tmp_path):
    cfg = {"model": "curie_weiss", "n": 6, "center": 0, "inner": 1, "radii": [1, 2, 3]}
    code, out = run("barrier-scan", cfg, tmp_path)
    assert code == 0
    _, rows = read_rows(out)
    dims = [int(r[7]) for r in rows]
    assert dims == sorted(dims) and dims[0] < dims[-1]
    for row in rows:
        assert float(row[10]) == pytest.approx(8 / 6)


def test_tail_check_diagnoses_inadmissible_points(tmp_path):
    cfg = {
        "model": "repetition",
        "n": 8,
        "eps1": 0.2,
        "eps2": 0.8,
        "gs": [0.01, 0.02],
        "seeds": [7],
    }
    code, out = run("tail-check", cfg, tmp_path)
    assert code == 1
    failures = json.loads((out / "failures.json").read_text())
    assert len(failures) == 1
    assert failures[0]["reason"] == "ParametersInadmissible"
    assert failures[0]["point"]["g"] == 0.01
    _, rows = read_rows(out)
    assert len(rows) == 2
    for row in rows:
        assert float(row[9]) <= float(row[10]) + 1e-9


def test_stability_sweep_matches_library_output(tmp_path):
    cfg = {
        "model": "repetition",
        "barrier": {"center": 0, "inner": 1, "boundary": 2},
        "betas": [2.0],
        "gs": [0.0],
        "ns": [4, 6],
        "seeds": [0],
    }
    code, out = run("stability-sweep", cfg, tmp_path)
    assert code == 0
    direct = stability_sweep("repetition", ((0, 0), 1, 2), [2.0], [0.0], [4, 6], [0])
    assert (out / "report.csv").read_text() == sweep_to_csv(direct)
    fits = json.loads((out / "fit.json").read_text())
    assert fits["beta=2.0,g=0.0"]["status"] == "no-admissible-points"
    payload = json.loads((out / "report.json").read_text())
    assert payload[0]["lambda"] == "inf"


def test_mixing_compare_respects_lower_bound(tmp_path):
    cfg = {
        "model": "ising_ring",
        "n": 4,
        "beta": 3.0,
        "subspace": {"centers": [0], "radius": 1},
        "partition_radius": 1,
        "horizon": 12,
    }
    code, out = run("mixing-compare", cfg, tmp_path)
    assert code == 0
    _, rows = read_rows(out)
    strong = float(rows[0][6])
    assert strong > 4.0
    assert rows[0][8] == "inf"
    payload = json.loads((out / "report.json").read_text())
    assert payload[0]["tmix_observed"] == "inf"


def test_model_info_summary(tmp_path):
    cfg = {
        "model": "steane7",
        "beta": 1.0,
        "barrier": {"center": [0, 0], "inner": 1, "boundary": 1},
    }
    code, out = run("model-info", cfg, tmp_path)
    assert code == 0
    info = json.loads((out / "report.json").read_text())
    assert info["n"] == 7
    assert not info["classical"]
    assert info["ground_degeneracy"] == 2
    assert info["barrier"]["kappa"] == pytest.approx(1 / 7)
    assert info["log_Z"] == pytest.approx(-info["free_energy"])


def test_model_info_expansion(tmp_path):
    cfg = {"model": "repetition", "n": 6, "expansion_delta": 0.5}
    code, out = run("model-info", cfg, tmp_path)
    assert code == 0
    info = json.loads((out / "report.json").read_text())
    assert info["expansion_gamma"] == pytest.approx(2 / 3)
    assert sum(info["expansion_witness"]) == 3


def test_checks_file_source(tmp_path):
    path = tmp_path / "triangle.txt"
    path.write_text(checks_to_text(REGISTRY["ising_ring"](3)))
    cfg = {
        "checks_file": str(path),
        "betas": [1.0],
        "partition": {"center": 0, "inner": 0, "width": 1},
    }
    code, out = run("verify-classical", cfg, tmp_path)
    assert code == 0
    _, rows = read_rows(out)
    assert rows[0][0] == "triangle"
