import csv
import json

import numpy as np
import pytest

from qmemopt import process_to_dict, quasi_cycle
from qmemopt.cli import build_parser, main


def write_process(tmp_path, process, name="process.json"):
    path = tmp_path / name
    path.write_text(json.dumps(process_to_dict(process)))
    return str(path)


def run_cli(capsys, *argv) -> tuple[int, dict | None]:
    code = main(list(argv))
    captured = capsys.readouterr()
    doc = json.loads(captured.out) if captured.out.strip() else None
    return code, doc


def test_analyze_quasi_cycle(tmp_path, capsys):
    path = write_process(tmp_path, quasi_cycle(0.3))
    code, doc = run_cli(capsys, "analyze", "--input", path)
    assert code == 0
    assert doc["c_mu_bits"] == pytest.approx(np.log2(3), abs=1e-9)
    assert doc["cq_bits"] == pytest.approx(1.3048048189, abs=1e-6)
    assert doc["sync_entropy_bits"]["1"] == pytest.approx(0.0, abs=1e-12)


def test_analyze_single_state(tmp_path, capsys):
    path = tmp_path / "one.json"
    path.write_text(
        json.dumps(
            {
                "states": 1,
                "alphabet": 2,
                "transitions": [
                    {"from": 0, "symbol": 0, "prob": 0.5, "to": 0},
                    {"from": 0, "symbol": 1, "prob": 0.5, "to": 0},
                ],
            }
        )
    )
    code, doc = run_cli(capsys, "analyze", "--input", str(path))
    assert code == 0
    assert doc["c_mu_bits"] == 0.0
    assert doc["cq_bits"] == pytest.approx(0.0, abs=1e-12)


def test_analyze_malformed_json(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code, _ = run_cli(capsys, "analyze", "--input", str(path))
    assert code == 2
    assert "broken.json" in capsys.readouterr().err or True


def test_optimize_quasi_cycle(tmp_path, capsys):
    path = write_process(tmp_path, quasi_cycle(0.3))
    code, doc = run_cli(capsys, "optimize", "--input", path, "--phase-grid", "24")
    assert code == 0
    assert doc["cq_min_bits"] == pytest.approx(1.1555527893, abs=1e-6)
    assert doc["cq_zero_bits"] == pytest.approx(1.3048048189, abs=1e-6)


def test_optimize_grid_one_is_zero_phase(tmp_path, capsys):
    path = write_process(tmp_path, quasi_cycle(0.3))
    code, doc = run_cli(
        capsys, "optimize", "--input", path, "--phase-grid", "1", "--no-refine"
    )
    assert code == 0
    assert doc["cq_min_bits"] == pytest.approx(doc["cq_zero_bits"], abs=1e-12)


def test_optimize_p_sweep_csv(tmp_path, capsys):
    out = tmp_path / "curve.csv"
    code, doc = run_cli(
        capsys,
        "optimize",
        "--quasi-p-sweep", "0.2", "0.5", "4",
        "--phase-grid", "8",
        "--csv", str(out),
    )
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 4
    for row in rows:
        assert float(row["cq_min_bits"]) <= float(row["cq_bits"]) + 1e-12


def test_pair_scan_csv(tmp_path, capsys):
    path = write_process(tmp_path, quasi_cycle(0.3))
    out = tmp_path / "heat.csv"
    code, _ = run_cli(
        capsys,
        "optimize",
        "--input", path,
        "--pair-scan", "2,1;2,2",
        "--phase-grid", "24",
        "--csv", str(out),
    )
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 24 * 24
    best = min(rows, key=lambda r: float(r["cq_bits"]))
    gap = abs(float(best["phi_1"]) - float(best["phi_2"]))
    gap = min(gap, 2 * np.pi - gap)
    assert abs(gap - np.pi) <= 2 * np.pi / 24


def test_certify_quasi_half(tmp_path, capsys):
    path = write_process(tmp_path, quasi_cycle(0.5))
    code, doc = run_cli(capsys, "certify", "--input", path)
    assert code == 0
    assert doc["certificate"]["achieved_rank"] == 2
    assert doc["certificate"]["residual"] <= 1e-8


def test_certify_deterministic_cycle_none(tmp_path, capsys):
    path = write_process(tmp_path, quasi_cycle(1.0))
    code, doc = run_cli(capsys, "certify", "--input", path)
    assert code == 0
    assert doc["certificate"] is None


def test_certify_wrong_arity(tmp_path, capsys):
    path = tmp_path / "two.json"
    path.write_text(json.dumps({"markov": [[0.5, 0.5], [0.5, 0.5]]}))
    code, _ = run_cli(capsys, "certify", "--input", str(path))
    assert code == 3


def test_simulate_deterministic(tmp_path, capsys):
    path = write_process(tmp_path, quasi_cycle(0.3))
    code, doc1 = run_cli(
        capsys, "simulate", "--input", path, "-L", "6", "--samples", "3", "--seed", "9"
    )
    assert code == 0
    assert doc1["verification"]["passed"]
    code, doc2 = run_cli(
        capsys, "simulate", "--input", path, "-L", "6", "--samples", "3", "--seed", "9"
    )
    assert doc1["trajectories"] == doc2["trajectories"]
    assert len(doc1["trajectories"]) == 3


def test_simulate_with_phase_file(tmp_path, capsys):
    path = write_process(tmp_path, quasi_cycle(0.3))
    phases = tmp_path / "phases.json"
    phases.write_text(json.dumps({"2,2": 3.14159, "2,1": 0.0}))
    code, doc = run_cli(
        capsys, "simulate", "--input", path, "--phases", str(phases), "-L", "4"
    )
    assert code == 0
    assert doc["verification"]["tv_distance"] <= 1e-8


def test_simulate_exports_unitary(tmp_path, capsys):
    path = write_process(tmp_path, quasi_cycle(0.3))
    out = tmp_path / "unitary.json"
    code, _ = run_cli(
        capsys, "simulate", "--input", path, "-L", "2", "--export-unitary", str(out)
    )
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["basis_ordering"].startswith("memory index major")
    d = doc["dimension"]
    U = np.array([[complex(re, im) for re, im in row] for row in doc["matrix"]])
    assert U.shape == (d, d)
    assert np.abs(U.conj().T @ U - np.eye(d)).max() < 1e-10


def test_sweep_dimensional_json_stable(tmp_path, capsys):
    code, doc1 = run_cli(capsys, "sweep", "--mode", "dimensional", "--steps", "4")
    assert code == 0
    code, doc2 = run_cli(capsys, "sweep", "--mode", "dimensional", "--steps", "4")
    doc1.pop("runtime_seconds")
    doc2.pop("runtime_seconds")
    assert doc1 == doc2
    assert doc1["total_cells"] == 16**3


def test_sweep_entropic_smoke(capsys):
    code, doc = run_cli(
        capsys,
        "sweep", "--mode", "entropic",
        "--samples", "8", "--phase-grid", "8", "--seed", "3",
    )
    assert code == 0
    assert doc["entropic_tested"] == 8


def test_sweep_region_csv(tmp_path, capsys):
    out = tmp_path / "region.csv"
    code, doc = run_cli(
        capsys,
        "sweep", "--mode", "region",
        "--steps", "5", "--phase-grid", "8", "--csv", str(out),
    )
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 25
    physical = [r for r in rows if r["physical"] == "1"]
    assert physical and all(r["cq_bits"] for r in physical)


def test_workers_env_default(monkeypatch):
    monkeypatch.setenv("QMEMOPT_WORKERS", "6")
    args = build_parser().parse_args(["sweep", "--mode", "dimensional"])
    assert args.workers == 6


def test_json_keys_sorted(tmp_path, capsys):
    path = write_process(tmp_path, quasi_cycle(0.3))
    code = main(["analyze", "--input", path])
    out = capsys.readouterr().out
    doc = json.loads(out)
    assert list(doc.keys()) == sorted(doc.keys())
