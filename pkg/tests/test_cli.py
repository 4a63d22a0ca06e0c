import json
import os
import subprocess
import sys

import pytest

from conelab.cli import main

RUN = [sys.executable, "-m", "conelab"]


def run_cli(args, env_extra=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(RUN + args, capture_output=True, text=True, env=env)


def test_verify_lattice_orthant_exit_zero(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "command": "verify",
        "pair": {"family": "lattice", "cone": {"type": "orthant", "dim": 4}},
        "samples": 300, "seed": 7,
    }))
    out = tmp_path / "report.json"
    code = main(["verify", "--config", str(cfg), "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["verdict"] == "pass"
    assert report["seed"] == 7 and report["samples"] == 300
    assert set(report["tolerances"]) == {"membership", "equal", "converge"}
    assert [r["property"] for r in report["reports"]] == report["catalogue"]


def test_verify_moreau_lorentz_exit_one(tmp_path):
    out = tmp_path / "report.json"
    code = main(["verify", "--pair", "moreau", "--samples", "400", "--out", str(out)])
    assert code == 1
    report = json.loads(out.read_text())
    failed = {r["property"] for r in report["reports"] if r["verdict"] == "fail"}
    assert "subadditive-m" in failed
    witness = next(r for r in report["reports"] if r["property"] == "subadditive-m")["witnesses"][0]
    assert witness["residual"] > 1e-6


def test_verify_missing_cone_key_exit_two(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"pair": {"family": "moreau"}}))
    assert main(["verify", "--config", str(cfg)]) == 2


def test_malformed_json_exit_two(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{nope")
    assert main(["verify", "--config", str(cfg)]) == 2


def test_unknown_config_key_exit_two(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "pair": {"family": "lattice", "cone": {"type": "orthant", "dim": 2}},
        "extra": True,
    }))
    assert main(["verify", "--config", str(cfg)]) == 2


def test_wrong_command_in_config_exit_two(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"command": "sup",
                               "pair": {"family": "lattice",
                                        "cone": {"type": "orthant", "dim": 2}}}))
    assert main(["verify", "--config", str(cfg)]) == 2


def test_verify_csv_rejected():
    assert main(["verify", "--pair", "lattice", "--format", "csv"]) == 2


def test_unknown_demo_exit_two():
    assert main(["demo", "whatever"]) == 2
    result = run_cli(["demo", "whatever"])
    assert result.returncode == 2


def test_sup_orthant(tmp_path):
    cfg = tmp_path / "sup.json"
    cfg.write_text(json.dumps({
        "pair": {"family": "lattice", "cone": {"type": "orthant", "dim": 2}},
        "u": [1.0, 0.0], "v": [0.0, 1.0],
    }))
    out = tmp_path / "trace.json"
    assert main(["sup", "--config", str(cfg), "--out", str(out)]) == 0
    trace = json.loads(out.read_text())["trace"]
    assert trace["status"] == "converged"
    assert trace["result"] == [1.0, 1.0]
    csv_out = tmp_path / "trace.csv"
    assert main(["sup", "--config", str(cfg), "--format", "csv",
                 "--out", str(csv_out)]) == 0
    lines = csv_out.read_text().strip().splitlines()
    assert lines[0].startswith("step,")
    assert len(lines) >= 2


def test_sup_zero_vectors(tmp_path):
    cfg = tmp_path / "sup.json"
    cfg.write_text(json.dumps({
        "pair": {"family": "lattice", "cone": {"type": "orthant", "dim": 2}},
        "u": [0.0, 0.0], "v": [0.0, 0.0],
    }))
    out = tmp_path / "trace.json"
    assert main(["sup", "--config", str(cfg), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["trace"]["result"] == [0.0, 0.0]


def test_sup_dimension_mismatch_exit_two(tmp_path):
    cfg = tmp_path / "sup.json"
    cfg.write_text(json.dumps({
        "pair": {"family": "lattice", "cone": {"type": "orthant", "dim": 2}},
        "u": [1.0, 0.0, 0.0], "v": [0.0, 1.0],
    }))
    assert main(["sup", "--config", str(cfg)]) == 2


def test_demo_lex(tmp_path):
    out = tmp_path / "lex.json"
    assert main(["demo", "lex", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["verdict"] == "pass"
    assert rep["report"]["terms"] == 100
    assert len(rep["report"]["candidates"]) == 10


def test_demo_minkowski(tmp_path):
    out = tmp_path / "mink.json"
    assert main(["demo", "minkowski", "--samples", "300", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())["report"]
    assert rep["m_range_generating"] is False
    assert rep["defect_coefficient_min"] >= -1e-7
    assert rep["n_range_convex"] is False
    assert rep["n_range_convexity_witness"] is not None


def test_demo_moreau_subadd(tmp_path):
    out = tmp_path / "ms.json"
    assert main(["demo", "moreau-subadd", "--samples", "500", "--out", str(out)]) == 0
    table = json.loads(out.read_text())["report"]["table"]
    verdicts = {row["cone"]: row["verdict"] for row in table}
    assert verdicts == {"orthant-3": "pass", "lorentz-3": "fail", "simplicial-2": "fail"}


def test_batch(tmp_path):
    cfg = tmp_path / "batch.json"
    cfg.write_text(json.dumps({
        "pairs": [
            {"family": "lattice", "cone": {"type": "orthant", "dim": 3}},
            {"family": "moreau", "cone": {"type": "orthant", "dim": 3}},
        ],
        "samples": 200,
    }))
    out = tmp_path / "batch_report.json"
    assert main(["batch", "--config", str(cfg), "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["verdict"] == "pass" and len(report["entries"]) == 2
    cfg2 = tmp_path / "batch2.json"
    cfg2.write_text(json.dumps({
        "pairs": [{"family": "moreau", "cone": {"type": "lorentz", "dim": 3}}],
        "samples": 200,
    }))
    assert main(["batch", "--config", str(cfg2)]) == 1


def test_human_format(capsys):
    assert main(["verify", "--pair", "lattice", "--samples", "100",
                 "--format", "human"]) == 0
    captured = capsys.readouterr().out
    assert "✓ polarity" in captured
    assert "overall: pass" in captured


def test_reports_byte_identical_across_thread_caps(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "pair": {"family": "moreau", "cone": {"type": "lorentz", "dim": 3}},
        "samples": 200, "seed": 3,
    }))
    blobs = []
    for cap in ("1", "4"):
        out = tmp_path / f"rep{cap}.json"
        result = run_cli(["verify", "--config", str(cfg), "--out", str(out)],
                         env_extra={"CONELAB_THREADS": cap})
        assert result.returncode == 1
        blobs.append(out.read_bytes())
    assert blobs[0] == blobs[1]


def test_bad_threads_cap_exit_two():
    result = run_cli(["verify", "--pair", "lattice", "--samples", "50"],
                     env_extra={"CONELAB_THREADS": "zero"})
    assert result.returncode == 2


def test_console_script_usage_error():
    result = run_cli(["verify", "--format", "yaml"])
    assert result.returncode == 2
