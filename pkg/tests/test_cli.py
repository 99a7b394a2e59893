import csv
import io
import json
import math
import subprocess
import sys

import pytest

from prabhakar import funcalg as fa
from prabhakar.cli import main
from prabhakar.funcalg import MLSeries


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_eval_mlf_exponential(capsys):
    code, out, _ = run(capsys, "eval-mlf", "--alpha", "1", "--beta", "1", "--gamma", "1", "--z=-1,0.5,2")
    assert code == 0
    for r in rows(out):
        assert float(r["value"]) == pytest.approx(math.exp(float(r["z"])), rel=1e-14)


def test_eval_mlf_seventeen_digits(capsys):
    _, out, _ = run(capsys, "eval-mlf", "--alpha", "0.5", "--beta", "1", "--z", "0.3")
    v = rows(out)[0]["value"]
    assert float(v) == float(format(float(v), ".17g"))
    assert len(v.replace("-", "").replace(".", "").lstrip("0")) >= 16


def test_eval_mlf_numeric_failure(capsys):
    code, _, err = run(capsys, "eval-mlf", "--alpha", "0.2", "--beta", "1", "--z", "5")
    assert code == 3 and "NonConvergence" in err


def test_missing_parameter(capsys):
    code, _, err = run(capsys, "eval-mlf", "--beta", "1")
    assert code == 2 and "required" in err


def test_invalid_spec(capsys):
    code, _, _ = run(capsys, "apply", "--op", "nth-level", "--function", "power:r=2",
                     "--alpha", "0.5", "--beta", "0.9", "--beta-i", "0.5")
    assert code == 2


def test_apply_nth_level_both_routes(capsys):
    code, out, _ = run(capsys, "apply", "--op", "nth-level", "--function", "power:r=2",
                       "--alpha", "0.5", "--beta", "0.5", "--gamma", "0.4", "--delta", "0.3",
                       "--beta-i", "0.2", "--theta-i", "0.5", "--x-steps", "3")
    assert code == 0
    for r in rows(out):
        assert float(r["defect"]) < 1e-6


def test_apply_round_trip_lossless(capsys, tmp_path):
    f = MLSeries(0.5, 0.1 + 0.2, [fa.MLTerm(math.pi, 1.5, 0.4)])
    src = tmp_path / "f.json"
    src.write_text(f.to_json())
    code, out, _ = run(capsys, "apply", "--op", "integral", "--function", str(src),
                       "--beta", "0.7", "--gamma", "0.3", "--emit-series")
    assert code == 0
    got = MLSeries.from_json(out)
    assert got == fa.prabhakar_integrate(f, fa.exact(0.7), fa.exact(0.3))
    # feeding the emitted series back in reproduces it exactly
    mid = tmp_path / "g.json"
    mid.write_text(out)
    code, out2, _ = run(capsys, "apply", "--op", "integral", "--function", str(mid),
                        "--beta", "0.7", "--gamma", "-0.3", "--emit-series")
    back = MLSeries.from_json(out2)
    assert back == fa.prabhakar_integrate(f, fa.exact(1.4), 0)


def test_apply_json_envelope(capsys):
    code, out, _ = run(capsys, "apply", "--op", "integral", "--function", "power:r=1",
                       "--alpha", "0.5", "--beta", "0.5", "--x-steps", "2", "--format", "json")
    env = json.loads(out)
    assert code == 0
    assert set(env) == {"command", "params", "columns", "rows", "metadata", "warnings"}
    assert len(env["rows"]) == 2


def test_solve_ivp_config(capsys, tmp_path):
    cfg = {"alpha": 0.7, "beta": 0.6, "gamma": 0.5, "delta": -0.4, "beta_i": [0.25], "theta_i": [0.5],
           "lambda": -1.2, "forcing": fa.from_power(1, 0.7, -0.4).to_dict(), "a": [0.8]}
    path = tmp_path / "ivp.json"
    path.write_text(json.dumps(cfg))
    code, out, _ = run(capsys, "solve-ivp", "--config", str(path), "--format", "json")
    env = json.loads(out)
    assert code == 0
    assert env["metadata"]["initial_values_recovered"] == pytest.approx([0.8])
    assert env["metadata"]["max_normalized_residual"] < 1e-8


def test_solve_ivp_flags(capsys):
    code, out, _ = run(capsys, "solve-ivp", "--alpha", "0.5", "--beta", "0.6", "--beta-i", "0",
                       "--lambda", "-1", "--a", "1")
    assert code == 0 and len(rows(out)) == 10


def test_solve_heat(capsys, tmp_path):
    cfg = {"alpha": 0.5, "beta": 0.8, "beta_i": [0.2], "theta_i": [1], "k_tilde": 0.1, "L": 20,
           "N": 32, "u0": {"kind": "gaussian", "sigma": 1.0}, "times": [0.5, 1.0]}
    path = tmp_path / "heat.json"
    path.write_text(json.dumps(cfg))
    code, out, _ = run(capsys, "solve-heat", "--config", str(path))
    assert code == 0
    assert len(rows(out)) == 64


def test_verify_deterministic(capsys):
    _, a, _ = run(capsys, "verify", "--suite", "semigroup", "--cases", "4", "--seed", "7")
    _, b, _ = run(capsys, "verify", "--suite", "semigroup", "--cases", "4", "--seed", "7")
    assert a == b and len(rows(a)) == 4


def test_verify_failure_exit_code(capsys):
    code, _, _ = run(capsys, "verify", "--suite", "semigroup", "--cases", "2", "--tol", "0")
    assert code == 4


def test_max_terms_env(capsys, monkeypatch):
    monkeypatch.setenv("FC_MAX_TERMS", "3")
    code, out, _ = run(capsys, "eval-mlf", "--alpha", "1", "--beta", "1", "--z", "2")
    assert code == 3


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "prabhakar", "eval-mlf", "--alpha", "1", "--beta", "1",
                        "--z", "0"], capture_output=True, text=True, check=False)
    assert r.returncode == 0 and rows(r.stdout)[0]["value"] == "1"
