import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from gmespin import __version__
from gmespin.cli import CSV_COLUMNS, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_pure_bell(capsys):
    code, out, _ = run(capsys, "pure", "--state", "bell", "--format", "json")
    rep = json.loads(out)
    assert code == 0
    for key in ("E_mean_spin", "E_schmidt", "E_oracle"):
        assert rep[key] == pytest.approx(0.5, abs=1e-10)


def test_pure_product_and_random(capsys):
    code, out, _ = run(capsys, "pure", "--state", "product:up,up", "--format", "json")
    assert code == 0 and json.loads(out)["E_mean_spin"] == pytest.approx(0, abs=1e-12)
    code, out, _ = run(capsys, "pure", "--state", "random:7", "--dims", "2,5", "--format", "json")
    rep = json.loads(out)
    assert code == 0
    assert rep["residual_schmidt"] <= 1e-8 and rep["residual_oracle"] <= 1e-8


def test_pure_amplitudes(capsys):
    code, out, _ = run(capsys, "pure", "--state", "1,0,0,1", "--normalize")
    assert code == 0 and "E_mean_spin: 0.5" in out


def test_pure_parse_error_exit_2(capsys):
    code, _, err = run(capsys, "pure", "--state", "1,0,0,x")
    assert code == 2 and "error" in err
    code, _, _ = run(capsys, "pure", "--state", "1,1")
    assert code == 2


def test_chain_curve(capsys):
    code, out, _ = run(capsys, "chain", "--n", "2", "--omega", "1", "--init", "all-up", "--t-max", "3.1416", "--steps", "100")
    assert code == 0
    assert out.splitlines()[0] == ",".join(CSV_COLUMNS)
    recs = rows(out)
    assert len(recs) == 100
    for r in recs:
        t = float(r["t"])
        assert float(r["E_closed"]) == pytest.approx(0.5 * (1 - abs(np.cos(2 * t))), abs=1e-12)
        assert float(r["residual"]) <= 1e-10


def test_chain_angles_and_random(capsys):
    code, out, _ = run(capsys, "chain", "--n", "3", "--init", "angles:1.0,0.5;0.3,2.0;2.0,0", "--steps", "5")
    assert code == 0 and len(rows(out)) == 5
    code, _, _ = run(capsys, "chain", "--n", "3", "--init", "angles:1.0,0.5", "--steps", "5")
    assert code == 2


def test_fluct_delta_zero_matches_chain(capsys):
    grid = ["--t-max", "3", "--steps", "31"]
    _, chain_out, _ = run(capsys, "chain", "--n", "2", *grid)
    code, fluct_out, _ = run(capsys, "fluct", "--dist", "delta-pair", "--chi", "0", *grid)
    assert code == 0
    for a, b in zip(rows(chain_out), rows(fluct_out)):
        assert float(a["E_closed"]) == pytest.approx(float(b["E_closed"]), abs=1e-12)


def test_fluct_gaussian_and_anti_aligned(capsys):
    code, out, _ = run(capsys, "fluct", "--dist", "gaussian", "--tau", "1", "--t-max", "5", "--steps", "6")
    assert code == 0 and all(float(r["residual"]) <= 1e-8 for r in rows(out))
    code, out, _ = run(capsys, "fluct", "--dist", "gaussian", "--init", "anti-aligned", "--steps", "4")
    assert code == 0
    for r in rows(out):
        assert float(r["E_closed"]) == pytest.approx(0.5 * (1 - abs(np.cos(2 * float(r["t"])))), abs=1e-12)


def test_fluct_empirical(capsys, tmp_path):
    samples = tmp_path / "omega.csv"
    samples.write_text("Omega,weight\n0.5,1\n-0.5,1\n2.0,2\n")
    code, out, _ = run(capsys, "fluct", "--dist", "empirical", "--samples", str(samples), "--steps", "5")
    assert code == 0 and len(rows(out)) == 5
    code, _, err = run(capsys, "fluct", "--dist", "empirical", "--steps", "5")
    assert code == 2 and "--samples" in err


def test_cat_json_provenance(capsys):
    code, out, _ = run(capsys, "cat", "--n", "4", "--tau", "1", "--t-max", "5", "--steps", "50", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["version"] == __version__ and doc["seed"] == 0 and doc["command"] == "cat"
    assert doc["config"]["n"] == 4 and doc["config"]["tau"] == 1.0
    e = [r["E_closed"] for r in doc["records"]]
    assert e[0] == pytest.approx(0.5) and e[-1] < 1e-3
    assert all(b < a for a, b in zip(e, e[1:]))


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 3, "omega": 0.5, "steps": 7, "initial": [[0.4, 0.1], [1.2, 0.0], [2.0, 3.0]]}))
    code, out, _ = run(capsys, "chain", "--config", str(cfg))
    assert code == 0 and len(rows(out)) == 7
    code, out, _ = run(capsys, "chain", "--config", str(cfg), "--steps", "3")
    assert code == 0 and len(rows(out)) == 3
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"colour": "red"}))
    assert run(capsys, "chain", "--config", str(bad))[0] == 2


def test_invalid_parameters_exit_2(capsys):
    assert run(capsys, "chain", "--n", "1")[0] == 2
    assert run(capsys, "chain", "--steps", "0")[0] == 2
    assert run(capsys, "cat", "--t-min", "2", "--t-max", "1")[0] == 2
    assert run(capsys, "fluct", "--chi", "-1")[0] == 2
    assert run(capsys, "cat", "--tau", "0")[0] == 2
    with pytest.raises(SystemExit) as info:
        main(["chain", "--format", "xml"])
    assert info.value.code == 2


def test_oracle_disagreement_exit_3(capsys, monkeypatch):
    from gmespin import models
    from gmespin.gme import GmeResult

    real = models.chain_gme_closed

    def skewed(params, t):
        return GmeResult(min(real(params, t).value + 1e-6, 0.5), "mean_spin")

    monkeypatch.setattr(models, "chain_gme_closed", skewed)
    code, _, err = run(capsys, "chain", "--steps", "3")
    assert code == 3 and "residual" in err


def test_output_file_is_reproducible(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["chain", "--n", "4", "--init", "random", "--seed", "11", "--steps", "20"]
    assert main(args + ["--output", str(a)]) == 0
    assert main(args + ["--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert main(["chain", "--n", "4", "--init", "random", "--seed", "12", "--steps", "20", "--output", str(b)]) == 0
    assert a.read_bytes() != b.read_bytes()


def test_csv_round_trip_precision(capsys):
    _, out, _ = run(capsys, "cat", "--n", "2", "--steps", "3", "--t-max", "0.7")
    from gmespin.models import CatParams, cat_gme

    r = rows(out)[-1]
    assert float(r["E_closed"]) == cat_gme(CatParams(2, 1.0), float(r["t"])).value


def test_verify_pure(capsys, tmp_path):
    out = tmp_path / "rep.json"
    code = main(["verify", "pure", "--seed", "0", "--output", str(out)])
    rep = json.loads(out.read_text())
    assert code == 0 and rep["passed"]
    assert all(c["max_residual"] < 1e-8 for c in rep["checks"])
    assert rep["kernel_backend"] in ("cython", "python")


def test_verify_failure_exit_1(capsys, monkeypatch):
    from gmespin import verify

    monkeypatch.setattr(verify, "suite_appendix", lambda seed, budget: [verify.check("forced", [1.0], 1e-6)])
    code, out, _ = run(capsys, "verify", "appendix")
    assert code == 1 and json.loads(out)["passed"] is False


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "gmespin", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip() == __version__
