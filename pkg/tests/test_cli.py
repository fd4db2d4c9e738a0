import csv
import io
import json
import math

import pytest

from entrobound.cli import SWEEP_HEADER, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_entropy_table(capsys):
    code, out, _ = run(capsys, "entropy", "--mu", "atoms:1=1", "--rho", "rademacher")
    assert code == 0
    assert "H=0.693147" in out and "F=0.5" in out and "absolutely_continuous=True" in out


def test_entropy_json_and_inf(capsys):
    code, out, _ = run(capsys, "entropy", "--mu", "atoms:2=1", "--rho", "rademacher", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["H"] == "inf" and d["absolutely_continuous"] is False
    code, out, _ = run(capsys, "entropy", "--mu", "rademacher", "--rho", "rademacher", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][:2] == ["H", "F"] and float(rows[1][0]) == 0 and float(rows[1][1]) == 0


def test_entropy_errors(capsys):
    code, _, err = run(capsys, "entropy", "--mu", "atoms:1=", "--rho", "rademacher")
    assert code == 2 and "--mu" in err
    code, _, err = run(capsys, "entropy", "--mu", "atoms:0=1", "--rho", "rademacher")
    assert code == 3


def test_cramer(capsys):
    code, out, _ = run(capsys, "cramer", "--rho", "rademacher", "--x", "0.5", "--y", "1", "--format", "json")
    d = json.loads(out)
    assert code == 0
    assert d["I"] == pytest.approx(0.130812035941137, abs=1e-12)
    assert d["W"] == pytest.approx(0.129885493041722, abs=1e-12)
    assert d["region"] == "boundary"
    code, out, _ = run(capsys, "cramer", "--rho", "rademacher", "--x", "0", "--y", "1")
    assert "I=0\n" in out
    code, out, _ = run(capsys, "cramer", "--rho", "rademacher", "--x", "0", "--y", "2")
    assert "I=inf" in out and "argmax=boundary-divergence" in out
    code, out, _ = run(capsys, "cramer", "--rho", "atoms:-1=0.25,0=0.5,1=0.25", "--x", "0.1", "--y", "0.6")
    assert "u=" in out and "converged=True" in out and "region=interior" in out


def test_cramer_asymmetric_has_no_witness(capsys):
    code, out, _ = run(capsys, "cramer", "--rho", "atoms:-1=0.25,1=0.75", "--x", "0", "--y", "1")
    assert code == 0 and "W=" not in out


def test_sweep_min_g(capsys, tmp_path):
    out_file = tmp_path / "g.csv"
    code, _, _ = run(capsys, "sweep", "--rho", "atoms:-1=0.25,0=0.5,1=0.25", "--what", "min-g",
                     "--points", "11", "--out", str(out_file))
    assert code == 0
    rows = list(csv.DictReader(out_file.open()))
    assert list(rows[0]) == SWEEP_HEADER == ["x", "y", "I", "xx_over_2y", "G", "margin"]
    best = min(rows, key=lambda r: float(r["G"]))
    assert (float(best["x"]), float(best["y"])) == (0.0, 0.5)
    assert abs(float(best["G"])) < 1e-12 and float(best["margin"]) == 0


def test_sweep_proposition(capsys):
    code, out, _ = run(capsys, "sweep", "--rho", "rademacher", "--what", "proposition", "--points", "9")
    assert code == 0
    for r in csv.DictReader(io.StringIO(out)):
        if float(r["x"]) != 0:
            assert float(r["margin"]) > 0


def test_sweep_errors(capsys):
    assert run(capsys, "sweep", "--rho", "atoms:1=1")[0] == 3
    assert run(capsys, "sweep", "--rho", "rademacher", "--y-min", "-1")[0] == 2
    assert run(capsys, "sweep", "--rho", "bogus")[0] == 2


def test_verify_custom_suite(capsys, tmp_path):
    cfg = tmp_path / "suite.json"
    cfg.write_text(json.dumps({"name": "tiny", "families": ["rademacher"], "mu_per_family": 3,
                               "grid_points": 5}))
    code, out, _ = run(capsys, "verify", "--suite", str(cfg), "--format", "table")
    assert code == 0 and out.splitlines()[-1].startswith("suite=tiny seed=7")
    cfg.write_text(json.dumps({"families": ["rademacher", "atoms:1=1"], "mu_per_family": 2,
                               "grid_points": 3}))
    code, out, _ = run(capsys, "verify", "--suite", str(cfg), "--seed", "1")
    d = json.loads(out)
    assert code == 1 and d["seed"] == 1 and d["summary"]["failed"] == 1


def test_verify_config_and_io_errors(capsys, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"seed": "x"}))
    code, _, err = run(capsys, "verify", "--suite", str(cfg))
    assert code == 2 and "seed" in err
    assert run(capsys, "verify", "--suite", str(tmp_path / "missing.json"))[0] == 4
    code = run(capsys, "verify", "--suite", str(cfg.with_name("ok.json")))[0]
    assert code == 4
    good = tmp_path / "ok.json"
    good.write_text(json.dumps({"families": []}))
    assert run(capsys, "verify", "--suite", str(good), "--out", str(tmp_path / "no" / "dir.json"))[0] == 4


def test_verify_csv_byte_identical(capsys, tmp_path):
    cfg = tmp_path / "suite.json"
    cfg.write_text(json.dumps({"families": ["atoms:-1=0.25,0=0.5,1=0.25"], "mu_per_family": 5,
                               "grid_points": 7}))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, "verify", "--suite", str(cfg), "--format", "csv", "--out", str(a))[0] == 0
    assert run(capsys, "verify", "--suite", str(cfg), "--format", "csv", "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_usage_error_is_argparse(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["cramer", "--rho", "rademacher"])
    assert exc.value.code == 2


def test_module_entry_point():
    import subprocess
    import sys
    r = subprocess.run([sys.executable, "-m", "entrobound", "entropy", "--mu", "atoms:1=1",
                        "--rho", "rademacher", "--format", "csv"], capture_output=True, text=True)
    assert r.returncode == 0
    assert math.isclose(float(r.stdout.splitlines()[1].split(",")[0]), math.log(2), abs_tol=1e-15)
