import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from dm1queue import QueueParams, zeta0
from dm1queue.cli import main
from dm1queue.siro import siro_arc


def _run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_moments_json_key_order():
    code, text = _run("moments", "--policy", "lifo")
    assert code == 0
    rep = json.loads(text)
    assert list(rep)[:7] == ["policy", "lambda", "mu", "mean", "variance", "mean_pos", "variance_pos"]
    assert abs(rep["variance"] - 0.67242217) < 1e-7
    assert abs(rep["zero_wait_probability"] - 0.58281165) < 1e-7


def test_moments_siro_and_fifo_csv():
    code, text = _run("moments", "--lambda", "2", "--mu", "3", "--policy", "siro")
    assert abs(json.loads(text)["variance"] - 0.34029290) < 1e-7
    code, text = _run("moments", "--format", "csv")
    rows = dict(line.split(",") for line in text.strip().splitlines()[1:])
    assert abs(float(rows["lsys_variance"]) - 1.22821879) < 1e-7


def test_exit_codes(capsys):
    assert _run("moments", "--lambda", "3", "--mu", "3")[0] == 1
    assert "rho" in capsys.readouterr().err
    for argv in (["moments", "--lambda", "-1"], ["moments", "--policy", "ps"], [],
                 ["multiserver", "--n", "0"], ["optimize", "--mu", "abc"]):
        with pytest.raises(SystemExit) as exc:
            main(argv, out=io.StringIO())
        assert exc.value.code == 2
    assert _run("optimize", "--c", "1.0")[0] == 1


def test_density_lifo_and_siro(tmp_path):
    p = QueueParams(2.0, 3.0)
    z = zeta0(p)
    target = tmp_path / "lifo.csv"
    assert _run("density", "--policy", "lifo", "--xmax", "3", "--out", str(target))[0] == 0
    lines = target.read_text().splitlines()
    meta = [l for l in lines if l.startswith("#")]
    assert any(l.startswith("# atom_at_zero=") for l in meta)
    body = np.loadtxt(target, delimiter=",", comments="#", skiprows=len(meta) + 1)
    assert body[0, 0] == pytest.approx(0.01) and body.shape[0] == 300
    first = body[body[:, 0] < 0.5]
    np.testing.assert_allclose(first[:, 1], 3 * z * np.exp(-3 * first[:, 0]), rtol=1e-10)
    for k in range(1, 6):
        row = body[np.isclose(body[:, 0], 0.5 * k)]
        assert abs(row[0, 1]) <= 1e-12
    code, text = _run("density", "--policy", "siro", "--xmax", "0.49", "--step", "0.07")
    rows = [l for l in text.splitlines() if l and not l.startswith("#")][1:]
    for r in rows:
        x, y = map(float, r.split(","))
        assert abs(y - siro_arc(x, p)) < 1e-8


def test_optimize_and_idle():
    rep = json.loads(_run("optimize", "--mu", "3", "--c", "0.5")[1])
    assert abs(rep["a"] - 0.56008398) < 1e-7 and abs(rep["zeta0"] - 0.31784443) < 1e-7
    rep = json.loads(_run("idle")[1])
    assert abs(rep["idle_variance"] - 0.03157553) < 1e-7
    assert abs(rep["wait_idle_correlation"] + 0.44448913) < 1e-7


def test_multiserver_table():
    code, text = _run("multiserver", "--lambda", "2", "--mu", "3", "--n", "5")
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    assert lines[0] == "n,m_n,p_n,delta_n" and len(lines) == 6
    n2 = lines[2].split(",")
    assert abs(float(n2[1]) - 0.16901950) < 1e-7 and abs(float(n2[2]) - 0.70448039) < 1e-7


def test_simulate_and_export(tmp_path):
    prefix = tmp_path / "sim"
    code, text = _run("simulate", "--policy", "siro", "--arrivals", "20000", "--seed", "9",
                      "--export", str(prefix))
    rep = json.loads(text)
    assert code == 0 and rep["seed"] == 9 and "PCG64" in rep["rng"]
    assert (tmp_path / "sim_clients.csv").exists() and (tmp_path / "sim_intervals.csv").exists()
    again = json.loads(_run("simulate", "--policy", "siro", "--arrivals", "20000", "--seed", "9")[1])
    assert again == rep


def test_verify_mass_and_reference():
    code, text = _run("verify", "--check", "mass")
    assert code == 0 and text.count("PASS") == 4 and "FAIL" not in text
    code, text = _run("verify", "--check", "reference")
    failing = [l for l in text.splitlines() if l.startswith("FAIL")]
    # only the reference n=5 zero-wait probability disagrees (it equals the n=6 value)
    assert code == 3 and len(failing) == 1 and "multi.5.p" in failing[0]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "dm1queue", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "0.1.0"
