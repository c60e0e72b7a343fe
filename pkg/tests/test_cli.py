import csv
import json
import math
import subprocess
import sys

import pytest

from dunklflow import __version__
from dunklflow.cli import CSV_COLUMNS, ENV_OUT, csv_text, main, write_atomic

FAST_LINEAR = "multiplicities = 0.5\nalpha = 1, 0.75\np = 1, inf\nt.min = 1\nt.max = 1000\nt.count = 7\n"


def _cfg(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def _report(directory, stem):
    return json.loads((directory / f"{stem}.json").read_text())


@pytest.mark.parametrize("text", ["", "multiplicities = 0\n"])
def test_selftest_passes(tmp_path, text):
    assert main(["selftest", "--config", _cfg(tmp_path, text), "--out", str(tmp_path / "o")]) == 0
    rep = _report(tmp_path / "o", "selftest")
    assert rep["passed"] and rep["failures"] == []
    names = {c["name"] for c in rep["checks"]}
    assert "plancherel" in names and "semigroup law" in names
    if text:
        assert "Poisson profile" in names and "k=0 translation is a shift" in names


def test_selftest_without_config_uses_defaults(tmp_path):
    assert main(["selftest", "--out", str(tmp_path)]) == 0
    assert _report(tmp_path, "selftest")["config"]["multiplicities"] == [1.0]


def test_negative_multiplicity_is_a_usage_error(tmp_path, capsys):
    assert main(["selftest", "--config", _cfg(tmp_path, "multiplicities = -0.5\n")]) == 2
    assert "multiplicities" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [["selftest", "--threads", "0"], ["linear", "--config", "/nonexistent/x.cfg"]])
def test_usage_errors(argv, tmp_path):
    assert main(argv + ["--out", str(tmp_path)]) == 2
    assert not any(tmp_path.iterdir())


def test_bad_flag_exits_2():
    with pytest.raises(SystemExit) as info:
        main(["linear", "--bogus"])
    assert info.value.code == 2


def test_zero_mass_preset_fails_with_hypothesis(tmp_path, capsys):
    code = main(["linear", "--config", _cfg(tmp_path, FAST_LINEAR + "u0.preset = zero-mass\n"),
                 "--out", str(tmp_path / "o")])
    assert code == 1
    assert "zero mass" in capsys.readouterr().err


def test_moment_rate_needs_four_times(tmp_path):
    assert main(["moment-rate", "--config", _cfg(tmp_path, "t.min = 10\nt.max = 100\nt.count = 3\n")]) == 2


def test_nonlinear_below_threshold(tmp_path, capsys):
    # k = 0.5, alpha = 1/2: threshold 1 + 2 alpha / d_k = 1.5
    assert main(["nonlinear", "--config", _cfg(tmp_path, "multiplicities = 0.5\nnonlinear.p = 1.4\n")]) == 2
    assert "1.5" in capsys.readouterr().err


def test_nonlinear_rejects_signed_data(tmp_path):
    text = "multiplicities = 0.5\nnonlinear.preset = dipole-plus-mass\n"
    assert main(["nonlinear", "--config", _cfg(tmp_path, text)]) == 2


def test_linear_outputs_and_determinism(tmp_path):
    cfg = _cfg(tmp_path, FAST_LINEAR)
    assert main(["linear", "--config", cfg, "--out", str(tmp_path / "a")]) == 0
    assert main(["linear", "--config", cfg, "--out", str(tmp_path / "b"), "--threads", "3"]) == 0
    a = (tmp_path / "a" / "linear.csv").read_bytes()
    assert a == (tmp_path / "b" / "linear.csv").read_bytes()
    rows = list(csv.reader(a.decode().splitlines()))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 1 + 2 * 2 * 7
    assert {r[2] for r in rows[1:]} == {"1", "inf"}
    assert a.endswith(b"\n") and b"\r" not in a
    rep = _report(tmp_path / "a", "linear")
    assert rep["version"] == __version__ and rep["command"] == "linear"
    assert rep["config"]["alpha"] == [1.0, 0.75]
    assert len(rep["verdicts"]) == 4


def test_output_directory_precedence(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv(ENV_OUT, str(tmp_path / "env"))
    assert main(["selftest", "--config", _cfg(tmp_path, "multiplicities = 0\n")]) == 0
    assert (tmp_path / "env" / "selftest.json").exists()
    cfg = _cfg(tmp_path, f"multiplicities = 0\noutput.dir = {tmp_path / 'file'}\n", "b.cfg")
    assert main(["selftest", "--config", cfg]) == 0
    assert (tmp_path / "file" / "selftest.json").exists()
    assert main(["selftest", "--config", cfg, "--out", str(tmp_path / "flag")]) == 0
    assert (tmp_path / "flag" / "selftest.json").exists()
    monkeypatch.delenv(ENV_OUT)
    assert main(["selftest", "--config", _cfg(tmp_path, "multiplicities = 0\n")]) == 0
    assert (tmp_path / "results" / "selftest.json").exists()


def test_write_atomic_leaves_no_temporaries(tmp_path):
    target = tmp_path / "deep" / "x.csv"
    write_atomic(target, "a\n")
    write_atomic(target, "b\n")
    assert target.read_text() == "b\n"
    assert [p.name for p in target.parent.iterdir()] == ["x.csv"]


def test_csv_number_format():
    text = csv_text([("linear", 0.5, math.inf, 10.0, 0.1, 1 / 3, None)])
    row = text.splitlines()[1].split(",")
    assert row[2] == "inf"
    assert float(row[5]) == 1 / 3
    assert row[6] == ""


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "dunklflow.cli", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and __version__ in out.stdout
