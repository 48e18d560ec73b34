import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from varexp import cli
from varexp.errors import NonConvergenceError

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

FALSIFY_DISK = """
[run]
command = falsify
resolution = 32

[domain]
kind = disk

[kernel]
id = bergman_disk

[exponent]
kind = two_level
minus_region = disk -0.1 0 0.05
minus_value = 1.5
plus_region = disk 0.1 0 0.05
plus_value = 2.5
background = 1.5

[neighborhood]
region = disk 0 0 0.3

[falsify]
tau = 0 0
k_schedule = 1 10 100 1e3 1e4 1e5 1e6
hypothetical_constant = 100
"""

NORM = """
[run]
command = norm
resolution = 16

[domain]
kind = halfplane

[exponent]
kind = constant
value = 2

[function]
kind = indicator
region = box 0 1 0.5 1.5
"""

BAD_GAMMA = """
[run]
command = verify-lemma

[domain]
kind = halfplane

[kernel]
id = bergman_halfplane

[neighborhood]
tau = 0 1
gamma = 1.5
"""


def write(tmp_path, text, name="cfg.ini"):
    path = tmp_path / name
    path.write_text(text)
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_falsify_csv(tmp_path, capsys):
    out = tmp_path / "f.csv"
    assert cli.main(["falsify", "--config", str(write(tmp_path, FALSIFY_DISK)), "--out", str(out), "--strict"]) == 0
    rows = read_csv(out)
    assert rows[0] == ["k", "lhs", "rhs", "ratio"]
    assert len(rows) == 8
    summary = json.loads((tmp_path / "f.summary.json").read_text())
    assert summary["verdict"] == "Violated"
    assert summary["command"] == "falsify"
    assert summary["k_star"] > 1
    assert json.loads(capsys.readouterr().out) == summary


def test_norm_value(tmp_path):
    out = tmp_path / "n.csv"
    assert cli.main(["norm", "--config", str(write(tmp_path, NORM)), "--out", str(out)]) == 0
    values = dict(read_csv(out)[1:])
    assert float(values["luxemburg_norm"]) == pytest.approx(0.5, rel=1e-9)
    assert float(values["measure"]) == 0.25


def test_floats_round_trip(tmp_path):
    out = tmp_path / "f.csv"
    cli.main(["falsify", "--config", str(write(tmp_path, FALSIFY_DISK)), "--out", str(out)])
    for row in read_csv(out)[1:]:
        for cell in row:
            x = float(cell)
            assert format(x, ".17g") == cell
            assert len(cell.lstrip("-").split("e")[0].replace(".", "").lstrip("0")) <= 17


def test_validation_no_output(tmp_path, capsys):
    out = tmp_path / "v.csv"
    assert cli.main(["verify-lemma", "--config", str(write(tmp_path, BAD_GAMMA)), "--out", str(out)]) == 2
    assert not out.exists() and not (tmp_path / "v.summary.json").exists()
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and err[0].startswith("varexp: error code=")


@pytest.mark.parametrize("text", [
    "[run]\ncommand = norm\n",
    NORM.replace("value = 2", "value = 0.5"),
    NORM.replace("command = norm", "command = project"),
    NORM.replace("resolution = 16", "resolution = banana"),
    FALSIFY_DISK.replace("k_schedule = 1 10 100 1e3 1e4 1e5 1e6", "k_schedule = 1"),
    FALSIFY_DISK.replace("region = disk 0 0 0.3", "region = disk 0 0 1.5"),
])
def test_validation_errors(tmp_path, text):
    out = tmp_path / "x.csv"
    cmd = "falsify" if "falsify" in text else "norm"
    assert cli.main([cmd, "--config", str(write(tmp_path, text)), "--out", str(out)]) == 2
    assert not out.exists()


def test_missing_config(tmp_path):
    assert cli.main(["norm", "--config", str(tmp_path / "nope.ini"), "--out", str(tmp_path / "o.csv")]) == 2


def test_no_overwrite_without_force(tmp_path):
    cfg = write(tmp_path, NORM)
    out = tmp_path / "n.csv"
    assert cli.main(["norm", "--config", str(cfg), "--out", str(out)]) == 0
    out.write_text("sentinel")
    assert cli.main(["norm", "--config", str(cfg), "--out", str(out)]) == 2
    assert out.read_text() == "sentinel"
    assert cli.main(["norm", "--config", str(cfg), "--out", str(out), "--force"]) == 0
    assert out.read_text().startswith("quantity,value\n")


def test_strict_failure_exit_4(tmp_path):
    text = FALSIFY_DISK.replace("[falsify]", "[falsify]\nexpect = bounded")
    out = tmp_path / "f.csv"
    cfg = write(tmp_path, text)
    assert cli.main(["falsify", "--config", str(cfg), "--out", str(out), "--strict"]) == 4
    assert out.exists()
    assert cli.main(["falsify", "--config", str(cfg), "--out", str(out), "--force"]) == 0


def test_nonconvergence_exit_3(tmp_path, monkeypatch):
    def boom(*a, **k):
        raise NonConvergenceError("bisection did not converge")

    monkeypatch.setattr(cli, "luxemburg_norm", boom)
    out = tmp_path / "n.csv"
    assert cli.main(["norm", "--config", str(write(tmp_path, NORM)), "--out", str(out)]) == 3
    assert not out.exists()


def test_overrides(tmp_path):
    cfg = write(tmp_path, NORM)
    cli.main(["norm", "--config", str(cfg), "--out", str(tmp_path / "a.csv"), "--resolution", "4"])
    assert dict(read_csv(tmp_path / "a.csv")[1:])["nodes"] == "16"


def test_verify_seed_changes_trials(tmp_path):
    text = (CONFIGS / "verify_disk.ini").read_text().replace("trials = 200", "trials = 3")
    cfg = write(tmp_path, text)
    cli.main(["verify-lemma", "--config", str(cfg), "--out", str(tmp_path / "a.csv"), "--resolution", "16"])
    cli.main(["verify-lemma", "--config", str(cfg), "--out", str(tmp_path / "b.csv"), "--resolution", "16", "--seed", "5"])
    a, b = read_csv(tmp_path / "a.csv"), read_csv(tmp_path / "b.csv")
    assert a[0] == b[0] and a[0][0] == "trial" and a[0][-1] == "margin"
    assert a[1:] != b[1:]


def test_project_columns(tmp_path):
    cfg = CONFIGS / "project.ini"
    out = tmp_path / "p.csv"
    assert cli.main(["project", "--config", str(cfg), "--out", str(out), "--resolution", "32"]) == 0
    rows = read_csv(out)
    assert rows[0] == ["re_z", "im_z", "re_value", "im_value"]


def test_module_entry_point(tmp_path):
    out = tmp_path / "n.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "varexp", "norm", "--config", str(write(tmp_path, NORM)), "--out", str(out)],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.exists()
