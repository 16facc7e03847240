import csv
import io
import json
import math
import subprocess
import sys

import pytest

from catwig import cli
from catwig.qfunc import QGrid


@pytest.fixture(autouse=True)
def no_config(monkeypatch):
    monkeypatch.delenv("CATWIG_CONFIG", raising=False)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_dmr_table_csv(capsys):
    code, out, _ = run(capsys, "dmr-table", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and len(rows) == 17
    assert [r[-1] for r in rows[1:]] == ["0", "0", "0", "1"] + ["0"] * 12


def test_dmr_table_json_default(capsys):
    code, out, _ = run(capsys, "dmr-table")
    table = json.loads(out)
    assert code == 0 and sum(r["starred"] for r in table) == 1


def test_chsh_wf(capsys):
    code, out, _ = run(capsys, "chsh", "--scenario", "wf", "--cutoff", "40")
    d = json.loads(out)
    assert code == 0 and abs(d["abs_S"] - 2 * math.sqrt(2)) < 5e-3
    assert d["config"]["scenario"] == "wf"


def test_moments_csv(capsys):
    code, out, _ = run(capsys, "moments", "--format", "csv", "--cutoff", "40")
    rows = dict(r for r in csv.reader(io.StringIO(out)) if r[0] != "pair")
    assert code == 0 and set(rows) == {"zz", "zy", "yz", "yy"}
    assert abs(float(rows["zz"]) + 1 / 3) < 2e-3


def test_qgrid_time_series(tmp_path):
    out = tmp_path / "q"
    times = ",".join(str(t) for t in (0, math.pi / 2, math.pi, 3 * math.pi / 2))
    code = cli.main(["qgrid", "--bases", "yz", "--times", times, "--grid=-9:9:61", "--out", str(out)])
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert len(manifest["steps"]) == 4 and len(list(out.glob("qgrid_*.csv"))) == 4
    assert manifest["max_sup_distance"]["mixB"] <= 1e-6
    g = QGrid.from_csv((out / "qgrid_003.csv").read_text())
    assert g.axes[0] == ("X_A", -9.0, 9.0, 61)


def test_qgrid_single_snapshot(tmp_path):
    code = cli.main(["qgrid", "--grid=-9:9:31", "--out", str(tmp_path)])
    assert code == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["manifest.json", "qgrid_000.csv"]


def test_report_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(["report", "--out", str(a)]) == 0
    assert cli.main(["report", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rep = json.loads(a.read_text())
    assert rep["all_passed"] and rep["dmr_no_go"]["verdict"] == "falsified"


def test_small_amplitude_warns_in_report(capsys):
    code, out, _ = run(capsys, "wmr-check", "--alpha", "0.5", "--beta", "0.5")
    d = json.loads(out)
    assert code == 0 and d["checks"] == [] and d["warnings"]


@pytest.mark.parametrize(
    "argv",
    [
        ["frobnicate"],
        ["chsh", "--bases", "xz"],
        ["qgrid", "--grid", "1:0:5"],
        ["qgrid", "--times", "a,b"],
        ["chsh", "--alpha", "three"],
    ],
)
def test_usage_errors(capsys, argv):
    assert cli.main(argv) == 2


def test_truncation_is_numeric_error(capsys):
    code, _, err = run(capsys, "chsh", "--cutoff", "8")
    assert code == 3 and "cutoff" in err


def test_coarse_grid_is_numeric_error(tmp_path):
    assert cli.main(["qgrid", "--grid=-2:2:11", "--out", str(tmp_path)]) == 3


def test_missing_config_is_io_error(monkeypatch, tmp_path, capsys):
    monkeypatch.setenv("CATWIG_CONFIG", str(tmp_path / "nope.cfg"))
    assert run(capsys, "dmr-table")[0] == 4


def test_config_precedence(monkeypatch, tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("# demo\nalpha = 2.5\nbeta=2.5\nformat = csv\ncutoff = 40\n")
    monkeypatch.setenv("CATWIG_CONFIG", str(cfg))
    code, out, _ = run(capsys, "chsh", "--format", "json", "--beta", "3")
    d = json.loads(out)
    assert code == 0
    assert d["config"]["alpha"] == 2.5 and d["config"]["beta"] == 3.0 and d["config"]["cutoff"] == 40


def test_bad_config_key(monkeypatch, tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("colour = red\n")
    monkeypatch.setenv("CATWIG_CONFIG", str(cfg))
    assert run(capsys, "dmr-table")[0] == 2


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "catwig.cli", "dmr-table", "--format", "csv"],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0 and r.stdout.count("\n") == 17
