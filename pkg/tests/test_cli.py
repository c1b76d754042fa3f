import json
import subprocess
import sys

import numpy as np
import pytest

from optcorr import __version__
from optcorr.cli import main
from optcorr.cones import read_ray_table_csv
from optcorr.discovery import expected_rays
from optcorr.states import bell_state, save_state, state_to_json


def test_discover_json(capsys):
    assert main(["discover", "--cone", "10", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["tool"] == f"optcorr {__version__}"
    assert doc["config"]["cone"] == "10"
    rays = {tuple(r["ray"]) for r in doc["rows"]}
    assert rays == set(expected_rays("10", False))


def test_discover_csv_round_trip(tmp_path):
    out = tmp_path / "c.csv"
    assert main(["discover", "--cone", "00", "--finite", "--format", "csv", "-o", str(out)]) == 0
    label, cols, rays = read_ray_table_csv(out.read_text())
    assert label == "C∩00" and len(rays) == 6 and cols[0] == "A"


def test_discover_expect_and_reference_tables(tmp_path, capsys):
    code = main(["discover", "--cone", "11", "--expect", "paper",
                 "--paper-tables", str(tmp_path)])
    assert code == 0
    assert "match" in capsys.readouterr().err
    text = (tmp_path / "finite_cones.txt").read_text()
    assert "C∩10" in text and "?" not in text
    assert (tmp_path / "cones.txt").exists()


def test_discover_mismatch_exit_code(monkeypatch, capsys):
    import optcorr.cli as cli
    monkeypatch.setattr(cli, "expected_rays", lambda label, finite: [(1, 0, 0, 0, 0, 0, 0)])
    assert main(["discover", "--cone", "00", "--expect", "paper"]) == 1
    assert "MISMATCH" in capsys.readouterr().err


def test_discover_is_deterministic(capsys):
    main(["discover", "--cone", "01", "--format", "json"])
    a = capsys.readouterr().out
    main(["discover", "--cone", "01", "--format", "json"])
    assert capsys.readouterr().out == a


def test_evaluate_named(tmp_path, capsys):
    out = tmp_path / "e.json"
    assert main(["evaluate", "--measure", "Q", "--named", "bell", "--restarts", "1",
                 "-o", str(out)]) == 0
    line = capsys.readouterr().out
    assert line.startswith("value 1.000000")
    doc = json.loads(out.read_text())
    assert doc["config"]["named"] == "bell"
    assert doc["estimate"]["lower_bound"] == pytest.approx(1.0)


def test_evaluate_state_file_and_alpha(tmp_path, capsys):
    path = tmp_path / "bell.json"
    save_state(bell_state(), path)
    assert main(["evaluate", "--alpha", "0,0,0,0,1,0,0", "--state-file", str(path),
                 "--restarts", "1"]) == 0
    doc = json.loads(capsys.readouterr().out.split("\n", 1)[1])
    assert doc["estimate"]["value"] == pytest.approx(1.0, abs=1e-3)


def test_evaluate_rejects_bad_state(tmp_path, capsys):
    data = state_to_json(bell_state())
    data["matrix"][0][3] = [0.2, 0.0]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    assert main(["evaluate", "--measure", "P", "--state-file", str(path)]) == 2
    assert "Hermitian" in capsys.readouterr().err
    data = state_to_json(bell_state())
    data["matrix"] = (2 * np.array(data["matrix"])).tolist()
    path.write_text(json.dumps(data))
    assert main(["evaluate", "--measure", "P", "--state-file", str(path)]) == 2
    assert "trace" in capsys.readouterr().err


def test_evaluate_rejects_infinite_alpha(capsys):
    assert main(["evaluate", "--alpha", "0,0,-1,0,0,0,0", "--named", "bell"]) == 2
    assert "infinite" in capsys.readouterr().err


def test_evaluate_usage_errors(capsys):
    assert main(["evaluate", "--named", "bell"]) == 2
    assert main(["evaluate", "--measure", "P", "--alpha", "1,2", "--named", "bell"]) == 2
    assert main(["evaluate", "--alpha", "1,2", "--named", "bell"]) == 2


def test_verify_suite_with_sidecar(tmp_path, capsys):
    out = tmp_path / "v.json"
    assert main(["verify", "--suite", "divergence", "-o", str(out)]) == 0
    assert "checks passed" in capsys.readouterr().out
    doc = json.loads(out.read_text())
    assert doc["passed"] and doc["config"]["suite"] == "divergence"


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "optcorr", "--version"],
                       capture_output=True, text=True, check=True)
    assert r.stdout.strip() == f"optcorr {__version__}"
