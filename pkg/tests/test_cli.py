"""Command line entry points."""

import json

import numpy as np
import pytest

from relaysim.cli import main
from relaysim.relay import ResidualBerTable


def test_calibrate_writes_table(tmp_path, capsys):
    out = tmp_path / "table.csv"
    rc = main(["calibrate", "--mod", "qpsk", "--grid=-6,0,6", "--info-bits", "10000",
               "--block-length", "254", "--seed", "3", "--out", str(out)])
    assert rc == 0
    table = ResidualBerTable.load_csv(out)
    assert table.gamma_sr_db.tolist() == [-6.0, 0.0, 6.0]
    assert np.all(np.diff(table.p) <= 0)


def test_calibrate_rejects_incompatible_block_length(tmp_path, capsys):
    rc = main(["calibrate", "--mod", "qam16", "--grid", "0", "--info-bits", "10000",
               "--block-length", "1023", "--out", str(tmp_path / "t.csv")])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_simulate_sweep_with_overrides(tmp_path, capsys):
    cfg = {"info_length": 126, "combiner": "none", "mode": "no-relay",
           "gamma0_db": [4.0], "max_blocks": 512, "target_errors": 1000000000}
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "sweep.csv"
    rc = main(["simulate", "--config", str(cfg_path), "--gamma0", "6,8",
               "--trials", "32", "--seed", "5", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "gamma0_db,combiner,mode,ber,ci95,bits,errors"
    assert len(lines) == 3
    assert lines[1].startswith("6,none,no-relay,")
    assert lines[2].startswith("8,none,no-relay,")
    assert "gamma0=6" in capsys.readouterr().err


def test_simulate_combiner_override_replaces_curves(tmp_path):
    cfg = {"info_length": 126, "gamma0_db": [4.0], "max_blocks": 16,
           "target_errors": 1000000000,
           "curves": [["none", "no-relay"], ["ml", "mimo-1x2"]]}
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "sweep.csv"
    rc = main(["simulate", "--config", str(cfg_path), "--combiner", "none",
               "--mode", "no-relay", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 2  # overrides collapse the curve list to one


def test_simulate_bad_config_exits_nonzero(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"combiner": "zf"}))
    rc = main(["simulate", "--config", str(cfg_path)])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_simulate_missing_config_file(tmp_path, capsys):
    rc = main(["simulate", "--config", str(tmp_path / "nope.json")])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_module_entry_point_help():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "relaysim", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "simulate" in proc.stdout and "calibrate" in proc.stdout
