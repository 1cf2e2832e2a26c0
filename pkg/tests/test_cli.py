import json
import subprocess
import sys

import numpy as np

from ris_secrecy import cli
from ris_secrecy.harness.experiment import SweepResult, SweepRow


def run(capsys, *argv):
    rc = cli.main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_place_default(capsys):
    rc, out, _ = run(capsys, "place")
    assert rc == 0
    assert "p_opt (m)          [4.8798, 4.9156, 2.1000]" in out


def test_place_with_oracle(capsys, tmp_path):
    f = tmp_path / "s.toml"
    f.write_text("[scene]\nx_bounds = [3.0, 6.0]\ny_bounds = [3.0, 6.0]\n")
    rc, out, _ = run(capsys, "place", "--scene", str(f), "--oracle", "--oracle-step", "0.2")
    assert rc == 0 and "ratio g/oracle" in out


def test_place_infeasible_scene_exit_2(capsys, tmp_path):
    f = tmp_path / "s.toml"
    f.write_text("[scene]\nx_bounds = [3.9, 4.1]\ny_bounds = [5.9, 6.1]\nz_bounds = [1.9, 2.1]\n")
    rc, out, _ = run(capsys, "place", "--scene", str(f))
    assert rc == 2 and "feasible           false" in out
    rc, _, err = run(capsys, "beamform", "--scene", str(f), "--n", "2")
    assert rc == 2
    rc, _, err = run(capsys, "sweep", "--scene", str(f), "--axis", "Ps", "--values", "10",
                     "--trials", "2", "--out", str(tmp_path / "o"))
    assert rc == 2 and "infeasible" in err


def test_degenerate_scene_exit_2(capsys, tmp_path):
    f = tmp_path / "s.toml"
    f.write_text("[scene]\nsource = [5.0, 5.0, 2.0]\n")
    rc, _, err = run(capsys, "place", "--scene", str(f))
    assert rc == 2 and "collinear" in err


def test_beamform_with_oracle_and_dump(capsys, tmp_path):
    dump = tmp_path / "p.json"
    rc, out, _ = run(capsys, "beamform", "--n", "2", "--ps", "20", "--seed", "3", "--oracle",
                     "--dump-sdp", str(dump))
    assert rc == 0
    assert "F / oracle F" in out and "SROCR log:" in out
    ratio = float(out.split("F / oracle F")[1].split()[0])
    assert ratio >= 0.98
    assert json.loads(dump.read_text())["n"] == 2


def test_sweep_writes_outputs(capsys, tmp_path):
    rc, out, _ = run(capsys, "sweep", "--axis", "N", "--values", "2,4", "--schemes",
                     "J-LPB,ndb", "--trials", "3", "--out", str(tmp_path))
    assert rc == 0
    assert (tmp_path / "sweep_N.csv").exists() and (tmp_path / "sweep_N.gp").exists()
    assert len((tmp_path / "sweep_N.csv").read_text().splitlines()) == 5


def test_sweep_degradation_exit_3(capsys, tmp_path, monkeypatch):
    def fake(cfg, axis, values, schemes):
        rows = [SweepRow(v, "JLPB", 0.1, 0.01, 10, 1, np.zeros((1, 3)), degraded=5)
                for v in values]
        return SweepResult(axis, list(values), rows, 10, 1)

    monkeypatch.setattr(cli, "sweep", fake)
    rc, _, err = run(capsys, "sweep", "--axis", "Ps", "--values", "0,5", "--out", str(tmp_path))
    assert rc == 3 and "degradation" in err


def test_usage_errors_exit_1(capsys):
    assert run(capsys, "sweep", "--axis", "Q", "--values", "1", "--out", "x")[0] == 1
    assert run(capsys, "sweep", "--axis", "Ps", "--values", "1", "--schemes", "FOO",
               "--out", "x")[0] == 1
    assert run(capsys, "place", "--scene", "/nonexistent.toml")[0] == 1
    assert cli.main([]) == 1
    assert cli.main(["--help"]) == 0


def test_verify_quick(capsys):
    rc, out, _ = run(capsys, "verify")
    assert rc == 0
    assert out.count("PASS") == 8


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "ris_secrecy", "verify", "--json"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    doc = json.loads(out.stdout)
    assert all(r["passed"] for r in doc["results"])
