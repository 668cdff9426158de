import json
import subprocess
import sys
import time

import pytest

from finpack.cli import main
from finpack.constructions import prop13_extremal
from finpack.fp_core import write_point_set
from finpack.groups import write_matrix_set
from finpack.sweep import CSV_FIELDS


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_ok(capsys):
    t0 = time.perf_counter()
    code, out, _ = run(capsys, "verify", "--p", "3")
    assert code == 0 and time.perf_counter() - t0 < 10
    assert all(json.loads(line)["ok"] for line in out.splitlines())


def test_verify_not_prime(capsys):
    code, _, err = run(capsys, "verify", "--p", "4")
    assert code == 2 and "prime" in err.lower()


def test_verify_unknown_check(capsys):
    assert run(capsys, "verify", "--p", "3", "--only", "bogus")[0] == 2


def test_verify_failure_exit_code(capsys, monkeypatch):
    from finpack import verify
    monkeypatch.setitem(verify.CHECKS, "always-fails", lambda p, rng: (False, "forced"))
    code, _, err = run(capsys, "verify", "--p", "3", "--only", "always-fails")
    assert code == 1 and "always-fails" in err


@pytest.fixture
def files(tmp_path):
    cfg = prop13_extremal(5)
    write_matrix_set(cfg.sets["S"], tmp_path / "S.txt")
    write_point_set(cfg.sets["E"], tmp_path / "E.txt")
    return tmp_path


def test_pack_json_and_csv(capsys, files):
    code, out, _ = run(capsys, "pack", "prop-1.3", "--S", str(files / "S.txt"), "--E", str(files / "E.txt"))
    assert code == 0 and json.loads(out)["image_size"] == 24
    code, out, _ = run(capsys, "pack", "prop-1.3", "--S", str(files / "S.txt"), "--E", str(files / "E.txt"),
                       "--format", "csv")
    assert out.splitlines()[0] == ",".join(CSV_FIELDS)


def test_bounds_and_energy(capsys, files):
    code, out, _ = run(capsys, "bounds", "thm-2.1", "--A", str(files / "E.txt"), "--B", str(files / "E.txt"),
                       "--S", str(files / "S.txt"))
    rep = json.loads(out)
    assert code == 0 and rep["theorem_id"] == "thm-2.1" and rep["exact"] == 6 * 5 * 6
    code, out, _ = run(capsys, "energy", "--S", str(files / "S.txt"))
    assert json.loads(out)["energy2"] == 120 ** 3
    assert run(capsys, "bounds", "thm-2.1", "--A", str(files / "E.txt"))[0] == 2
    assert run(capsys, "bounds", "nope")[0] == 2


def test_bounds_weighted(capsys, tmp_path):
    (tmp_path / "P.txt").write_text("p=5 kind=points\n0,0,3\n1,1\n")
    (tmp_path / "L.txt").write_text("p=5 kind=lines\n1,4,0,2\n1,0,0\n")
    code, out, _ = run(capsys, "bounds", "sdz-multi", "--points", str(tmp_path / "P.txt"),
                       "--lines", str(tmp_path / "L.txt"))
    assert code == 0 and json.loads(out)["exact"] == 11


def test_incidence(capsys, files):
    code, out, _ = run(capsys, "incidence", "--A", str(files / "E.txt"), "--B", str(files / "E.txt"),
                       "--full", "5", "--image")
    d = json.loads(out)
    assert code == 0 and d["incidences"] == 180 and d["image_size"] == 24


def test_construct_to_directory(capsys, tmp_path):
    code, out, _ = run(capsys, "construct", "obs1", "--p", "13", "--dA", "3", "--dB", "12", "--out", str(tmp_path))
    assert code == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["actual"]["|S(E)|"] == 12
    assert (tmp_path / manifest["files"]["S"]).exists()


def test_construct_stdout(capsys):
    code, out, _ = run(capsys, "construct", "obs3", "--p", "5", "--values", "1,2")
    assert code == 0 and json.loads(out)["actual"]["|X(E)|"] == 50
    assert run(capsys, "construct", "obs1", "--p", "13", "--dA", "5")[0] == 2


def test_sweep_empty(capsys, tmp_path):
    spec = tmp_path / "s.json"
    spec.write_text('{"seed": 1, "runs": []}')
    code, out, _ = run(capsys, "sweep", str(spec), "--threads", "1")
    assert code == 0 and out.strip() == ",".join(CSV_FIELDS)


def test_missing_file(capsys):
    assert run(capsys, "energy", "--S", "/nonexistent/S.txt")[0] == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "finpack", "verify", "--p", "3", "--only", "sl2-order"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["ok"]
