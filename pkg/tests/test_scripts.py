import runpy
import sys
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


@pytest.mark.parametrize("name,args", [
    ("energy_growth.py", ["--max-p", "7"]),
    ("rich_points.py", ["--primes", "7", "--trials", "2"]),
    ("calibrate.py", [str(SCRIPTS / "example_sweep.json")]),
])
def test_script_runs(name, args, monkeypatch, capsys):
    monkeypatch.setattr(sys, "argv", [name, *args])
    runpy.run_path(str(SCRIPTS / name), run_name="__main__")
    assert capsys.readouterr().out.strip()
