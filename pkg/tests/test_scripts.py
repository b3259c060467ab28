import runpy
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parents[1] / "scripts"


@pytest.mark.parametrize(
    "name,argv",
    [
        ("worked_examples.py", []),
        ("qef_spectral_map.py", ["--points", "2", "--grid-size", "256"]),
        ("dispersion_scan.py", ["--steps", "3", "--max-gdd", "1e3"]),
    ],
)
def test_script_runs(name, argv, capsys):
    ns = runpy.run_path(str(SCRIPTS / name))
    ns["main"](argv)
    assert capsys.readouterr().out.strip()
