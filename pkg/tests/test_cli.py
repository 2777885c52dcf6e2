import json
import subprocess
import sys
from pathlib import Path

import pytest

from eqhh import cli
from eqhh.verify import Check

SCEN = Path(__file__).resolve().parents[1] / "scenarios"


def write(tmp_path, data, name="s.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return p


Z2 = {"name": "z2", "group": {"space": "real", "generators": [[["-1", "0"], ["0", "-1"]]]},
      "kmax": 2, "nmax": 4, "tasks": ["verify-all"]}


def test_verify_z2_writes_tables(tmp_path, capsys):
    code = cli.main(["run", str(write(tmp_path, Z2)), "--out", str(tmp_path / "o")])
    assert code == 0
    data = json.loads((tmp_path / "o" / "z2.verify-all.json").read_text())
    assert data and all(c["ok"] for c in data)
    assert "FAIL" not in capsys.readouterr().out


def test_zero_weight_is_input_error(tmp_path):
    p = write(tmp_path, {"circle": {"weights": [0, 1]}, "tasks": ["circle-strata"]})
    assert cli.main(["run", str(p), "--out", str(tmp_path)]) == 2


def test_nmax50_bar_is_guard(tmp_path):
    p = write(tmp_path, {**Z2, "nmax": 50, "tasks": ["bar-oracle"]})
    assert cli.main(["run", str(p), "--out", str(tmp_path)]) == 3


@pytest.mark.parametrize("bad", [
    {"kmax": 1},                                                     # no action
    {**Z2, "circle": {"weights": [1]}},                              # two actions
    {**Z2, "tasks": ["nope"]},
    {**Z2, "tasks": []},
    {**Z2, "format": "xml"},
    {**Z2, "group": {"generators": [[["2", "0"], ["0", "1"]]]}},      # not orthogonal
    {**Z2, "group": {"generators": [[["1/0"]]]}},
    {**Z2, "group": {"generators": [[["z3^"]]]}},
    {"circle": {"weights": [1]}, "tasks": ["hkr-finite"]},
    {**Z2, "tasks": ["theta-check"]},
    {"circle": {"weights": ["a"]}},
])
def test_input_errors(tmp_path, bad):
    assert cli.main(["run", str(write(tmp_path, bad)), "--out", str(tmp_path)]) == 2


def test_invalid_json_and_missing_file(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{nope")
    assert cli.main(["run", str(p)]) == 2
    assert cli.main(["run", str(tmp_path / "missing.json")]) == 2


def test_guard_env_override(tmp_path, monkeypatch):
    p = write(tmp_path, {**Z2, "nmax": 3, "tasks": ["koszul"]})
    monkeypatch.setenv("EQHH_GUARDS", "nmax=2")
    assert cli.main(["run", str(p), "--out", str(tmp_path)]) == 3


def test_verification_failure_dumps_witness(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(cli, "finite_group_checks", lambda *a, **k: [Check("always", True),
                                                                     Check("planted", False, "dim 3 vs 4")])
    code = cli.main(["verify", str(write(tmp_path, Z2)), "--out", str(tmp_path / "o")])
    assert code == 1
    assert "planted" in (tmp_path / "o" / "z2.witness.txt").read_text()
    assert "dim 3 vs 4" in capsys.readouterr().err


def test_outputs_are_deterministic(tmp_path):
    data = {"name": "c", "circle": {"weights": [1, 2]}, "kmax": 2, "nmax": 3,
            "tasks": ["circle-strata", "basic-forms", "vanishing-ideal", "theta-check"]}
    p = write(tmp_path, data)
    outs = []
    for run in ("a", "b"):
        for fmt in ("json", "csv"):
            assert cli.main(["run", str(p), "--out", str(tmp_path / run), "--format", fmt]) == 0
        outs.append({f.name: f.read_bytes() for f in sorted((tmp_path / run).iterdir())})
    assert outs[0] == outs[1] and len(outs[0]) == 8


def test_csv_tables(tmp_path):
    p = write(tmp_path, {**Z2, "tasks": ["koszul", "hkr-finite", "basic-forms"], "format": "csv"})
    assert cli.main(["run", str(p), "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "z2.koszul.csv").read_text().splitlines()
    assert [c.strip() for c in lines[0].split(",")] == ["stratum", "k", "n", "dim"]
    assert len({len(l) for l in lines}) == 1       # aligned columns


def test_shipped_scenarios_parse():
    for p in sorted(SCEN.glob("*.json")):
        if p.stem.startswith(("bad_", "guard_")):
            continue
        sc = cli.load_scenario(p)
        assert sc.tasks


def test_console_entry_point(tmp_path):
    p = write(tmp_path, {**Z2, "nmax": 2, "tasks": ["koszul"]})
    r = subprocess.run([sys.executable, "-m", "eqhh.cli", "run", str(p), "--out", str(tmp_path)],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "koszul" in r.stdout
