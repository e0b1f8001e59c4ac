import csv
import json
import math
from pathlib import Path

import pytest

from ajel import DataFormatError
from ajel.cli import (EXIT_NUMERIC, EXIT_OK, EXIT_PARSE, EXIT_USAGE, RunConfig,
                      cmd_ci, cmd_simulate, cmd_test, ingest_csv, main, render)

from oracles import u_stat_two_brute

DMD = Path(__file__).parent / "data" / "dmd_synthetic.csv"


def _write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def _groups(path, col):
    out = {}
    with open(path, encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out.setdefault(row["group"], []).append(float(row[col]))
    return out


def test_ingest_two_groups():
    data = ingest_csv(DMD)
    assert data.groups == ["noncarrier", "carrier"] and data.columns == ["ck", "h"]
    assert [len(data.rows[g]) for g in data.groups] == [134, 75]
    assert data.ordered_groups("carrier") == ["carrier", "noncarrier"]


def test_ingest_one_group(tmp_path):
    data = ingest_csv(_write(tmp_path, "group,v\na,1\na,2.5\n\na,-3e2\n"))
    assert data.groups == ["a"] and data.rows["a"] == [(1.0,), (2.5,), (-300.0,)]


@pytest.mark.parametrize("text, match", [
    ("group,v\na,1\nb,2\nc,3\n", r":4: third group"),
    ("group,v\na,1\na,2,3\n", r":3: expected 2 fields"),
    ("group,v\na,1\na,nan\n", r":3: non-finite"),
    ("group,v\na,x\n", r":2: non-numeric"),
    ("label,v\na,1\n", r":1: header"),
    ("", "empty file"),
    ("group,v\n", "no data rows"),
])
def test_ingest_errors(tmp_path, text, match):
    with pytest.raises(DataFormatError, match=match):
        ingest_csv(_write(tmp_path, text))


def test_ci_on_fixture_matches_brute_force():
    g = _groups(DMD, "ck")
    expected = u_stat_two_brute(g["noncarrier"], g["carrier"], lambda a, b: float(b > a))
    report = cmd_ci(RunConfig("auc", ("JEL", "AJEL"), (0.9, 0.95), columns=["ck"]),
                    ingest_csv(DMD))
    assert report["point_estimate"] == pytest.approx(expected, abs=1e-15)
    assert report["sizes"] == [134, 75] and len(report["intervals"]) == 4
    for row in report["intervals"]:
        assert row["lower"] < report["point_estimate"] < row["upper"]


def test_x_group_swap_maps_auc_to_complement(tmp_path):
    data = ingest_csv(DMD)
    # the fixture has ties; the midrank kernel makes the complement exact
    a = cmd_ci(RunConfig("auc-midrank", columns=["ck"]), data)["point_estimate"]
    b = cmd_ci(RunConfig("auc-midrank", columns=["ck"], x_group="carrier"), data)
    assert a + b["point_estimate"] == pytest.approx(1.0, abs=1e-15)
    assert b["groups"] == ["carrier", "noncarrier"]
    tie_free = _write(tmp_path, "group,a,b\nx,1,5\nx,4,2\ny,3,3\ny,6,1\ny,0.5,0.7\n")
    data = ingest_csv(tie_free)
    d1 = cmd_ci(RunConfig("auc-diff"), data)["point_estimate"]
    d2 = cmd_ci(RunConfig("auc-diff", x_group="y"), data)["point_estimate"]
    assert d1 != 0 and d1 == -d2


def test_test_command():
    data = ingest_csv(DMD)
    rep = cmd_ci(RunConfig("auc", columns=["ck"]), data)
    res = cmd_test(RunConfig("auc", ("AJEL", "JEL"), columns=["ck"],
                             theta0=rep["point_estimate"]), data)
    assert all(t["p_value"] == 1.0 for t in res["tests"])
    res = cmd_test(RunConfig("auc", ("AJEL",), columns=["ck"], theta0=0.5), data)
    assert res["tests"][0]["p_value"] < 1e-3
    res = cmd_test(RunConfig("auc", ("JEL",), columns=["ck"], theta0=5.0), data)
    assert res["tests"][0]["p_value"] == 0.0 and res["tests"][0]["status"] == "outside-hull"


def test_toy_interval_through_main(tmp_path, capsys):
    p = _write(tmp_path, "group,v\ns,-1\ns,1\n")
    assert main(["ci", str(p), "--method", "jel", "--level", "0.95"]) == EXIT_OK
    assert "(-0.9239, 0.9239)" in capsys.readouterr().out


def test_json_round_trip(tmp_path):
    out = tmp_path / "r.json"
    assert main(["ci", str(DMD), "--kernel", "auc", "--columns", "ck", "--method", "both",
                 "--format", "json", "--output", str(out)]) == EXIT_OK
    parsed = json.loads(out.read_text())
    direct = cmd_ci(RunConfig("auc", ("JEL", "AJEL"), columns=["ck"]), ingest_csv(DMD))
    assert parsed == json.loads(json.dumps(direct))
    assert parsed["schema_version"] == 1
    assert parsed["intervals"] == direct["intervals"]


def test_infinite_values_survive_json(tmp_path):
    p = _write(tmp_path, "group,v\ns,-1\ns,1\n")
    rep = cmd_ci(RunConfig("mean", ("AJEL",), (0.95,)), ingest_csv(p))
    back = json.loads(render(rep, "json"))
    assert back["intervals"][0]["upper"] == math.inf


def test_exit_codes(tmp_path, capsys):
    bad = _write(tmp_path, "group,v\na,1\nb,2\nc,3\n")
    assert main(["ci", str(bad)]) == EXIT_PARSE
    assert main(["ci", str(DMD), "--kernel", "mean"]) == EXIT_USAGE  # two groups
    assert main(["ci", str(DMD), "--kernel", "auc"]) == EXIT_USAGE  # two columns
    assert main(["ci", str(tmp_path / "missing.csv")]) == EXIT_PARSE
    assert main(["simulate", "table7"]) == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["ci"])
    assert exc.value.code == EXIT_USAGE
    big = _write(tmp_path, "group,v\ns,1e308\ns,-1e308\ns,1e308\n")
    assert main(["ci", str(big), "--kernel", "variance"]) == EXIT_NUMERIC
    capsys.readouterr()


def test_simulate_schema_quick_and_spec_file(tmp_path):
    rep = cmd_simulate("table1", seed=3, quick=True)
    assert len(rep["results"]) == 3
    assert sum(len(r["cells"]) for r in rep["results"]) == 12
    assert all(r["spec"]["replications"] == 100 for r in rep["results"])
    text = render(rep, "csv").splitlines()
    assert len(text) == 13 and text[0].startswith("design,method,level")
    spec = {"sizes": [12], "generators": [{"kind": "normal", "params": [0, 1]}],
            "kernel": "mean", "theta_true": 0.0, "replications": 30}
    path = _write(tmp_path, json.dumps(spec), "spec.json")
    rep = cmd_simulate(str(path), seed=1, quick=True)
    assert rep["results"][0]["spec"]["replications"] == 3
    assert json.loads(render(rep, "json"))["results"] == json.loads(json.dumps(rep["results"]))
