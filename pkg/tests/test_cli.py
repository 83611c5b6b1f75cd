import json
import subprocess
import sys

import pytest

from twisted_np import cli
from twisted_np.errors import Finding


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, out


def rows(argv, capsys):
    code, out = run(argv + ["--format", "json"], capsys)
    doc = json.loads(out)
    assert doc["schema_version"] == 1
    return code, doc["rows"]


def test_polygon_command(capsys):
    code, rs = rows(["polygon", "--p", "11", "--d", "3", "--u", "0,1"], capsys)
    assert code == 0
    assert {0, 3} <= set(rs[0]["contact_points"])
    assert rs[1]["P"][3] == "11/1" == rs[1]["hodge"][3]
    assert all(r["status"] == "pass" for r in rs)


def test_malformed_input(capsys):
    assert run(["polygon", "--p", "11", "--d", "3", "--u", "x"], capsys)[0] == 2
    assert run(["polygon", "--p", "12", "--d", "3"], capsys)[0] == 2
    assert run(["polygon", "--p", "11", "--d", "3", "--u", "10"], capsys)[0] == 2
    assert run(["polygon", "--p", "11"], capsys)[0] == 2
    assert run(["polygon", "--p", "11", "--d", "3", "--format", "xml"], capsys)[0] == 2
    assert run(["bogus"], capsys)[0] == 2


def test_hasse_command(capsys):
    code, rs = rows(["hasse", "--p", "11", "--d", "3", "--u", "all"], capsys)
    assert code == 0 and len(rs) == 10
    code, rs = rows(["hasse", "--p", "11", "--d", "3", "--n", "0-7"], capsys)
    assert [m["n"] for m in rs[0]["monomials"]] == [1, 2]
    code, rs = rows(["hasse", "--p", "11", "--a", "2", "--d", "3", "--u", "14"], capsys)
    assert code == 0
    assert all(len(m["components"]) == 2 for m in rs[0]["monomials"])


def test_lfun_command(capsys):
    code, rs = rows(["lfun", "--p", "5", "--d", "2"], capsys)
    assert code == 0
    assert rs[0]["computed"] == [["0/1", "0/1"], ["1/1", "0/1"], ["2/1", "2/1"]]
    assert rs[0]["equal"] is True
    code, rs = rows(["lfun", "--p", "11", "--d", "3", "--lambda", "all"], capsys)
    assert code == 0 and len(rs) == 10 and all(r["equal"] for r in rs)
    code, rs = rows(["lfun", "--p", "5", "--a", "2", "--d", "2", "--u", "1"], capsys)
    assert code == 0 and rs[0]["equal"]


def test_precision_exit(capsys):
    code, rs = rows(["lfun", "--p", "11", "--d", "3", "--u", "9", "--n-precision", "1"], capsys)
    assert code == 3
    assert rs[0]["status"] == "precision" and "raise N" in rs[0]["error"]
    code, _ = rows(["dwork", "--p", "11", "--d", "3", "--e-cutoff", "1"], capsys)
    assert code == 3


def test_dwork_command(capsys):
    code, rs = rows(["dwork", "--p", "11", "--d", "3", "--u", "0-2"], capsys)
    assert code == 0
    for r in rs:
        assert r["orders_match"] and r["leading_match"] and r["stable"] and r["lfun_agreement"]
        assert all(row["sign"] in (1, -1) for row in r["rows"])
    assert run(["dwork", "--p", "5", "--a", "2", "--d", "2"], capsys)[0] == 2


def test_finding_exit(capsys, monkeypatch):
    def boom(*_):
        raise Finding("synthetic mismatch")

    monkeypatch.setitem(cli.RUNNERS, "polygon", boom)
    code, rs = rows(["polygon", "--p", "5", "--d", "2"], capsys)
    assert code == 1 and rs[0]["status"] == "finding"


def test_empty_grid(capsys):
    assert run(["verify", "--p", "5", "--d", "2", "--u", ""], capsys)[0] == 2


def test_grid_file_and_flags(tmp_path, capsys):
    grid = tmp_path / "grid.txt"
    grid.write_text("# desk\np = 11\nd=3\nu=0-3\nformat=csv\n")
    code, out = run(["polygon", "--grid-file", str(grid), "--u", "1"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 2 and lines[1].split(",")[4] == "1"
    assert run(["polygon", "--grid-file", str(tmp_path / "missing")], capsys)[0] == 2
    grid.write_text("frobnicate=1\n")
    assert run(["polygon", "--grid-file", str(grid)], capsys)[0] == 2


def test_config_round_trip():
    cfg = cli.build_config("dwork", {"p": "11", "d": "3", "u": "0-2,5", "lambda": "0,1", "j-size": "25"}, {})
    again = cli.RunConfig.from_lines("dwork", cfg.to_lines())
    assert again == cfg
    assert cfg.units()[:2] == [(11, 1, 3, 0, 0), (11, 1, 3, 0, 1)]


def test_out_file_and_determinism(tmp_path, capsys):
    outs = []
    for fmt in ("csv", "json", "csv", "json", "tsv"):
        path = tmp_path / f"o.{fmt}"
        assert cli.main(["verify", "--p", "5", "--d", "2", "--u", "all", "--lambda", "all",
                         "--format", fmt, "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[2] and outs[1] == outs[3]
    assert b"\t" in outs[4]
    assert capsys.readouterr().out == ""


def test_parallel_matches_serial(capsys):
    argv = ["lfun", "--p", "7", "--d", "2", "--u", "all", "--format", "csv"]
    serial = run(argv, capsys)
    parallel = run(argv + ["--jobs", "2"], capsys)
    assert serial == parallel and serial[0] == 0


def test_parse_lists():
    assert cli.parse_int_list("0-3,7,2", "u") == (0, 1, 2, 3, 7)
    assert cli.parse_selector("ALL", "u") == "all"
    with pytest.raises(cli.InvalidInputError):
        cli.parse_int_list("5-2", "u")


def test_default_desk_grid(capsys):
    code, rs = rows(["verify"], capsys)
    assert code == 0
    assert len(rs) == 255 and all(r["status"] == "pass" for r in rs)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "twisted_np", "polygon", "--p", "5", "--d", "2", "--format", "tsv"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.splitlines()[0].split("\t")[:3] == ["schema_version", "p", "a"]
