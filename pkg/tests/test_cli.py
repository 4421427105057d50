import io
import json

import pytest

from cubepack.certificate import read_file, serialize_pattern
from cubepack.cli import EXIT_INVALID, EXIT_OK, EXIT_USAGE, main
from cubepack.grid import PatternGraph, cube
from cubepack.report import read_csv

P3 = PatternGraph(cube(2), ((0, 0), (0, 1), (1, 1)))


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def kv(text):
    return dict(line.split("=", 1) for line in text.splitlines())


@pytest.fixture
def p3_file(tmp_path):
    path = tmp_path / "p3q2.pat"
    path.write_text(serialize_pattern(P3))
    return str(path)


def test_construct_odd_power(tmp_path):
    out = tmp_path / "c.pack"
    code, text = run("construct", "odd-power", "--l", "3", "--t", "1", "--n", "4", "--out", str(out))
    assert code == EXIT_OK and kv(text)["uncovered"] == "1"
    assert run("verify", str(out))[0] == EXIT_OK


def test_construct_induced_power(tmp_path):
    out = tmp_path / "c.pack"
    code, _ = run("construct", "induced-power", "--l", "3", "--t", "1", "--n", "7", "--m", "2",
                  "--out", str(out))
    assert code == EXIT_OK
    code, text = run("verify", str(out))
    assert code == EXIT_OK and json.loads(text)["audit"]["valid"]


def test_construct_one_mod_l(tmp_path, p3_file):
    out = tmp_path / "c.mcov"
    code, text = run("construct", "one-mod-l", "--pattern", p3_file, "--out", str(out))
    info = kv(text)
    assert code == EXIT_OK and info["residue"] == "1" and info["host"] == "6,6"
    assert read_file(out).residue == 1
    assert run("verify", str(out))[0] == EXIT_OK


@pytest.mark.parametrize("argv", [
    ("construct", "shift-l", "--n", "3", "--lift", "2"),
    ("construct", "any-power", "--l", "6", "--n", "3"),
    ("construct", "ramras", "--s", "3"),
    ("construct", "staircase", "--l", "4"),
    ("construct", "staircase", "--block", "0,0;0,1;1,1"),
])
def test_every_construct_verifies(tmp_path, p3_file, argv):
    out = tmp_path / "x.cert"
    argv = list(argv) + ["--out", str(out)]
    if argv[1] == "shift-l":
        argv += ["--pattern", p3_file]
    assert run(*argv)[0] == EXIT_OK
    assert run("verify", str(out))[0] == EXIT_OK


def test_corrupted_file(tmp_path):
    out = tmp_path / "c.pack"
    run("construct", "ramras", "--s", "2", "--out", str(out))
    lines = out.read_text().splitlines()
    copies = [i for i, ln in enumerate(lines) if ln.startswith("copy")]
    # make the second path reuse a vertex of the first
    first_vertex = lines[copies[0]].split("map ")[1].split(";")[0].split("->")[1]
    head, rest = lines[copies[1]].split("map ")
    maps = rest.split(";")
    maps[0] = maps[0].split("->")[0] + "->" + first_vertex
    lines[copies[1]] = head + "map " + ";".join(maps)
    out.write_text("\n".join(lines) + "\n")
    code, text = run("verify", str(out))
    assert code == EXIT_INVALID
    failures = json.loads(text)["audit"]["failures"]
    assert any("disjointness" in f[1] for f in failures)


def test_verify_separating_and_codim2(tmp_path):
    from cubepack.certificate import write_file
    from cubepack.oracle import greedy_p3_power_packing

    out = tmp_path / "g.pack"
    write_file(out, greedy_p3_power_packing(3, 6))
    code, text = run("verify", "--separating", "--codim2", str(out))
    doc = json.loads(text)
    assert code == EXIT_OK
    assert doc["separating"]["is_separating"] and doc["separating"]["implied_bound"] > 2.5
    assert doc["codim2"]["valid"]


@pytest.mark.parametrize("argv", [
    ("construct", "odd-power", "--l", "3"),
    ("construct", "staircase"),
    ("bogus",),
])
def test_argument_errors(argv):
    with pytest.raises(SystemExit) as exc:
        run(*argv)
    assert exc.value.code == EXIT_USAGE


@pytest.mark.parametrize("argv", [
    ("construct", "odd-power", "--l", "5", "--n", "2"),
    ("construct", "induced-power", "--l", "4", "--n", "20", "--m", "2"),
    ("verify", "/nonexistent/file.pack"),
    ("report", "odd-power", "--l", "3", "--n", "9..4"),
])
def test_runtime_errors(argv, capsys):
    assert run(*argv)[0] == EXIT_USAGE
    assert capsys.readouterr().err.startswith("cubepack: ")


def test_parse_error_exit(tmp_path):
    bad = tmp_path / "bad.pack"
    bad.write_text("%cubepack v9 packing\n")
    assert run("verify", str(bad))[0] == EXIT_USAGE


def test_report_odd_power():
    code, text = run("report", "odd-power", "--l", "3", "--t", "1", "--n", "4..8")
    assert code == EXIT_OK
    assert [r["uncovered"] for r in read_csv(text)] == [1, 2, 1, 2, 1]


def test_report_hamilton(tmp_path):
    out = tmp_path / "h.csv"
    code, _ = run("report", "consecutive-hamilton", "--l", "4", "--n", "2..4", "--out", str(out))
    assert code == EXIT_OK
    assert [r["status"] for r in read_csv(out.read_text())] == ["UNSAT"] * 3


def test_module_entry_point():
    import subprocess
    import sys

    res = subprocess.run([sys.executable, "-m", "cubepack", "report", "odd-power", "--l", "3", "--n", "4"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("n,uncovered")
