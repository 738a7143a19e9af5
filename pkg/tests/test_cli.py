import json
import subprocess
import sys

import pytest

from orbitconn.cli import main
from orbitconn.report import expected_feasible, read_report, write_report


def run(argv, capsys):
    rc = main(argv)
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_analyze_c2_minimal(tmp_path, capsys):
    out = tmp_path / "r.json"
    rc, stdout, _ = run(["analyze", "--algebra", "C2", "--orbit", "minimal", "--conditions", "I,IIp,adh", "--out", str(out)], capsys)
    assert rc == 0
    assert stdout == "C2 minimal FEASIBLE dim(M)=0\n"
    d = json.loads(out.read_text())
    assert d["feasible"] and d["certificate"] is None
    assert all(v for k, v in d["checks"].items() if k not in ("witness",))
    assert sorted(map(tuple, d["weights"])) == sorted([("1/1", "0/1"), ("-1/1", "0/1"), ("0/1", "1/1"), ("0/1", "-1/1")])
    assert d["representation"] == "R(pi_1)"


def test_analyze_a2_regular(tmp_path, capsys):
    out = tmp_path / "r.json"
    rc, stdout, _ = run(["analyze", "--algebra", "A2", "--orbit", "regular", "--conditions", "I,IIp", "--out", str(out)], capsys)
    assert rc == 0
    assert stdout.startswith("A2 regular INFEASIBLE")
    d = json.loads(out.read_text())
    assert not d["feasible"]
    assert d["certificate"]["support"] > 0 and d["certificate"]["y_dot_b"] != "0/1"
    assert d["checks"] is None and d["solution_dim"] is None


def test_analyze_custom(tmp_path, capsys):
    f = tmp_path / "my.orbits"
    f.write_text("sub = [1,0]\nother = [1,2]\n")
    rc, stdout, _ = run(["analyze", "--algebra", "C2", "--orbit", "custom", "--orbit-file", str(f), "--label", "sub"], capsys)
    assert rc == 0
    assert stdout.split()[:2] == ["C2", "sub"]


@pytest.mark.parametrize(
    "argv,code",
    [
        (["analyze", "--algebra", "E6"], 3),
        (["analyze", "--algebra", "A5"], 3),
        (["analyze", "--algebra", "A2", "--orbit", "weird"], 2),
        (["analyze"], 2),
        (["frobnicate"], 2),
        (["theorem", "--max-rank", "5"], 2),
        (["analyze", "--algebra", "A2", "--conditions", "IIp"], 2),
        (["analyze", "--algebra", "A2", "--conditions", "I,IV"], 2),
        (["analyze", "--algebra", "A2", "--orbit", "custom"], 2),
        (["analyze", "--algebra", "A2", "--orbit", "custom", "--orbit-file", "/nonexistent/x"], 4),
        (["analyze", "--algebra", "A1", "--out", "/nonexistent/dir/r.json"], 4),
    ],
)
def test_exit_codes(argv, code, capsys):
    rc, _, _ = run(argv, capsys)
    assert rc == code


def test_bad_orbit_file(tmp_path, capsys):
    f = tmp_path / "bad.orbits"
    f.write_text("x = [1,0\n")
    rc, _, err = run(["analyze", "--algebra", "A2", "--orbit", "custom", "--orbit-file", str(f)], capsys)
    assert rc == 2 and "line 1" in err
    f.write_text("x = [5,5]\n")
    rc, _, _ = run(["analyze", "--algebra", "A2", "--orbit", "custom", "--orbit-file", str(f)], capsys)
    assert rc == 2


def test_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["analyze", "--algebra", "B2", "--orbit", "minimal", "--conditions", "I,IIp,adh", "--out", str(p)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
    for p in (a, b):
        assert main(["analyze", "--algebra", "A2", "--orbit", "regular", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("argv", [["--algebra", "C2", "--conditions", "I,IIp,adh"], ["--algebra", "G2", "--orbit", "regular"]])
def test_round_trip(tmp_path, argv, capsys):
    p = tmp_path / "r.json"
    assert main(["analyze", *argv, "--out", str(p)]) == 0
    rep = read_report(p)
    q = tmp_path / "s.json"
    write_report(rep, q)
    assert read_report(q) == rep
    assert p.read_bytes() == q.read_bytes()
    assert rep.feasible != (rep.certificate is not None)
    assert (rep.checks is not None) == rep.feasible


def test_no_floats_in_report(tmp_path, capsys):
    p = tmp_path / "r.json"
    main(["analyze", "--algebra", "C2", "--conditions", "I,IIp,adh", "--out", str(p)])

    def walk(x):
        if isinstance(x, float):
            raise AssertionError(f"float {x} in report")
        if isinstance(x, dict):
            for v in x.values():
                walk(v)
        if isinstance(x, list):
            for v in x:
                walk(v)

    walk(json.loads(p.read_text()))


def test_theorem_rank1(capsys):
    rc, out, _ = run(["theorem", "--max-rank", "1"], capsys)
    assert rc == 0
    assert out.splitlines() == ["A1 minimal FEASIBLE dim(M)=3", "agreement=true"]


def test_theorem_rank2(tmp_path, capsys):
    p = tmp_path / "t.json"
    rc, out, _ = run(["theorem", "--max-rank", "2", "--out", str(p)], capsys)
    assert rc == 0
    d = json.loads(p.read_text())
    feas = {(r["algebra"], r["orbit"]) for r in d["rows"] if r["feasible"]}
    assert feas == {("A1", "minimal"), ("B2", "minimal"), ("C2", "minimal")}
    assert {r["algebra"] for r in d["rows"]} == {"A1", "A2", "B2", "C2", "G2"}
    assert d["agreement"] is True
    assert out.strip().endswith("agreement=true")
    # B2 ≅ C2: the solver must agree on both
    rows = {(r["algebra"], r["orbit"]): r for r in d["rows"]}
    for key in ("feasible", "solution_dim", "feasible_adh", "solution_dim_adh"):
        assert rows["B2", "minimal"][key] == rows["C2", "minimal"][key]


def test_expected_predicate():
    assert expected_feasible("A", 1, "minimal")
    assert expected_feasible("B", 2, "minimal")
    assert expected_feasible("C", 4, "minimal")
    assert not expected_feasible("C", 3, "regular")
    assert not expected_feasible("B", 3, "minimal")
    assert not expected_feasible("A", 2, "minimal")
    assert not expected_feasible("D", 4, "minimal")


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "orbitconn", "theorem", "--max-rank", "1"], capture_output=True, text=True)
    assert r.returncode == 0
    assert r.stdout.startswith("A1 minimal FEASIBLE")
