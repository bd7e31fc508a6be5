import io
import json
import subprocess
import sys

import pytest

from forbidpat import example_text
from forbidpat.cli import main


@pytest.fixture
def path(tmp_path):
    def write(name):
        p = tmp_path / f"{name}.trs"
        p.write_text(example_text(name))
        return str(p)

    return write


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_validate(path):
    code, out = run("validate", path("ex2nd"))
    assert code == 0 and "2 rules, 1 patterns" in out


def test_check_canonical(path):
    code, out = run("check", path("ex2nd"), "--canonical")
    assert code == 0 and "canonical: yes" in out


def test_check_simple_negative(path):
    code, out = run("check", path("faa"), "--simple")
    assert code == 1
    assert "simple: no" in out and "parallel" in out


def test_check_json(path):
    code, out = run("check", path("faa"), "--simple", "--canonical", "--json")
    data = json.loads(out)
    assert code == 1 and data["verdict"] is False
    assert data["violations"] and all("message" in v for v in data["violations"])


def test_normalize(path):
    code, out = run("normalize", path("ex2nd"), "-t", "2nd(inf(0))")
    assert code == 0 and out.strip() == "s(0)"


def test_normalize_budget(path, capsys):
    code, _ = run("normalize", path("toprule"), "-t", "a", "--max-steps", "5")
    assert code == 1
    assert "budget" in capsys.readouterr().err


def test_step_lists_witnesses(path):
    code, out = run("step", path("ex2nd"), "-t", "2nd(cons(0, cons(s(0), inf(0))))")
    assert code == 0
    assert "allowed   e  rule 1  -> s(0)" in out
    assert "forbidden 1.2.2  rule 0  by pattern 0" in out


def test_reduce(path, capsys):
    code, out = run("reduce", path("ex2nd"), "-t", "2nd(inf(0))")
    assert code == 0 and out.strip().splitlines()[-1] == "s(0)"
    code, out = run("reduce", path("toprule"), "-t", "a", "--max-steps", "4")
    assert code == 1 and "stopped after 4 steps" in capsys.readouterr().err


def test_transform_outputs(path, tmp_path):
    target = tmp_path / "out.trs"
    code, _ = run("transform", path("ex2nd"), "--tpdb", "-o", str(target))
    assert code == 0
    assert target.read_text().startswith("(VAR x1 x2 x3)\n(RULES\n")
    code, out = run("transform", path("ex2nd"), "--native")
    assert code == 0 and "fun top_NatList : NatList -> NatList ;" in out
    code, out = run("transform", path("takeapp"), "--minimize")
    assert code == 0 and out.count("rule ") == 18


def test_transform_rejects_unsupported(path, capsys):
    p = path("ex2nd")
    with open(p, "a") as fh:
        fh.write("pattern < inf(x), 1, b > ;\n")
    code, _ = run("transform", p)
    assert code == 2 and "only here-patterns" in capsys.readouterr().err


@pytest.mark.parametrize(
    "name,args",
    [
        ("ex2nd", ["--encoding", "innermost"]),
        ("takeapp", ["--encoding", "outermost"]),
        ("faa", ["--encoding", "csr", "--mu", "f=2"]),
    ],
)
def test_oracle(path, name, args):
    code, out = run("oracle", path(name), "--depth", "3", *args)
    assert code == 0 and "0 discrepancies" in out


def test_ground_check_json(path):
    code, out = run("ground-check", path("ex2nd"), "--depth", "3", "--steps", "4", "--json")
    data = json.loads(out)
    assert code == 0 and data["verdict"] is True and data["counterexamples"] == []


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus"],
        ["normalize", "x.trs"],
        ["validate", "/nonexistent/file.trs"],
        ["oracle", "FILE", "--encoding", "csr", "--mu", "=1"],
    ],
)
def test_usage_errors(argv, path, capsys):
    argv = [path("faa") if a == "FILE" else a for a in argv]
    code, _ = run(*argv)
    assert code == 2
    assert capsys.readouterr().err


def test_parse_error_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.trs"
    p.write_text("rule f(x -> x ;")
    code, _ = run("validate", str(p))
    assert code == 2 and "syntax-error" in capsys.readouterr().err


def test_bad_term_exit_code(path, capsys):
    code, _ = run("step", path("ex2nd"), "-t", "2nd(zz)")
    assert code == 2 and "unknown-symbol" in capsys.readouterr().err


def test_module_entry_point(path):
    proc = subprocess.run(
        [sys.executable, "-m", "forbidpat", "check", path("ex2nd"), "--canonical"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and "canonical: yes" in proc.stdout
