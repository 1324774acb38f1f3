import json
import subprocess
import sys
from pathlib import Path

import pytest

from lpsem.cli import main

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_prove(capsys):
    assert run(capsys, "prove", "listnat", "list(cons(0,nil))") == (0, "Proved\n", "")
    code, out, _ = run(capsys, "prove", "listnat", "list(cons(X,Y))")
    assert (code, out) == (1, "FailedFinite\n")
    code, out, _ = run(capsys, "prove", "gc", "connected(X,Y)", "--fuel", "12")
    assert (code, out) == (1, "FuelExhausted\n")


def test_prove_trace(capsys):
    code, out, _ = run(capsys, "prove", "listnat", "list(cons(0,nil))", "--trace")
    assert code == 0 and out.startswith("Proved")
    assert "4" in out and "nat(0)" in out


def test_solve(capsys):
    code, out, _ = run(capsys, "solve", "gc.lp", "connected(X,Y)", "--fuel", "4", "--max-answers", "1")
    assert (code, out) == (0, "{Y->X}\n")
    code, out, _ = run(capsys, "solve", "listnat", "list(cons(X,Y))", "--max-answers", "2", "--steps")
    assert out.splitlines() == ["{X->0, Y->nil}  (3 steps)", "{X->s(0), Y->nil}  (4 steps)"]
    code, out, _ = run(capsys, "solve", "bad", "bad(X)", "--fuel", "5")
    assert (code, out) == (1, "no answers\n")


def test_tree_ascii_and_dot(capsys):
    code, out, _ = run(capsys, "tree", "listnat_plus", "list(cons(0,nil))", "--depth", "2")
    assert code == 0
    assert [l.strip() for l in out.splitlines() if "•" in l][:2] == ["• 4", "• 1"]
    code, out, _ = run(capsys, "tree", "gc", "connected(X,Y)", "--depth", "4", "--format", "dot")
    assert out == (GOLDEN / "gc_tree_depth4.dot").read_text()


def test_tree_json(capsys):
    code, out, _ = run(capsys, "tree", "gc", "connected(X,X)", "--depth", "2", "--format", "json")
    data = json.loads(out)
    assert data["root"]["atom"] == "connected(x1,x1)"
    assert [o["clause"] for o in data["root"]["or_nodes"]] == [1, 2]


def test_parse_and_classify(capsys):
    code, out, _ = run(capsys, "parse", "gc", "--canonical")
    assert out.splitlines()[1] == "2. connected(x1,x2) :- edge(x1,x3), connected(x3,x2)."
    assert run(capsys, "classify", "gc")[1] == "Existential([2])\n"
    assert run(capsys, "classify", "listnat")[1] == "NonExistential\n"


def test_approx(capsys):
    code, out, _ = run(capsys, "approx", "ground_abcd", "a", "--level", "2")
    assert out == "(a, {{(b, ∅), (c, ∅)}, {(b, ∅), (d, {{a, c}})}})\n"
    code, out, _ = run(capsys, "approx", "gc", "connected(X,Y)", "--mode", "ext", "--level", "1")
    assert out == "(connected(x1,x2), {{connected(z1,x2), edge(x1,z1)}})\n"


def test_saturate_and_checks(capsys):
    code, out, _ = run(capsys, "saturate", "listnat", "nat(X)", "--max-context", "1", "--max-depth", "1")
    assert code == 0 and json.loads(out)["table"]["1:{x1->s(x1)}"] == ["{nat(x1)}"]
    for argv in (["check", "saturation", "listnat", "nat(0)", "--max-context", "1", "--max-depth", "1"],
                 ["check", "inj", "gc", "--max-target", "3"],
                 ["check", "lax", "gc"],
                 ["check", "monad", "--samples", "100"],
                 ["check", "dist", "gc", "--samples", "50"],
                 ["check", "bridge", "listnat", "--fuel", "5"],
                 ["oracle", "ground_abcd", "--max-level", "3"]):
        code, out, _ = run(capsys, *argv)
        assert code == 0 and json.loads(out)["ok"], argv


def test_usage_errors(capsys):
    assert main(["prove"]) == 2
    assert main(["prove", "no_such_program", "a"]) == 2
    assert main(["prove", "listnat", "nat(X"]) == 2
    assert main(["prove", "listnat", "nat(X), nat(Y)"]) == 2
    assert main(["tree", "gc", "connected(X,Y)", "--depth", "-1"]) == 2
    assert main(["check", "nonsense"]) == 2
    err = capsys.readouterr().err
    assert "no_such_program" in err


def test_parse_error_position(capsys, tmp_path):
    bad = tmp_path / "broken.lp"
    bad.write_text("nat(0).\nnat(s(X) :- nat(X).\n")
    assert main(["parse", str(bad)]) == 2
    assert "line 2, column 10" in capsys.readouterr().err


def test_fixture_directory_from_environment(capsys, tmp_path, monkeypatch):
    (tmp_path / "mine.lp").write_text("p(a).\n")
    monkeypatch.setenv("LPSEM_FIXTURES", str(tmp_path))
    assert run(capsys, "prove", "mine", "p(a)") == (0, "Proved\n", "")


def test_module_entry_point():
    done = subprocess.run([sys.executable, "-m", "lpsem", "classify", "gc"],
                          capture_output=True, text=True, check=False)
    assert (done.returncode, done.stdout) == (0, "Existential([2])\n")
