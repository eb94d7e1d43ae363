import io
import json

import numpy as np
import pytest

from cstar_inv.cli import Options, execute, resolve_seed, run
from cstar_inv.errors import UnknownName
from cstar_inv.io import ProblemFile, dump_problem, load_problem, parse_report
from cstar_inv.operators import canonical_projections
from cstar_inv.submodules import Submodule

from helpers import SCALAR, scalar_op

UPPER = scalar_op([[1, 1], [0, 2]])
E1 = Submodule(scalar_op([[1, 0], [0, 0]]))


@pytest.fixture
def problem_file(tmp_path):
    p = ProblemFile(SCALAR, 2,
                    operators={"T": UPPER, "K": scalar_op([[0, 1], [0, 0]]), "D": scalar_op([[1, 0], [0, -1]]),
                               "Z": scalar_op([[0, 0], [1, 0]])},
                    submodules={"W": E1})
    path = tmp_path / "problem.json"
    path.write_text(dump_problem(p))
    return path


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def machine(*argv):
    code, out, err = cli(*argv, "--format", "machine")
    assert code == 0, err
    return parse_report(out)


def test_analyze_upper_triangular(problem_file):
    r = machine("analyze", problem_file, "T", "W")
    assert r.values["invariant"] is True and r.values["reducing"] is False
    assert r.values["block_norms"]["C"] == 0.0 and r.values["rank"] == 2


def test_solve_sts_z0_is_range_projection(problem_file):
    r = machine("solve-sts", problem_file, "T", "W")
    Q, _ = canonical_projections(UPPER @ E1.projection)
    assert r.objects["S"].allclose(Q)
    assert all(c.passed for c in r.checks)


def test_solve_sts_with_z(problem_file):
    r = machine("solve-sts", problem_file, "T", "W", "--Z", "Z")
    assert r.command == ["solve-sts", "T", "W", "--Z", "Z"]
    assert all(c.passed for c in r.checks)


def test_other_subcommands(problem_file):
    assert machine("decompose", problem_file, "T", "W").objects["C"].norm() == 0.0
    assert machine("solve-douglas", problem_file, "T", "T").objects["X"].allclose(UPPER.identity())
    spec = machine("spectrum", problem_file, "T")
    assert spec.values["eigenvalues"] == [[[1.0, 0.0], 1], [[2.0, 0.0], 1]]
    assert spec.values["zero_forced_by_infinite_generation"] == "not applicable"
    hyp = machine("hyperinvariant", problem_file, "K")
    assert hyp.values["kind"] == "kernel"
    assert hyp.objects["W"].projection.allclose(E1.projection)
    num = machine("numrange", problem_file, "D")
    assert num.values["kind"] == "WitnessFound"
    mp = machine("mp", problem_file, "D")
    assert all(c.passed for c in mp.checks)


def test_human_format(problem_file):
    code, out, _ = cli("analyze", problem_file, "T", "W")
    assert code == 0
    assert out.startswith("# cstar-inv analyze T W")
    assert any(line.startswith("reducing") and line.endswith("fail") for line in out.splitlines())


def test_input_errors_exit_2(tmp_path, problem_file):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"algebra": [1], "rank": 1,
                               "submodules": {"W": {"projection": [[[[[[2, 0]]]]]]}}}))
    code, _, err = cli("analyze", bad, "T", "W")
    assert code == 2 and "submodules.W" in err
    assert cli("analyze", tmp_path / "missing.json", "T", "W")[0] == 2
    (tmp_path / "junk.json").write_text("{")
    assert cli("spectrum", tmp_path / "junk.json", "T")[0] == 2
    assert cli("analyze", problem_file, "T")[0] == 2
    assert cli("check-properties", "--cases", "0")[0] == 2


def test_precondition_and_names_exit_3(problem_file):
    assert cli("analyze", problem_file, "nope", "W")[0] == 3
    assert cli("analyze", problem_file, "T", "nope")[0] == 3
    assert cli("solve-sts", problem_file, "Z", "W")[0] == 3
    assert cli("solve-douglas", problem_file, "K", "D")[0] == 3
    code, _, err = cli("mp", problem_file, "T", "W")
    assert code == 3 and "reduce" in err
    assert cli("hyperinvariant", problem_file, "Z", "--Z", "missing")[0] in (0, 3)


def test_execute_unknown_command():
    with pytest.raises(UnknownName):
        execute("frobnicate", [], None, Options())


def test_seed_precedence():
    p = load_problem(json.dumps({"algebra": [1], "rank": 1, "tolerances": {"seed": 5}}))
    q = load_problem(json.dumps({"algebra": [1], "rank": 1}))
    env = {"CSTAR_INV_SEED": "9"}
    assert resolve_seed(3, p, env) == 3
    assert resolve_seed(None, p, env) == 5
    assert resolve_seed(None, q, env) == 9
    assert resolve_seed(None, None, {}) == 0


def test_env_seed_used(monkeypatch, problem_file):
    monkeypatch.setenv("CSTAR_INV_SEED", "17")
    assert machine("numrange", problem_file, "D").seed == 17
    monkeypatch.setenv("CSTAR_INV_SEED", "abc")
    assert cli("numrange", problem_file, "D")[0] == 2


def test_check_properties_small_and_deterministic():
    a = cli("check-properties", "--seed", 3, "--cases", 4, "--format", "machine")
    b = cli("check-properties", "--seed", 3, "--cases", 4, "--format", "machine")
    assert a[0] == 0 and a[1] == b[1]
    report = parse_report(a[1])
    assert report.seed == 3 and report.values["cases"] == 4
    assert all(s["passed"] for s in report.values["suites"].values())


def test_check_properties_failure_exits_1():
    # a zero tolerance makes rounding-level residuals fail
    code, out, _ = cli("check-properties", "--cases", 2, "--atol", 0, "--rtol", 0)
    assert code == 1 and "fail" in out


def test_numrange_deterministic(problem_file):
    a = cli("numrange", problem_file, "D", "--seed", 5, "--format", "machine")
    b = cli("numrange", problem_file, "D", "--seed", 5, "--format", "machine")
    assert a == b
    x = np.array(json.loads(a[1])["values"]["witness"])
    assert x.shape[-1] == 2
