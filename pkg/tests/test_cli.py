import json
from pathlib import Path

import pytest

from pcheeger.cli import main

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eigen_json(capsys):
    code, out, _ = run(capsys, "eigen", DATA / "example41.json", "--p", "4", "--max")
    assert code == 0
    first, top = json.loads(out)
    assert first["certified"] and top["certified"]
    assert first["lambda"] < top["lambda"]


def test_eigen_text_and_several_p(capsys):
    code, out, _ = run(capsys, "eigen", DATA / "star.json", "--p", "1.5,2,3", "--format", "text")
    assert code == 0
    assert out.count("certified") == 3


def test_cheeger(capsys):
    code, out, _ = run(capsys, "cheeger", DATA / "fig2_embedded.json")
    assert code == 0
    data = json.loads(out)
    assert data["h"] == "1/3"
    assert len(data["cuts"]) == 2


def test_cheeger_orbit_restrict(capsys):
    code, out, _ = run(capsys, "cheeger", DATA / "star.json", "--orbit-restrict", DATA / "star_parts.json")
    assert code == 0
    assert json.loads(out)["subsetsExamined"] == 3


def test_autgroup(capsys):
    code, out, _ = run(capsys, "autgroup", DATA / "star.json")
    assert code == 0
    assert json.loads(out)["size"] == 24


def test_quotient_with_invariance(capsys):
    code, out, _ = run(capsys, "quotient", DATA / "star.json", "--p", "2,3")
    assert code == 0
    data = json.loads(out)
    assert data["origin"] == "group" and data["invariance"]["hEqual"]


def test_quotient_rejects_non_equitable_partition(capsys, tmp_path):
    part = tmp_path / "p.json"
    part.write_text(json.dumps({"cells": [["v1", "v2"], ["v3"], ["v4", "v5"]]}))
    code, out, _ = run(capsys, "quotient", DATA / "fig2.json", "--partition", part)
    assert code == 1
    assert json.loads(out)["equitable"] is False


def test_model_spec_and_csv(capsys):
    code, out, _ = run(capsys, "model", "--spec", DATA / "tree_corollary.json")
    assert code == 0
    assert json.loads(out)["h_inf_status"] == "Converged"
    code, out, _ = run(capsys, "model", "antitree", "--a", "2", "--format", "csv", "--horizon", "80")
    assert code == 0
    assert out.splitlines()[1].startswith("a=2,4,INF")


@pytest.mark.parametrize(
    "argv",
    [
        ["eigen", "missing.json"],
        ["eigen", str(DATA / "example41.json"), "--p", "1"],
        ["eigen", str(DATA / "fig2.json"), "--max"],
        ["model", "tree"],
        ["model", "antitree", "--a", "0"],
        ["verify-paper", "--only", "nosuch"],
    ],
)
def test_input_errors_exit_one(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert err.startswith("error:")


def test_usage_errors_exit_one():
    for argv in (["frobnicate"], ["eigen", "d.json", "--p", "x"]):
        with pytest.raises(SystemExit) as info:
            main(argv)
        assert info.value.code == 1


def test_verify_paper_subset(capsys):
    code, out, _ = run(capsys, "verify-paper", "--only", "oracle,linear_reduction", "--json")
    assert code == 0
    assert json.loads(out)["passed"]


def test_verify_paper_failing_check_exits_three(capsys):
    code, out, _ = run(capsys, "verify-paper", "--only", "antitree")
    assert code == 3
    assert out.startswith("FAIL")


def test_non_convergence_exits_two(capsys, monkeypatch):
    from pcheeger import cli
    from pcheeger.errors import NoConvergence

    def stuck(*args, **kwargs):
        raise NoConvergence("first eigenpair did not converge (residual 0.1)", 0.1)

    monkeypatch.setattr(cli, "first_eigenpair", stuck)
    code, _, err = run(capsys, "eigen", DATA / "example41.json")
    assert code == 2
    assert "did not converge" in err
