"""Acceptance criteria, one test per criterion.

Each test prints a ``PASS``/``FAIL`` line (visible with ``pytest -s`` or in the
captured output of failures) and asserts the criterion. Solver runs are shared
through one recorder so that the certificate criterion audits every run made
by criteria 1 to 8.
"""

import pytest

from pcheeger.spectral import SolverConfig
from pcheeger.verify import CHECKS, Recorder

CFG = SolverConfig()


@pytest.fixture(scope="module")
def recorder():
    return Recorder()


def _run(key, recorder):
    number, fn = CHECKS[key]
    result = fn(CFG, recorder)
    status = "PASS" if result.passed else "FAIL"
    print(f"\n{status} criterion {number} ({result.title}): {result.detail}")
    failed = [k for k, ok in result.parts.items() if not ok]
    assert result.passed, f"criterion {number} failed parts {failed}: {result.detail}"


def test_criterion_01_path_example_eigenvectors(recorder):
    _run("example41", recorder)


def test_criterion_02_non_unique_cheeger_cuts(recorder):
    _run("example51", recorder)


def test_criterion_03_antitree_table(recorder):
    _run("antitree", recorder)


def test_criterion_04_rapidly_branching_trees(recorder):
    _run("branching", recorder)


def test_criterion_05_one_laplacian_and_coarea(recorder):
    _run("one_laplacian", recorder)


def test_criterion_06_quotient_invariance(recorder):
    _run("quotient", recorder)


def test_criterion_07_monotonicity(recorder):
    _run("monotonicity", recorder)


def test_criterion_08_dense_oracle_at_p2(recorder):
    _run("oracle", recorder)


def test_criterion_09_sign_and_uniqueness_certificates(recorder):
    _run("certificates", recorder)


def test_criterion_10_balls_and_annuli_suffice(recorder):
    _run("linear_reduction", recorder)
