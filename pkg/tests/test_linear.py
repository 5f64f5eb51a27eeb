import math
from fractions import Fraction

import pytest

from pcheeger.cheeger import cheeger_exact
from pcheeger.errors import HorizonExceeded, InvalidSpec
from pcheeger.linear import (
    ANTITREE,
    MODIFIED,
    NORMALIZED,
    PHYSICAL,
    TREE,
    Branching,
    LinearGraph,
    ModelSpec,
    annulus_minimum,
    annulus_ratio,
    antitree_reference_row,
    ball_minimum,
    ball_ratio,
    build_linear,
    cheeger_linear,
    explicit_model,
    linear_domain,
    model_row,
    rapidly_branching_check,
    reference_matches,
    sphere_partition_consistency,
    tree_cheeger,
)


def test_branching_parse():
    assert Branching.parse("2").prefix == (2,)
    b = Branching.parse("1,2,3,...")
    assert [b(i) for i in range(6)] == [1, 2, 3, 4, 5, 6]
    assert [Branching.parse([2, 3])(i) for i in range(4)] == [2, 3, 3, 3]
    assert Branching.parse([1, 2, 3, "..."]).as_json() == [1, 2, 3, "..."]
    for bad in ("", "0", "2,x", "3,..."):
        with pytest.raises(InvalidSpec):
            Branching.parse(bad)


def test_antitree_sphere_counts():
    spec = ModelSpec(ANTITREE, PHYSICAL, order=2)
    assert [spec.sphere_size(r) for r in range(3)] == [1, 4, 9]
    assert spec.edges_out(1) == 36
    with pytest.raises(InvalidSpec):
        ModelSpec(ANTITREE, PHYSICAL, order=0)
    with pytest.raises(InvalidSpec):
        ModelSpec(TREE, "weird", branching=Branching.constant(2))


def test_physical_tree_sequences():
    L = build_linear(ModelSpec(TREE, PHYSICAL, branching=Branching.constant(2)), 10)
    assert [L.nu(r) for r in range(4)] == [1, 2, 4, 8]
    assert [L.mu(r) for r in range(4)] == [2, 4, 8, 16]
    assert ball_ratio(L, 3) == Fraction(16, 15)
    with pytest.raises(HorizonExceeded):
        L.nu(11)


def test_annulus_ratio_and_minima():
    L = LinearGraph.from_sequences([1, 2, 4, 8], [2, 4, 8, 16])
    assert annulus_ratio(L, 0, 2) == Fraction(2 + 8, 6)
    assert annulus_ratio(L, -1, 2) == ball_ratio(L, 2)
    assert ball_minimum(L) == (Fraction(16, 15), (3,))
    value, arg = annulus_minimum(L)
    assert value == min(annulus_ratio(L, k, r) for k in range(3) for r in range(k + 1, 4))


@pytest.mark.parametrize("contains_root", [True, False])
def test_balls_or_annuli_match_exact_enumeration(contains_root):
    # irregular weights so that the minimizer is not an endpoint
    L = LinearGraph.from_sequences([3, 1, 5, 2, 2, 7, 1, 4], [2, 1, 3, 1, 2, 5, 1, 3])
    res = cheeger_linear(L, contains_root)
    brute = cheeger_exact(linear_domain(L, contains_root))
    assert Fraction(res.minimum) == brute.h


def test_antitree_rows_against_reference():
    for a in (2, 3):
        row = model_row(ANTITREE, 200, order=a)
        assert all(reference_matches(a, row).values())
    row = model_row(ANTITREE, 200, order=1)
    checks = reference_matches(1, row)
    # every entry except the modified a = 1 constant, whose printed value is inconsistent
    assert {k for k, ok in checks.items() if not ok} == {"h_M"}
    assert row.values["h_M"] == pytest.approx(0.0, abs=1e-12)


def test_reference_row_contents():
    row = antitree_reference_row(2)
    assert row["h"] == 4 and row["h_inf"] == math.inf
    assert float(row["h_M"]) == pytest.approx(4 / math.sqrt(10))
    assert float(row["h_inf_M"]) == pytest.approx(1.5 * math.sqrt(2))
    with pytest.raises(InvalidSpec):
        antitree_reference_row(0)


@pytest.mark.parametrize("scheme", [PHYSICAL, MODIFIED, NORMALIZED])
@pytest.mark.parametrize("m", ["2", "3", "1,2,3,..."])
def test_tree_pipeline_matches_closed_forms(scheme, m):
    report = tree_cheeger(Branching.parse(m), scheme, horizon=40)
    assert report.agree, report.first_mismatch


def test_binary_tree_constants():
    phys = tree_cheeger(Branching.constant(2), PHYSICAL, horizon=80)
    assert phys.h == pytest.approx(1.0)
    norm = tree_cheeger(Branching.constant(2), NORMALIZED, horizon=80)
    assert norm.h_inf.value == pytest.approx(1 / 3)


def test_rapidly_branching_normalized_tree_tends_to_one():
    report = rapidly_branching_check(Branching.parse("1,2,3,..."), 60)
    assert report.closed_form.converged and report.closed_form.value == pytest.approx(1.0, abs=1e-8)
    assert report.pipeline.converged and report.pipeline.value == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize(
    "spec",
    [
        ModelSpec(ANTITREE, PHYSICAL, order=1),
        ModelSpec(ANTITREE, NORMALIZED, order=2),
        ModelSpec(TREE, PHYSICAL, branching=Branching.constant(3)),
        ModelSpec(TREE, NORMALIZED, branching=Branching.parse("1,2,3,...")),
    ],
)
def test_sphere_quotient_matches_linear_graph(spec):
    assert sphere_partition_consistency(spec, 3).ok


def test_explicit_model_rejects_modified_scheme():
    with pytest.raises(InvalidSpec):
        explicit_model(ModelSpec(ANTITREE, MODIFIED, order=1), 2)
