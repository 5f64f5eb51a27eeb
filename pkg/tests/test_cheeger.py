import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcheeger import fixtures
from pcheeger.cheeger import (
    cheeger_bounds_report,
    cheeger_bracket,
    cheeger_exact,
    coarea_verify,
    lambda_1_1,
)
from pcheeger.errors import InputError, NotNormalized, TooLarge, ZeroFunction
from pcheeger.graph import DirichletDomain, build_domain
from pcheeger.spectral import first_eigenpair


def brute(dom):
    vals = []
    for k in range(1, dom.size + 1):
        for sub in itertools.combinations(range(dom.size), k):
            vals.append(dom.boundary_of(sub) / dom.volume_of(sub))
    return min(vals)


def test_path_example_cheeger():
    res = cheeger_exact(fixtures.example41_domain())
    assert res.h == Fraction(1, 3)
    assert res.cuts == (("v1", "v2", "v3"),)
    assert res.subsets_examined == 7


def test_embedded_triangle_with_tail_has_two_cuts():
    res = cheeger_exact(fixtures.example51_embedded_domain())
    assert res.h == Fraction(1, 3)
    assert {frozenset(c) for c in res.cuts} == {frozenset({"v1", "v2"}), frozenset({"v1", "v2", "v3"})}


def test_whole_graph_without_boundary_has_zero_constant():
    res = cheeger_exact(fixtures.example51_domain())
    assert res.h == 0


def test_singleton():
    assert lambda_1_1(fixtures.singleton_domain(nu=3, boundary=2)) == Fraction(2, 3)


def test_cap_and_orbit_cells():
    dom = fixtures.star_domain()
    with pytest.raises(TooLarge):
        cheeger_exact(dom, cap=3)
    full = cheeger_exact(dom)
    cells = [dom.indices(["c"]), dom.indices(["l1", "l2", "l3", "l4"])]
    restricted = cheeger_exact(dom, cells=cells)
    assert restricted.h == full.h
    assert restricted.subsets_examined == 3
    with pytest.raises(InputError):
        cheeger_exact(dom, cells=[[0, 1]])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 9))
def test_matches_brute_force(seed, n):
    dom = fixtures.random_domain(random.Random(seed), n)
    assert cheeger_exact(dom).h == brute(dom)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.fractions(min_value=Fraction(1, 7), max_value=7))
def test_scaling_mu_scales_h(seed, c):
    dom = fixtures.random_domain(random.Random(seed), 6)
    scaled = DirichletDomain(
        dom.interior, dom.nu, tuple((i, j, c * w) for i, j, w in dom.edges), tuple(c * b for b in dom.boundary)
    )
    assert cheeger_exact(scaled).h == c * cheeger_exact(dom).h


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_sub_domain_has_larger_constant(seed):
    rng = random.Random(seed)
    g = fixtures.random_graph(rng, 9)
    big = fixtures.random_connected_omega(rng, g, 7)
    small = big[: max(1, len(big) - 2)]
    assert cheeger_exact(build_domain(g, small)).h >= cheeger_exact(build_domain(g, big)).h


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.lists(st.integers(-6, 6), min_size=5, max_size=5))
def test_coarea_exact(seed, values):
    dom = fixtures.random_domain(random.Random(seed), 5)
    if not any(values):
        values[0] = 1
    report = coarea_verify(dom, values)
    assert report.ok
    assert report.energy == report.coarea_integral


def test_coarea_rejects_zero_and_wrong_length():
    dom = fixtures.example41_domain()
    with pytest.raises(ZeroFunction):
        coarea_verify(dom, [0, 0, 0])
    with pytest.raises(InputError):
        coarea_verify(dom, [1, 2])


def test_bracket_is_analytic():
    lo, hi = cheeger_bracket(Fraction(1, 3), 2.0)
    assert hi == pytest.approx(1 / 3)
    assert lo == pytest.approx(2 * (1 / 6) ** 2)
    lo, hi = cheeger_bracket(Fraction(1, 2), 1.001)
    assert lo == pytest.approx(2**0.001 * (0.5 / 1.001) ** 1.001, rel=1e-12)
    assert lo < hi


def test_upper_cheeger_bound_holds():
    rows = cheeger_bounds_report(fixtures.example41_domain(), [1.5, 2.0, 4.0])
    assert all(r.upper_ok for r in rows)
    assert all(r.lam <= r.h + 1e-9 for r in rows)


def test_bounds_report_requires_normalized_domain():
    with pytest.raises(NotNormalized):
        cheeger_bounds_report(fixtures.singleton_domain(), [2.0])


@pytest.mark.parametrize("p", [1.1, 1.5, 3.0])
def test_indicator_bound_lambda_below_h(p):
    # indicator of a Cheeger cut has Rayleigh quotient h for every p
    dom = fixtures.example51_embedded_domain()
    assert first_eigenpair(dom, p).lam <= float(lambda_1_1(dom)) + 1e-9
