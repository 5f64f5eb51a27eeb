import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcheeger import fixtures
from pcheeger.cheeger import cheeger_exact
from pcheeger.errors import InvalidPartition, NotEquitable, TooLarge, UnknownVertex
from pcheeger.spectral import dirichlet_energy, first_eigenpair, lp_norm
from pcheeger.symmetry import (
    VertexPartition,
    certify_orbit_partition,
    enumerate_automorphisms,
    is_automorphism,
    lift,
    orbits,
    quotient,
    validate_equitable,
    verify_quotient_invariance,
)


def brute_group(dom):
    return sorted(p for p in itertools.permutations(range(dom.size)) if is_automorphism(dom, p))


@pytest.mark.parametrize(
    "factory, size",
    [
        (fixtures.star_domain, 24),
        (fixtures.example41_domain, 2),
        (fixtures.example51_domain, 2),
        (fixtures.triangle_domain, 6),
    ],
)
def test_group_sizes_match_brute_force(factory, size):
    dom = factory()
    group = enumerate_automorphisms(dom)
    assert group.size == size
    assert list(group.elements) == brute_group(dom)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 6))
def test_random_groups_match_brute_force(seed, n):
    dom = fixtures.random_domain(random.Random(seed), n)
    assert list(enumerate_automorphisms(dom).elements) == brute_group(dom)


def test_group_is_closed_under_composition_and_inverse():
    dom = fixtures.star_domain()
    elems = set(enumerate_automorphisms(dom).elements)
    for g, h in itertools.product(elems, repeat=2):
        assert tuple(g[h[i]] for i in range(dom.size)) in elems
    for g in elems:
        inv = [0] * dom.size
        for i, j in enumerate(g):
            inv[j] = i
        assert tuple(inv) in elems


def test_orbits_and_certificate():
    dom = fixtures.example51_domain()
    part = orbits(enumerate_automorphisms(dom), dom)
    assert part.cells == (("v1",), ("v2",), ("v3",), ("v4", "v5"))
    assert certify_orbit_partition(dom, part) is not None
    path = fixtures.example41_domain()
    assert certify_orbit_partition(path, VertexPartition.of([["v1", "v3"], ["v2"]]))
    assert certify_orbit_partition(path, VertexPartition.of([["v1", "v2", "v3"]])) is None


def test_automorphism_cap():
    with pytest.raises(TooLarge):
        enumerate_automorphisms(fixtures.random_domain(random.Random(0), 14))


def test_non_equitable_partition_reports_violations():
    dom = fixtures.example51_domain()
    bad = VertexPartition.of([["v1", "v2"], ["v3"], ["v4", "v5"]])
    report = validate_equitable(dom, bad)
    assert not report.valid
    assert any("nu differs" in v for v in report.violations)
    with pytest.raises(NotEquitable):
        quotient(dom, bad)


@pytest.mark.parametrize(
    "cells, error",
    [
        ([["v1"], ["v2"]], InvalidPartition),
        ([["v1", "v2"], ["v2", "v3"]], InvalidPartition),
        ([["v1", "v2", "v3"], []], InvalidPartition),
        ([["v1", "zz"], ["v2", "v3"]], UnknownVertex),
    ],
)
def test_invalid_partitions(cells, error):
    with pytest.raises(error):
        VertexPartition.of(cells).index_cells(fixtures.example41_domain())


def test_star_quotient_is_two_vertex_path():
    dom = fixtures.star_domain()
    q = quotient(dom, VertexPartition.of([["c"], ["l1", "l2", "l3", "l4"]]))
    assert q.interior == ("[c]", "[l1]")
    assert q.nu == (4, 8)
    assert q.boundary == (0, 4)
    assert [(i, j, w) for i, j, w in q.edges] == [(0, 1, 4)]


def test_lift_preserves_energy_and_norm():
    dom = fixtures.star_domain()
    part = VertexPartition.of([["c"], ["l1", "l2", "l3", "l4"]])
    q = quotient(dom, part)
    f = np.array([0.7, -1.3])
    for p in (1.5, 2.0, 3.0):
        assert dirichlet_energy(dom, p, lift(dom, part, f)) == pytest.approx(dirichlet_energy(q, p, f))
        assert lp_norm(dom, p, lift(dom, part, f)) == pytest.approx(lp_norm(q, p, f))


def test_quotient_invariance_on_group_partition():
    dom = fixtures.example51_embedded_domain()
    part = orbits(enumerate_automorphisms(dom), dom)
    report = verify_quotient_invariance(dom, part, [1.5, 2.0, 3.0])
    assert report.origin == "group"
    assert report.h_equal and report.cell_union_cut is not None
    assert report.lam_agreement() <= 1e-8
    assert report.examined_quotient < report.examined_original
    for row in report.rows:
        assert row.cell_spread <= 1e-8


def test_quotient_eigenvalue_lifts_to_original():
    dom = fixtures.star_domain()
    part = VertexPartition.of([["c"], ["l1", "l2", "l3", "l4"]])
    q = quotient(dom, part)
    eq = first_eigenpair(q, 2.5)
    e = first_eigenpair(dom, 2.5)
    assert e.lam == pytest.approx(eq.lam, abs=1e-9)
    assert np.allclose(lift(dom, part, eq.u), e.u, atol=1e-7)
    assert cheeger_exact(q).h == cheeger_exact(dom).h
