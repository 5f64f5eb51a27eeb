import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcheeger import fixtures
from pcheeger.errors import (
    DimensionMismatch,
    DisconnectedDomain,
    InvalidBipartition,
    InvalidP,
    NotBipartite,
    NotNormalized,
    ZeroFunction,
)
from pcheeger.graph import Bipartition, bipartition, build_domain
from pcheeger.spectral import (
    SolverConfig,
    apply_p_laplacian,
    dirichlet_energy,
    eigen_residual,
    energy_gradient,
    first_eigenpair,
    involution,
    lp_norm,
    max_eigenpair_bipartite,
    monotonicity_profile,
    q_functional,
    rayleigh_quotient,
)


def laplacian_loop(dom, u):
    """Plain-loop p=2 Laplacian, independent of the vectorized code."""
    out = []
    for x in range(dom.size):
        total = -float(dom.boundary[x]) * u[x]
        for i, j, w in dom.edges:
            if i == x:
                total += float(w) * (u[j] - u[x])
            elif j == x:
                total += float(w) * (u[i] - u[x])
        out.append(total / float(dom.nu[x]))
    return np.array(out)


def dense_eigs(dom):
    n = dom.size
    L = np.zeros((n, n))
    for i, j, w in dom.edges:
        w = float(w)
        L[i, i] += w
        L[j, j] += w
        L[i, j] -= w
        L[j, i] -= w
    L += np.diag([float(b) for b in dom.boundary])
    s = 1.0 / np.sqrt([float(v) for v in dom.nu])
    return np.linalg.eigvalsh(s[:, None] * L * s[None, :])


def rand_domain(seed, n=6, bipartite=False):
    return fixtures.random_domain(random.Random(seed), n, bipartite=bipartite)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.lists(st.floats(-3, 3), min_size=6, max_size=6))
def test_p2_laplacian_matches_loop(seed, u):
    dom = rand_domain(seed)
    assert np.allclose(apply_p_laplacian(dom, 2.0, u), laplacian_loop(dom, np.array(u)), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.floats(1.3, 5.0))
def test_gradient_matches_finite_differences(seed, p):
    dom = rand_domain(seed)
    u = np.random.default_rng(seed).uniform(0.5, 2.0, dom.size)
    grad = energy_gradient(dom, p, u)
    h = 1e-6
    fd = np.array(
        [
            (dirichlet_energy(dom, p, u + h * e) - dirichlet_energy(dom, p, u - h * e)) / (2 * h)
            for e in np.eye(dom.size)
        ]
    )
    assert np.allclose(grad, fd, rtol=1e-5, atol=1e-6)


def test_divergence_identity():
    # sum nu u Delta_p u = -E_p(u)
    dom = rand_domain(3)
    u = np.random.default_rng(0).normal(size=dom.size)
    for p in (1.5, 2.0, 3.5):
        nu = np.array([float(x) for x in dom.nu])
        assert np.dot(nu * u, apply_p_laplacian(dom, p, u)) == pytest.approx(-dirichlet_energy(dom, p, u))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.floats(1.1, 4.0), st.floats(0.01, 100.0))
def test_rayleigh_quotient_scale_invariant(seed, p, c):
    dom = rand_domain(seed)
    u = np.random.default_rng(seed).normal(size=dom.size)
    assert rayleigh_quotient(dom, p, c * u) == pytest.approx(rayleigh_quotient(dom, p, u), rel=1e-10)
    assert lp_norm(dom, p, c * u) == pytest.approx(c * lp_norm(dom, p, u), rel=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.floats(1.2, 4.0), st.floats(0.0, 1.0))
def test_q_functional_concave(seed, p, t):
    dom = rand_domain(seed)
    rng = np.random.default_rng(seed)
    g1, g2 = rng.uniform(0.01, 1.0, dom.size), rng.uniform(0.01, 1.0, dom.size)
    mid = q_functional(dom, p, t * g1 + (1 - t) * g2)
    assert mid >= t * q_functional(dom, p, g1) + (1 - t) * q_functional(dom, p, g2) - 1e-12


@pytest.mark.parametrize("seed", range(8))
def test_p2_first_and_max_match_dense_eigenvalues(seed):
    dom = rand_domain(seed, n=7, bipartite=True)
    vals = dense_eigs(dom)
    assert first_eigenpair(dom, 2.0).lam == pytest.approx(vals[0], abs=1e-8)
    assert max_eigenpair_bipartite(dom, 2.0).lam == pytest.approx(vals[-1], abs=1e-8)


@pytest.mark.parametrize("p", [1.3, 2.0, 3.0, 6.0])
def test_extremal_quotients_bracket_random_vectors(p):
    dom = rand_domain(11, n=6, bipartite=True)
    lo = first_eigenpair(dom, p).lam
    hi = max_eigenpair_bipartite(dom, p).lam
    rng = np.random.default_rng(1)
    for _ in range(200):
        r = rayleigh_quotient(dom, p, rng.normal(size=dom.size))
        assert lo - 1e-9 <= r <= hi + 1e-9


@pytest.mark.parametrize("p", [1.5, 2.0, 4.0])
def test_singleton_eigenvalue(p):
    dom = fixtures.singleton_domain(nu=4, boundary=3)
    pair = first_eigenpair(dom, p)
    assert pair.lam == pytest.approx(0.75)
    assert pair.u[0] == pytest.approx(4 ** (-1 / p))


def test_path_example_vectors():
    dom = fixtures.example41_domain()
    first = first_eigenpair(dom, 4.0)
    top = max_eigenpair_bipartite(dom, 4.0)
    assert first.certified and top.certified
    assert first.u[0] == pytest.approx(first.u[2], abs=1e-9)
    unit = np.array(fixtures.EXAMPLE41_UMAX) / np.sum(np.abs(fixtures.EXAMPLE41_UMAX) ** 4) ** 0.25
    got = top.u / np.sum(np.abs(top.u) ** 4) ** 0.25
    assert np.allclose(got, unit, atol=1e-5)
    for pair in (first, top):
        assert eigen_residual(dom, 4.0, pair.u, pair.lam) <= 1e-9
        assert lp_norm(dom, 4.0, pair.u) == pytest.approx(1.0)


@pytest.mark.parametrize("p", [1.5, 1.2, 1.1, 1.05])
def test_symmetric_near_ties_converge(p):
    # v4 and v5 are exchanged by a symmetry, so u(v4) = u(v5) exactly
    dom = fixtures.example51_embedded_domain()
    pair = first_eigenpair(dom, p)
    assert pair.restarts_agreeing == 3
    assert pair.residual <= 1e-10
    assert pair.u[3] == pytest.approx(pair.u[4], abs=1e-12)


def test_results_are_deterministic():
    dom = rand_domain(5)
    a = first_eigenpair(dom, 1.7, SolverConfig(rng_seed=4))
    b = first_eigenpair(dom, 1.7, SolverConfig(rng_seed=4))
    assert a.lam == b.lam and np.array_equal(a.u, b.u)


def test_involution_properties():
    dom = fixtures.example41_domain()
    parts = bipartition(dom)
    u = np.array([0.3, -1.2, 2.0])
    su = involution(dom, parts, u)
    assert np.array_equal(involution(dom, parts, su), u)
    assert lp_norm(dom, 3.0, su) == pytest.approx(lp_norm(dom, 3.0, u))
    with pytest.raises(InvalidBipartition):
        involution(dom, Bipartition(frozenset({"v1", "v2"}), frozenset({"v3"})), u)


def test_max_vector_alternates_on_bipartition():
    dom = rand_domain(21, n=8, bipartite=True)
    pair = max_eigenpair_bipartite(dom, 3.0)
    assert all(pair.u[i] * pair.u[j] < 0 for i, j, _ in dom.edges)
    assert pair.u[0] > 0


def test_monotonicity_profile():
    dom = fixtures.example41_domain()
    prof = monotonicity_profile(dom, [1.2, 1.5, 2.0, 3.0, 4.0])
    vals = [v for _, v in prof]
    assert all(b >= a - 1e-9 for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        monotonicity_profile(dom, [2.0, 1.5])
    with pytest.raises(NotNormalized):
        monotonicity_profile(fixtures.singleton_domain(), [2.0])


def test_input_errors():
    dom = fixtures.example41_domain()
    with pytest.raises(InvalidP):
        first_eigenpair(dom, 1.0)
    with pytest.raises(InvalidP):
        dirichlet_energy(dom, 0.5, [1, 1, 1])
    with pytest.raises(DimensionMismatch):
        dirichlet_energy(dom, 2.0, [1, 1])
    with pytest.raises(ZeroFunction):
        rayleigh_quotient(dom, 2.0, [0, 0, 0])
    with pytest.raises(NotBipartite):
        max_eigenpair_bipartite(fixtures.triangle_domain(), 2.0)
    split = build_domain(fixtures.path_graph(5), ["v0", "v2"])
    with pytest.raises(DisconnectedDomain):
        first_eigenpair(split, 2.0)
    with pytest.raises(ValueError):
        SolverConfig(residual_tol=0)
