import math
from fractions import Fraction

import pytest

from pcheeger.limits import CONVERGED, DIVERGES, INCONCLUSIVE, estimate_limit, levin_u


def test_constant_tail():
    est = estimate_limit([Fraction(1, 3)] * 20)
    assert est.status == CONVERGED and est.method == "constant"
    assert est.value == pytest.approx(1 / 3)


def test_rational_approach():
    est = estimate_limit([Fraction(n, n + 1) for n in range(1, 200)])
    assert est.converged
    assert est.value == pytest.approx(1.0, abs=1e-9)


def test_basel_partial_sums():
    partial, acc = [], Fraction(0)
    for k in range(1, 80):
        acc += Fraction(1, k * k)
        partial.append(acc)
    est = estimate_limit(partial)
    assert est.converged
    assert est.value == pytest.approx(math.pi**2 / 6, abs=1e-9)


@pytest.mark.parametrize("seq", [[n for n in range(1, 100)], [Fraction(n * n, 7) for n in range(1, 60)]])
def test_polynomial_growth_diverges(seq):
    est = estimate_limit(seq)
    assert est.status == DIVERGES and est.as_number() == math.inf


def test_oscillation_is_inconclusive():
    est = estimate_limit([(-1) ** n for n in range(100)])
    assert est.status == INCONCLUSIVE
    assert est.as_number() is None


def test_short_sequences_rejected():
    with pytest.raises(ValueError):
        estimate_limit([1, 2, 3])


def test_levin_exact_on_geometric_tail():
    s = [1 - Fraction(1, 2**n) for n in range(20)]
    assert float(levin_u(s, 3, 5)) == pytest.approx(1.0, abs=1e-12)
