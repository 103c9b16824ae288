import math

import pytest

from freesd import (
    CauchyType,
    DivergentIntegralError,
    FreeTriplet,
    GaussScaled,
    HalfExp,
    SymExp,
    cumulants_from_k,
    moments_from_cumulants,
)
from freesd.levy import lemma_eta


def test_symexp_cumulants_closed_form():
    # kappa_m = int t^(m-1) sign(t) e^{-|t|} dt = 2 (m-1)! for even m, 0 for odd m
    c = cumulants_from_k(FreeTriplet.lemma(SymExp()), 12)
    for m in range(1, 13):
        exact = 2 * math.factorial(m - 1) if m % 2 == 0 else 0.0
        assert c.order(m) == pytest.approx(exact, rel=1e-10, abs=1e-9)
    assert len(c) == 12
    with pytest.raises(IndexError):
        c.order(13)


def test_half_exp_cumulants():
    # kappa_1 = gamma_k = 1 for the lemma triplet; kappa_m = (m-1)!
    k = HalfExp(epsilon=0.0)
    c = cumulants_from_k(FreeTriplet.lemma(k), 6)
    assert c.order(1) == pytest.approx(1.0, abs=1e-12)
    for m in range(2, 7):
        assert c.order(m) == pytest.approx(math.factorial(m - 1), rel=1e-11)


def test_first_cumulant_carries_the_drift():
    k = HalfExp(epsilon=0.0)
    c = cumulants_from_k(FreeTriplet(0.0, k, 0.5), 1)
    assert c.order(1) == pytest.approx(0.5 + math.exp(-1), abs=1e-12)
    assert lemma_eta(k) + math.exp(-1) == pytest.approx(1.0, abs=1e-12)


def test_gaussian_coefficient_enters_kappa_2():
    c = cumulants_from_k(FreeTriplet(1.5, GaussScaled(1.0, 64.0), 0.0), 2)
    assert c.order(2) == pytest.approx(2.5, abs=1e-10)


def test_order_cap_and_divergence():
    with pytest.raises(ValueError):
        cumulants_from_k(FreeTriplet.lemma(SymExp()), 13)
    with pytest.raises(ValueError):
        cumulants_from_k(FreeTriplet.lemma(SymExp()), 0)
    with pytest.raises(DivergentIntegralError) as err:
        cumulants_from_k(FreeTriplet(0.0, CauchyType(), 0.0), 3)
    assert err.value.order == 1


def test_moment_recursion_catalan_and_symexp():
    assert moments_from_cumulants([0, 1, 0, 0, 0, 0, 0, 0]) == [0, 1, 0, 2, 0, 5, 0, 14]
    m = moments_from_cumulants([0, 2, 0, 12])
    assert m == pytest.approx([0, 2, 0, 20])
    # free Poisson with rate 1: all cumulants 1, moments are Catalan-like Narayana sums
    assert moments_from_cumulants([1] * 5) == pytest.approx([1, 2, 5, 14, 42])
