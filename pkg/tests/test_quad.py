import math

import numpy as np
import pytest
from scipy import integrate

from freesd import CauchyType, DivergentIntegralError, GaussScaled, HalfExp, QuadSpec, SymExp
from freesd.errors import NonConvergenceError
from freesd.quad import (
    _adaptive,
    cauchy_integral,
    cauchy_moments,
    poisson_integral,
    poisson_moments,
    sigma_integral,
    weighted_integral,
)

# mpmath at 30 digits
POISSON_ORACLE = {
    ("symexp", 0.0, 1.0): 0.68675592311285407,
    ("symexp", 0.5, 0.25): 3.327948518359992,
    ("symexp", -1.5, 0.1): 10.021496826032942,
    ("symexp", 3.0, 2.0): 0.20359594048764383,
    ("symexp", 0.0, 10.0): 0.0189770780327096,
    ("half-exp", 0.0, 1.0): 0.34337796751990066,
    ("half-exp", 0.5, 0.25): 2.9647360525273531,
    ("half-exp", -1.5, 0.1): 0.12042842962449216,
    ("half-exp", 3.0, 2.0): 0.16421946273237429,
    ("gauss-scaled", 0.0, 1.0): 0.59634736232319407,
    ("gauss-scaled", 0.5, 0.25): 3.6750693067198307,
    ("gauss-scaled", -1.5, 0.1): 5.0926952719943457,
    ("gauss-scaled", 3.0, 2.0): 0.087337987600278613,
}
K = {"symexp": SymExp(), "half-exp": HalfExp(), "gauss-scaled": GaussScaled()}


@pytest.mark.parametrize("key", sorted(POISSON_ORACLE), ids=str)
def test_poisson_integral_matches_oracle(key):
    name, x, y = key
    assert poisson_integral(K[name], x, y) == pytest.approx(POISSON_ORACLE[key], rel=1e-9)


def test_poisson_near_axis_matches_limit():
    # F ~ pi |x| k(x) / y as y -> 0
    k = SymExp()
    y = 1e-9
    assert poisson_integral(k, 1.0, y) * y == pytest.approx(math.pi * math.exp(-1), rel=1e-6)


def test_poisson_derivatives_match_finite_differences():
    k = HalfExp()
    x, y, h = 0.4, 0.3, 1e-6
    F, Fy, Fx = poisson_moments(k, x, y, dy=True, dx=True)
    assert Fy == pytest.approx((poisson_integral(k, x, y + h) - poisson_integral(k, x, y - h)) / (2 * h), rel=1e-6)
    assert Fx == pytest.approx((poisson_integral(k, x + h, y) - poisson_integral(k, x - h, y)) / (2 * h), rel=1e-6)


def test_cauchy_integral_against_scipy():
    k = SymExp()
    z = 0.3 + 0.2j
    re = sum(
        integrate.quad(lambda t: (abs(t) * math.exp(-abs(t)) / (z - t)).real, a, b, epsabs=1e-14, limit=400)[0]
        for a, b in [(-np.inf, 0), (0, 0.3), (0.3, np.inf)]
    )
    im = sum(
        integrate.quad(lambda t: (abs(t) * math.exp(-abs(t)) / (z - t)).imag, a, b, epsabs=1e-14, limit=400)[0]
        for a, b in [(-np.inf, 0), (0, 0.3), (0.3, np.inf)]
    )
    assert cauchy_integral(k, z) == pytest.approx(complex(re, im), abs=1e-11)


def test_cauchy_imaginary_part_is_minus_y_F():
    k = GaussScaled(1.0, 2.0)
    x, y = -0.2, 0.15
    assert cauchy_integral(k, complex(x, y)).imag == pytest.approx(-y * poisson_integral(k, x, y), rel=1e-10)


def test_cauchy_second_moment_is_derivative():
    k = SymExp()
    z, h = 0.5 + 0.7j, 1e-6
    _, c2 = cauchy_moments(k, z, deriv=True)
    fd = (cauchy_integral(k, z + h) - cauchy_integral(k, z - h)) / (2 * h)
    assert -c2 == pytest.approx(fd, rel=1e-6)


def test_weighted_and_sigma_integrals():
    k = SymExp()
    assert weighted_integral(k, np.abs, -np.inf, np.inf, moment=1) == pytest.approx(2.0, rel=1e-10)
    # int |t| e^{-|t|} / (1 + t^2) dt
    exact = 2 * integrate.quad(lambda t: t * math.exp(-t) / (1 + t * t), 0, np.inf, epsabs=1e-14)[0]
    assert sigma_integral(k, np.ones_like) == pytest.approx(exact, rel=1e-10)


def test_heavy_tail_is_refused():
    with pytest.raises(DivergentIntegralError):
        poisson_integral(CauchyType(), 0.0, 1.0)
    with pytest.raises(DivergentIntegralError):
        weighted_integral(CauchyType(), np.abs, -np.inf, np.inf, moment=1)


def test_adaptive_reports_non_convergence():
    spec = QuadSpec(abs_tol=1e-15, rel_tol=1e-15, max_depth=10)
    with pytest.raises(NonConvergenceError):
        _adaptive(lambda s: np.atleast_2d(1 / np.sqrt(np.abs(s - 0.3333))), [0.0, 1.0], spec)


def test_quadspec_validation():
    with pytest.raises(ValueError):
        QuadSpec(abs_tol=0)
    with pytest.raises(ValueError):
        QuadSpec(max_depth=3)


def test_scaled_derivatives_do_not_overflow():
    k = HalfExp(lam=0.0)
    F, yFy, yFx = poisson_moments(k, 20.0, 1e-170, dy=True, dx=True, scaled=True)
    assert np.isfinite([F, yFy, yFx]).all()
    assert -2 * F <= yFy < 0
    x, y = 0.4, 0.3
    _, Fy, Fx = poisson_moments(SymExp(), x, y, dy=True, dx=True)
    _, sFy, sFx = poisson_moments(SymExp(), x, y, dy=True, dx=True, scaled=True)
    assert sFy == pytest.approx(y * Fy, rel=1e-12) and sFx == pytest.approx(y * Fx, rel=1e-12)
