import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from freesd import (
    FreeTriplet,
    HalfExp,
    QuadSpec,
    SymExp,
    TransformContext,
    cauchy_oracle,
    cumulants_from_k,
    h_transform,
    mollify_k,
    moments_from_cumulants,
    p_map,
    solve_v,
)
from freesd.transforms import f_transform

SETTINGS = settings(max_examples=25, deadline=None)
xs = st.floats(-6, 6, allow_nan=False)
ys = st.floats(0.01, 20, allow_nan=False)
dilations = st.floats(0.2, 1.0, allow_nan=False, exclude_max=True)
families = st.sampled_from([SymExp(), HalfExp(), SymExp(2.0, 0.7)])


def ctx_of(k):
    return TransformContext(k, QuadSpec())


@SETTINGS
@given(families, xs, ys, st.floats(1.01, 4))
def test_f_strictly_decreasing_in_height(k, x, y, ratio):
    ctx = ctx_of(k)
    assert f_transform(ctx, x, y) > f_transform(ctx, x, y * ratio)


@SETTINGS
@given(families, xs, ys)
def test_imaginary_part_of_h(k, x, y):
    ctx = ctx_of(k)
    h = h_transform(ctx, complex(x, y))
    assert math.isclose(h.imag, y * (1 - f_transform(ctx, x, y)), rel_tol=1e-9, abs_tol=1e-12)


@SETTINGS
@given(families, xs, st.floats(0.05, 3))
def test_p_strictly_increasing(k, x, dx):
    ctx = ctx_of(k)
    assert p_map(ctx, x + dx) > p_map(ctx, x)


@SETTINGS
@given(families, xs)
def test_density_bound_and_positivity(k, x):
    ctx = ctx_of(k)
    v = solve_v(ctx, x)
    f = v / (math.pi * (x * x + v * v))
    assert 0 < f <= 1 / (math.pi * v) * (1 + 1e-15)


@SETTINGS
@given(families, xs, dilations)
def test_dilation_covariance_of_v(k, x, c):
    v = solve_v(ctx_of(k), x)
    vc = solve_v(ctx_of(k.dilate(c)), c * x)
    assert math.isclose(vc, c * v, rel_tol=1e-9, abs_tol=1e-300)


@SETTINGS
@given(families, xs, st.floats(0.05, 3))
def test_g_of_h_round_trip_above_curve(k, x, lift):
    ctx = ctx_of(k)
    z = complex(x, solve_v(ctx, x) + lift)
    g = cauchy_oracle(ctx, h_transform(ctx, z))
    assert abs(z * g - 1) < 1e-9
    assert g.imag < 0


@settings(max_examples=10, deadline=None)
@given(dilations)
def test_cumulants_scale_with_dilation(c):
    k = HalfExp(epsilon=0.0)
    base = cumulants_from_k(FreeTriplet(0.0, k, 0.0), 6)
    scaled = cumulants_from_k(FreeTriplet(0.0, k.dilate(c), 0.0), 6)
    for n in range(2, 7):
        assert math.isclose(scaled.order(n), c**n * base.order(n), rel_tol=1e-9)


@SETTINGS
@given(st.lists(st.floats(-3, 3, allow_nan=False), min_size=1, max_size=8), st.floats(-2, 2, allow_nan=False))
def test_moment_recursion_homogeneity(kappa, c):
    scaled = [c ** (n + 1) * x for n, x in enumerate(kappa)]
    m = moments_from_cumulants(kappa)
    ms = moments_from_cumulants(scaled)
    for n, (a, b) in enumerate(zip(m, ms), 1):
        assert math.isclose(b, c**n * a, rel_tol=1e-9, abs_tol=1e-9 * (1 + abs(c) ** n * (1 + abs(a))))


@SETTINGS
@given(st.floats(-3, 3, allow_nan=False), st.integers(1, 8))
def test_only_first_cumulant_gives_a_point_mass(k1, N):
    m = moments_from_cumulants([k1] + [0.0] * (N - 1))
    assert np.allclose(m, [k1**n for n in range(1, N + 1)], rtol=1e-12, atol=1e-12)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([4, 8, 16]), st.floats(0.001, 20), st.floats(0.0, 2.0))
def test_mollified_density_positive_and_monotone(n, t, a):
    kn = mollify_k(SymExp(), a=a, n=n)
    for side in (-1, 1):
        assert kn(side * t) > 0
        # near 0 the true decrease is below rounding; same flatness tolerance as validation
        assert kn(side * t) >= kn(side * t * 1.05) * (1 - 1e-10)
