import math

import numpy as np
import pytest

from freesd import (
    DensityCurve,
    GridSpec,
    MassDeficitError,
    build_density,
    cauchy_from_curve,
    check_cdf_shape,
    check_unimodal,
    crossvalidate,
    density_at,
    density_at_xi,
    h_transform,
    mode,
    moments_from_density,
    solve_v,
    write_csv,
)
from freesd.density import cdf, level_crossings, local_scale

from conftest import context, default_curve


def test_default_curve_shape(sym_curve):
    c = sym_curve
    assert len(c) == 512
    assert np.all(np.diff(c.xi) > 0)
    assert c.mass == pytest.approx(1.0, abs=1e-3)
    assert c.tolerances["solve_v"] == 1e-12
    assert len(c.points) == 512 and c.points[0] == (c.x[0], c.v[0], c.xi[0], c.f[0])


def test_density_formula_on_the_curve(sym_ctx):
    x = 0.4
    v = solve_v(sym_ctx, x)
    xi, f = density_at(sym_ctx, x)
    assert f == pytest.approx(v / (math.pi * (x * x + v * v)), rel=1e-12)
    assert xi == pytest.approx(h_transform(sym_ctx, complex(x, v)).real, rel=1e-12)


def test_density_at_xi_inverts_p(sym_ctx, sym_curve):
    i = 300
    assert density_at_xi(sym_ctx, sym_curve.xi[i]) == pytest.approx(sym_curve.f[i], rel=1e-9)


def test_mode_of_even_k_is_zero(sym_ctx, sym_curve):
    omega, fmax = mode(sym_curve, sym_ctx)
    assert abs(omega) < 1e-6
    assert fmax == pytest.approx(0.45834495, abs=1e-7)
    assert fmax >= sym_curve.f.max()


def test_mode_of_half_exp_is_positive():
    omega, fmax = mode(default_curve("half-exp"))
    assert 0.1 < omega < 0.2
    assert fmax >= default_curve("half-exp").f.max()


@pytest.mark.parametrize("name", ["symexp", "half-exp", "gauss-scaled"])
def test_unimodal_and_cdf_shape(name):
    c = default_curve(name)
    rep = check_unimodal(c)
    rep.extend(check_cdf_shape(c))
    assert rep.ok, rep.lines()
    assert set(rep["level_crossings"].detail["counts"].values()) == {2}


def test_unimodality_check_detects_two_bumps():
    xi = np.linspace(-5, 5, 401)
    f = np.exp(-((xi - 2) ** 2)) + np.exp(-((xi + 2) ** 2))
    f /= np.trapezoid(f, xi)
    c = DensityCurve.from_arrays(xi, np.ones_like(xi), xi, f)
    rep = check_unimodal(c)
    assert not rep["unimodal"].passed
    assert rep["unimodal"].detail["transitions_down_up"] == 1
    assert not check_cdf_shape(c)["cdf_convex_concave"].passed


def test_level_crossings_counts_sign_changes():
    assert level_crossings([0, 1, 2, 1, 0], 0.5) == 2
    assert level_crossings([0, 1, 0, 1, 0], 0.5) == 4


def test_cdf_ends_at_mass(sym_curve):
    xi, F = cdf(sym_curve)
    assert F[0] == 0 and F[-1] == pytest.approx(sym_curve.mass, rel=1e-14)


def test_moments_from_density(sym_curve):
    m = moments_from_density(sym_curve, 4)
    assert abs(m[0]) < 1e-10 and abs(m[2]) < 1e-9
    assert m[1] == pytest.approx(2.0, abs=1e-2)
    with pytest.raises(ValueError):
        moments_from_density(sym_curve, 9)


def test_mass_deficit_is_reported(sym_ctx):
    with pytest.raises(MassDeficitError) as err:
        build_density(sym_ctx, GridSpec(-0.5, 0.5, 64), expand=False)
    assert 0.3 < err.value.mass < 0.5
    # one fourfold widening is not enough either
    with pytest.raises(MassDeficitError) as err:
        build_density(sym_ctx, GridSpec(-0.5, 0.5, 64))
    assert 0.85 < err.value.mass < 0.95


def test_expansion_recovers_a_narrow_user_domain(sym_ctx):
    c = build_density(sym_ctx, GridSpec(-2.0, 2.0, 128))
    assert c.x[0] < -2 and c.mass == pytest.approx(1, abs=1e-2)


def test_shift_translates_xi_only(sym_ctx):
    a = build_density(sym_ctx, GridSpec(-11, 11, 64, False))
    b = build_density(sym_ctx, GridSpec(-11, 11, 64, False), shift=0.75)
    assert np.array_equal(a.f, b.f)
    assert np.allclose(b.xi - a.xi, 0.75, atol=1e-15)
    assert mode(b)[0] == pytest.approx(mode(a)[0] + 0.75, abs=1e-12)


def test_crossvalidate_symexp(sym_ctx, sym_curve):
    r = crossvalidate(sym_ctx, sym_curve, stride=8)["stieltjes_two_path"]
    assert r.passed and r.residual < 1e-5
    assert r.detail["skipped_points"] == 0
    assert r.detail["per_probe"][1e-3] > r.detail["per_probe"][1e-4]
    with pytest.raises(ValueError):
        crossvalidate(sym_ctx, sym_curve, y_probe=(0.5,))


def test_crossvalidate_skips_only_the_hard_edge():
    c = default_curve("half-exp")
    r = crossvalidate(context("half-exp"), c, stride=4)["stieltjes_two_path"]
    assert r.passed
    assert 0 < r.detail["skipped_points"] < 0.1 * r.detail["n_points"]
    edge = c.xi[np.argmin(local_scale(c))]
    assert 0.1 < edge < 0.12


def test_cauchy_from_curve_reproduces_g_of_h(sym_ctx):
    zs = np.array([0.3 + 0.9j, -2.0 + 1.4j, 5.0 + 1.5j])
    hs = np.array([h_transform(sym_ctx, z) for z in zs])
    g = cauchy_from_curve(sym_ctx, hs)
    assert np.max(np.abs(zs * g - 1)) < 1e-10
    with pytest.raises(ValueError):
        cauchy_from_curve(sym_ctx, [1 - 1j])


def test_write_csv_round_trip(tmp_path, sym_curve):
    p = tmp_path / "d.csv"
    write_csv(sym_curve, p)
    lines = p.read_text().splitlines()
    assert lines[0] == "x,v,xi,f"
    data = np.loadtxt(p, delimiter=",", skiprows=1)
    assert np.array_equal(data[:, 2], sym_curve.xi)
    assert np.array_equal(data[:, 3], sym_curve.f)


def test_gridspec_validation():
    with pytest.raises(ValueError):
        GridSpec(n_points=8)
    with pytest.raises(ValueError):
        GridSpec(x_min=1.0)
    with pytest.raises(ValueError):
        GridSpec(2.0, 1.0)
