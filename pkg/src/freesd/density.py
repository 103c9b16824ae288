"""The density of ``nu_k`` in parametric form and its certification.

Along the boundary curve the density is explicit:
``f(P_k(x)) = v_k(x) / (pi (x^2 + v_k(x)^2))``.  A :class:`DensityCurve` keeps
the samples ``(x, v, xi, f)``; the remaining functions locate the mode, test
unimodality, integrate, and compare against Stieltjes inversion of the
Cauchy transform computed by :func:`freesd.transforms.cauchy_oracle`.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from .errors import MassDeficitError, NonConvergenceError
from .report import ValidationReport
from . import quad as _quad
from .transforms import h_and_deriv, invert_h
from .vcurve import curve_grid, default_domain, p_map, representable_edge, solve_v, v_slope

__all__ = [
    "GridSpec",
    "DensityCurve",
    "density_at",
    "density_at_xi",
    "build_density",
    "mode",
    "check_unimodal",
    "level_crossings",
    "cdf",
    "check_cdf_shape",
    "moments_from_density",
    "local_scale",
    "crossvalidate",
    "cauchy_from_curve",
    "write_csv",
]

CSV_HEADER = ("x", "v", "xi", "f")
LEVELS = (0.1, 0.25, 0.5, 0.75, 0.9)


def _f(x, v):
    return v / (math.pi * (x * x + v * v))


@dataclass(frozen=True)
class GridSpec:
    """Sampling plan for :func:`build_density`.

    ``x_min``/``x_max`` left as ``None`` are chosen by
    :func:`freesd.vcurve.default_domain`.
    """

    x_min: float = None
    x_max: float = None
    n_points: int = 512
    refine: bool = True

    def __post_init__(self):
        if self.n_points < 16:
            raise ValueError("n_points must be >= 16")
        if (self.x_min is None) != (self.x_max is None):
            raise ValueError("give both x_min and x_max or neither")
        if self.x_min is not None and not self.x_min < self.x_max:
            raise ValueError("x_min must be < x_max")


@dataclass(frozen=True)
class DensityCurve:
    """Samples of the density of ``nu_k`` along the boundary curve.

    Attributes
    ----------
    x, v, xi, f : numpy.ndarray
        Curve abscissae, heights, ``xi = P_k(x) + shift`` and density values.
    mass : float
        Trapezoid integral of ``f`` over ``xi``.
    mode_index : int
        Index of the largest sample.
    shift : float
        Translation applied to ``xi`` (``eta - eta_L`` for a triplet drift
        other than the one of ``nu_k``).
    tolerances : dict
    """

    x: np.ndarray
    v: np.ndarray
    xi: np.ndarray
    f: np.ndarray
    mass: float
    mode_index: int
    shift: float = 0.0
    tolerances: dict = field(default_factory=dict)
    ctx: object = field(default=None, repr=False, compare=False)

    @property
    def points(self):
        return list(zip(self.x.tolist(), self.v.tolist(), self.xi.tolist(), self.f.tolist()))

    def __len__(self):
        return self.x.size

    @classmethod
    def from_arrays(cls, x, v, xi, f, shift=0.0, tolerances=None, ctx=None):
        x, v, xi, f = (np.asarray(a, dtype=float) for a in (x, v, xi, f))
        mass = float(np.trapezoid(f, xi))
        return cls(x, v, xi, f, mass, int(np.argmax(f)), shift, dict(tolerances or {}), ctx)


def density_at(ctx, x, tol=1e-12):
    """``(xi, f)`` with ``xi = P_k(x)`` and ``f = v/(pi (x^2 + v^2))``, ``v = v_k(x)``."""
    v = solve_v(ctx, x, tol)
    return p_map(ctx, x, v=v), _f(float(x), v)


def density_at_xi(ctx, xi, tol=1e-12, bracket=None):
    """Density of ``nu_k`` at ``xi``, inverting ``P_k`` by Brent's method.

    ``P_k(x) - x - gamma_k`` is bounded, so the root is bracketed by widening
    ``[xi - gamma_k - 1, xi - gamma_k + 1]`` geometrically unless ``bracket``
    is given.
    """
    xi = float(xi)
    cache = {}

    def g(x):
        if x not in cache:
            v = solve_v(ctx, x, tol)
            cache[x] = (p_map(ctx, x, v=v) - xi, v)
        return cache[x][0]

    if bracket is None:
        c = xi - ctx.gamma
        w = 1.0
        lo, hi = c - w, c + w
        while g(lo) > 0:
            lo -= w
            w *= 2
        w = 1.0
        while g(hi) < 0:
            hi += w
            w *= 2
    else:
        lo, hi = bracket
    x = optimize.brentq(g, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
    v = cache[x][1] if x in cache else solve_v(ctx, x, tol)
    return _f(x, v)


def build_density(ctx, grid=None, tol=1e-12, mass_tol=1e-2, shift=0.0, workers=1, expand=True):
    """Sample the density of ``nu_k`` (translated by ``shift``).

    Parameters
    ----------
    ctx : TransformContext
    grid : GridSpec, optional
    tol : float
        Tolerance of the curve solver.
    mass_tol : float
        Allowed ``|mass - 1|``.
    shift : float
    workers : int
        Process count for the per-point solves; results do not depend on it.
    expand : bool
        Widen a default or user domain once by a factor 4 when mass is
        missing.

    Raises
    ------
    MonotonicityError
        ``xi`` is not strictly increasing.
    MassDeficitError
        ``|mass - 1| > mass_tol`` after the optional expansion.
    """
    grid = grid or GridSpec()
    if grid.x_min is None:
        lo, hi = default_domain(ctx, tol=tol)
    else:
        lo, hi = grid.x_min, grid.x_max
    curve = _sample(ctx, lo, hi, grid, tol, shift, workers, mass_tol)
    if abs(curve.mass - 1.0) > mass_tol and expand and curve.mass < 1.0:
        c = 0.5 * (lo + hi)
        half = 2.0 * (hi - lo)
        lo4 = representable_edge(ctx, lo, c - half, tol)
        hi4 = representable_edge(ctx, hi, c + half, tol)
        if (lo4, hi4) != (lo, hi):
            curve = _sample(ctx, lo4, hi4, grid, tol, shift, workers, mass_tol)
    if abs(curve.mass - 1.0) > mass_tol:
        raise MassDeficitError(
            f"density mass {curve.mass:.6f} deviates from 1 by more than {mass_tol:g}; "
            "the x-domain is too narrow",
            mass=curve.mass,
        )
    return curve


def _sample(ctx, lo, hi, grid, tol, shift, workers, mass_tol):
    pts = curve_grid(ctx, lo, hi, grid.n_points, refine=grid.refine, tol=tol, workers=workers)
    x = np.array([p.x for p in pts])
    v = np.array([p.v for p in pts])
    xi = np.array([p.xi for p in pts]) + shift
    f = v / (np.pi * (x * x + v * v))
    tols = {"solve_v": tol, "quad_abs": ctx.quad.abs_tol, "quad_rel": ctx.quad.rel_tol, "mass": mass_tol}
    return DensityCurve.from_arrays(x, v, xi, f, shift, tols, ctx)


def mode(curve, ctx=None):
    """Mode ``omega`` and peak value ``f_max``.

    The largest sample is refined in ``x``, where the parametric form is
    smooth: the root of ``d/dx [v/(x^2+v^2)] = v'(x^2 - v^2) - 2 x v`` is found
    by Brent's method, with golden-section search as fallback.  Without a
    context the largest sample is returned.
    """
    ctx = ctx or curve.ctx
    i = curve.mode_index
    if ctx is None or curve.x.size < 3:
        return float(curve.xi[i]), float(curve.f[i])
    lo = curve.x[max(i - 1, 0)]
    hi = curve.x[min(i + 1, curve.x.size - 1)]
    tol = curve.tolerances.get("solve_v", 1e-12)

    def v_at(x):
        return solve_v(ctx, x, tol)

    def dfun(x):
        v = v_at(x)
        return v_slope(ctx, x, v) * (x * x - v * v) - 2.0 * x * v

    try:
        if dfun(lo) > 0 > dfun(hi):
            xm = optimize.brentq(dfun, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        else:
            raise ValueError
    except (ValueError, NonConvergenceError):
        res = optimize.minimize_scalar(
            lambda x: -_f(x, v_at(x)), bracket=(lo, curve.x[i], hi), method="golden", tol=1e-10
        )
        xm = float(res.x)
    v = v_at(xm)
    fm = _f(xm, v)
    if fm < curve.f[i]:
        return float(curve.xi[i]), float(curve.f[i])
    return p_map(ctx, xm, v=v) + curve.shift, fm


def _signs(values, flat_tol):
    d = np.diff(values)
    s = np.where(np.abs(d) <= flat_tol, 0, np.sign(d)).astype(int)
    return s[s != 0], d


def level_crossings(f, rho):
    """Number of sign changes of ``f - rho`` along the samples."""
    s = np.sign(np.asarray(f) - rho)
    s = s[s != 0]
    return int(np.sum(s[:-1] != s[1:]))


def check_unimodal(curve, flat_tol=None, levels=LEVELS):
    """Certify that the sampled density increases then decreases.

    Differences with ``|df| <= flat_tol`` (default ``1e-12 f_max``) count as
    flat.  The ``unimodal`` check passes iff the nonflat signs make exactly
    one ``+ -> -`` transition and no ``- -> +`` transition.  For each level
    ``rho * f_max`` a ``level_crossings`` check requires exactly two
    crossings.
    """
    f = np.asarray(curve.f)
    fmax = float(np.max(f))
    if flat_tol is None:
        flat_tol = 1e-12 * fmax
    s, d = _signs(f, flat_tol)
    up_down = int(np.sum((s[:-1] > 0) & (s[1:] < 0)))
    down_up = int(np.sum((s[:-1] < 0) & (s[1:] > 0)))
    ok = up_down == 1 and down_up == 0
    # size of the worst wrong-way step
    i = int(np.argmax(f))
    wrong = np.concatenate([np.maximum(-d[:i], 0), np.maximum(d[i:], 0)])
    wrong = np.where(wrong <= flat_tol, 0.0, wrong)
    rep = ValidationReport()
    rep.add(
        "unimodal",
        ok,
        float(wrong.max()) if wrong.size else 0.0,
        transitions_up_down=up_down,
        transitions_down_up=down_up,
    )
    counts = {}
    for rho in levels:
        counts[rho] = level_crossings(f, rho * fmax)
    bad = [c for c in counts.values() if c != 2]
    rep.add(
        "level_crossings",
        not bad and fmax > 0,
        float(max((abs(c - 2) for c in counts.values()), default=0)),
        counts=counts,
    )
    return rep


def cdf(curve):
    """Distribution function by cumulative trapezoid sums; ``F[-1] == mass``.

    Returns
    -------
    xi, F : numpy.ndarray
    """
    F = integrate.cumulative_trapezoid(curve.f, curve.xi, initial=0.0)
    return curve.xi.copy(), F


def check_cdf_shape(curve, flat_tol=None):
    """Convex left of the mode and concave right of it, via slopes of ``F``."""
    xi, F = cdf(curve)
    slope = np.diff(F) / np.diff(xi)
    fmax = float(np.max(curve.f))
    if flat_tol is None:
        flat_tol = 1e-12 * fmax
    dslope = np.diff(slope)
    i = int(np.argmax(slope))
    left = dslope[: max(i, 0)]
    right = dslope[i:]
    worst = max(
        float(np.max(-left, initial=0.0)),
        float(np.max(right, initial=0.0)),
    )
    rep = ValidationReport()
    rep.add("cdf_convex_concave", worst <= flat_tol, worst)
    rep.add("cdf_monotone", bool(np.all(np.diff(F) > 0)), float(np.max(-np.diff(F), initial=0.0)))
    return rep


def moments_from_density(curve, N):
    """Trapezoid moments ``int xi^j f dxi`` for ``j = 1..N`` (``N <= 8``)."""
    if not 1 <= N <= 8:
        raise ValueError("moment order must be between 1 and 8")
    xi = curve.xi
    return [float(np.trapezoid(xi**j * curve.f, xi)) for j in range(1, N + 1)]


def local_scale(curve):
    """Length over which the sampled density changes by its own size.

    ``f / |df/dxi|`` from one-sided differences, taking the smaller of the two
    neighbours; ``inf`` where the density is flat.
    """
    f, xi = curve.f, curve.xi
    with np.errstate(divide="ignore", invalid="ignore"):
        slope = np.abs(np.diff(f) / np.diff(xi))
        s = np.full(f.size, 0.0)
        s[:-1] = slope
        s[1:] = np.maximum(s[1:], slope)
        return np.where(s > 0, f / s, np.inf)


def crossvalidate(ctx, curve, y_probe=(1e-3, 1e-4), stride=1, tol=1e-9, resolve=0.05, max_skipped=0.1):
    """Compare the parametric density with Stieltjes inversion.

    At each sampled ``xi`` the value ``-Im G(xi + i y)/pi`` is computed for
    every ``y`` in ``y_probe`` and, with two or more probes, extrapolated
    linearly to ``y = 0`` from the two smallest.  Points where the inversion
    fails are counted, not fatal.

    Linear extrapolation needs the probe height to be small against the
    scale on which ``f`` varies.  Points where the largest probe exceeds
    ``resolve`` times :func:`local_scale` (steep edges of the support) are
    skipped; the check fails if they exceed a fraction ``max_skipped``.

    Returns
    -------
    ValidationReport
        One ``stieltjes_two_path`` check (sup deviation ``<= 1e-3``), with the
        unextrapolated deviation per probe height in the detail.
    """
    ys = sorted(float(y) for y in y_probe)
    if not ys or ys[0] <= 0 or ys[-1] > 1e-1:
        raise ValueError("probe heights must lie in (0, 0.1]")
    idx = np.arange(0, curve.x.size, max(1, int(stride)))
    scale = local_scale(curve)
    unresolved = ys[-1] > resolve * scale
    per_probe = {y: 0.0 for y in ys}
    worst = 0.0
    worst_xi = None
    failed = 0
    skipped = 0
    for i in idx:
        if unresolved[i]:
            skipped += 1
            continue
        x, v = curve.x[i], curve.v[i]
        xi0 = curve.xi[i] - curve.shift
        vals = []
        try:
            for y in ys:
                z, _ = invert_h(ctx, complex(xi0, y), z0=complex(x, v + y), tol=tol)
                vals.append(-(1.0 / z).imag / math.pi)
        except NonConvergenceError:
            failed += 1
            continue
        for y, fy in zip(ys, vals):
            per_probe[y] = max(per_probe[y], abs(fy - curve.f[i]))
        if len(vals) >= 2:
            y1, y2 = ys[0], ys[1]
            est = vals[0] - (vals[1] - vals[0]) * y1 / (y2 - y1)
        else:
            est = vals[0]
        dev = abs(est - curve.f[i])
        if dev > worst:
            worst, worst_xi = dev, float(curve.xi[i])
    rep = ValidationReport()
    rep.add(
        "stieltjes_two_path",
        worst <= 1e-3 and failed == 0 and skipped <= max_skipped * idx.size,
        worst,
        worst_xi=worst_xi,
        per_probe=per_probe,
        failed_points=failed,
        skipped_points=skipped,
        n_points=int(idx.size),
    )
    return rep


def cauchy_from_curve(ctx, zetas, x_min=None, x_max=None, spec=None, tol=1e-12):
    """Cauchy transform of ``nu_k`` integrated along the boundary curve.

    Substituting ``xi = P_k(x)`` gives
    ``G(zeta) = int f(P_k(x)) P_k'(x) / (zeta - P_k(x)) dx`` with
    ``P_k' = H_k'(w) (1 + i v_k')`` at ``w = x + i v_k(x)``.  This route uses
    only the parametric density, never an inversion of ``H_k``.

    Parameters
    ----------
    ctx : TransformContext
    zetas : array_like of complex
        Points with positive imaginary part, not too close to the axis.
    x_min, x_max : float, optional
        Integration range in ``x``; by default the range where ``v_k``
        exceeds ``1e-14`` times its maximum.
    spec : QuadSpec, optional

    Returns
    -------
    numpy.ndarray of complex
    """
    zetas = np.atleast_1d(np.asarray(zetas, dtype=complex))
    if np.any(zetas.imag <= 0):
        raise ValueError("zetas must lie in the upper half-plane")
    if x_min is None:
        x_min, x_max = default_domain(ctx, ratio=1e-14, tol=tol)
    spec = spec or _quad.QuadSpec(abs_tol=1e-13, rel_tol=1e-11)
    m = zetas.size

    def rows(xs):
        out = np.empty((2 * m, xs.size))
        for j, x in enumerate(xs):
            v = solve_v(ctx, x, tol)
            w = complex(x, v)
            h, dh = h_and_deriv(ctx, w, ctx.precise)
            dp = (dh * complex(1.0, v_slope(ctx, x, v))).real
            g = -(1.0 / w).imag / math.pi * dp / (zetas - h.real)
            out[:m, j] = g.real
            out[m:, j] = g.imag
        return out

    breaks = np.linspace(x_min, x_max, 17)
    I = _quad._adaptive(rows, breaks, spec)
    return I[:m] + 1j * I[m:]


def write_csv(curve, path):
    """Write ``x,v,xi,f`` rows with 17 significant digits."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in zip(curve.x, curve.v, curve.xi, curve.f):
            w.writerow([f"{val:.16e}" for val in row])
