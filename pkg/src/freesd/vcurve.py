"""The boundary curve ``v_k`` and the boundary map ``P_k``.

For each real ``x`` the map ``y -> F_k(x+iy)`` decreases strictly from
``+inf`` to ``0``, so ``F_k(x + i v) = 1`` has a unique root ``v = v_k(x)``.
The curve ``y = v_k(x)`` bounds the region that ``H_k`` maps onto the upper
half-plane, and ``P_k(x) = H_k(x + i v_k(x))`` is real there.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import quad as _quad
from .errors import BracketError, MonotonicityError, NonConvergenceError
from .transforms import h_transform, tightened

__all__ = [
    "CurvePoint",
    "solve_v",
    "solve_point",
    "v_slope",
    "p_map",
    "curve_grid",
    "default_domain",
    "representable_edge",
    "angular_profile",
    "angular_minima",
]

Y_MIN = 1e-300
Y_MAX = 1e300
CHUNK = 32
JUMP = 0.05


@dataclass(frozen=True)
class CurvePoint:
    x: float
    v: float
    xi: float
    f_residual: float


def _solver_spec(ctx, tol):
    return tightened(ctx.quad, rel_tol=max(min(0.1 * tol, 1e-13), 1e-14))


def _logF(k, x, y, spec):
    # F and y dF/dy
    return _quad.poisson_moments(k, x, y, spec, dy=True, scaled=True)


def solve_v(ctx, x, tol=1e-12, guess=None, return_residual=False):
    """Height ``v`` with ``F_k(x + i v) = 1``.

    Newton's method on ``log F`` as a function of ``log y``, which is close to
    linear at both ends (``F ~ pi |x| k(x)/y`` as ``y -> 0`` and
    ``F ~ int |t| k / y^2`` as ``y -> inf``).  Steps are clamped until a sign
    change is bracketed, and fall back to bisection in ``log y`` whenever they
    leave the bracket.

    Parameters
    ----------
    ctx : TransformContext
    x : float
    tol : float
        Target for ``|F_k(x + i v) - 1|``.
    guess : float, optional
        Starting height; defaults to 1.  Nearby solutions make grid sweeps
        cheap.
    return_residual : bool

    Returns
    -------
    float or (float, float)

    Raises
    ------
    BracketError
        ``F_k - 1`` keeps its sign down to ``y = 1e-300`` or up to
        ``y = 1e300``; ``k`` is then numerically zero near ``x`` or not
        integrable.
    NonConvergenceError
        No convergence within 200 iterations.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    spec = _solver_spec(ctx, tol)
    k = ctx.k
    x = float(x)
    u = math.log(guess if guess and guess > 0 else 1.0)
    lo = hi = None  # log y with F > 1, log y with F < 1
    best = (math.inf, None)
    for _ in range(200):
        y = math.exp(u)
        F, yFy = _logF(k, x, y, spec)
        r = F - 1.0
        if abs(r) < best[0]:
            best = (abs(r), y)
        if abs(r) <= tol:
            return (y, abs(r)) if return_residual else y
        if r > 0:
            lo = u if lo is None else max(lo, u)
        else:
            hi = u if hi is None else min(hi, u)
        # d log F / d log y
        slope = yFy / F if F > 0 else 0.0
        if F > 0 and slope < 0:
            step = -math.log(F) / slope
        else:
            # F or its slope underflowed: move towards the sign change
            step = 8.0 if r > 0 else -8.0
        if r < 0 and slope > -0.5 and y < 1e-6 and x != 0.0:
            # near the axis F ~ F_far + A / y with A = pi |x| k(x); Newton in
            # log y crawls there, so jump to the root of the asymptotic form
            log_a = math.log(math.pi * abs(x)) + float(k.log_value(x))
            far = F - math.exp(log_a - u) if log_a - u < 700 else -math.inf
            if far < 1.0:
                u_star = log_a - math.log1p(-far)
                if u_star < math.log(Y_MIN):
                    raise BracketError(
                        f"root of F_k(x+iy) = 1 below 1e-300 at x={x:g}: k is numerically zero there",
                        estimate=best[0],
                    )
                step = u_star - u
        if lo is None or hi is None:
            step = max(-8.0, min(8.0, step))
            un = u + step
            if un < math.log(Y_MIN) or un > math.log(Y_MAX):
                if lo is None and u <= math.log(Y_MIN) + 1e-9 or hi is None and u >= math.log(Y_MAX) - 1e-9:
                    raise BracketError(
                        f"no root of F_k(x+iy) = 1 in [1e-300, 1e300] at x={x:g}",
                        estimate=best[0],
                    )
                un = min(max(un, math.log(Y_MIN)), math.log(Y_MAX))
        else:
            un = u + step
            if not (lo < un < hi) or hi - lo < 1e-15 * max(1.0, abs(u)):
                un = 0.5 * (lo + hi)
            if hi - lo <= 4e-16 * max(1.0, abs(lo)):
                # bracket at machine resolution; accept the better end
                return (best[1], best[0]) if return_residual else best[1]
        u = un
    raise NonConvergenceError(f"solve_v did not converge at x={x:g}", estimate=best[0])


def solve_point(ctx, x, tol=1e-12, guess=None):
    """:class:`CurvePoint` at ``x``: the height, its residual and ``P_k(x)``."""
    v, res = solve_v(ctx, x, tol, guess, return_residual=True)
    return CurvePoint(float(x), v, p_map(ctx, x, v=v), res)


def v_slope(ctx, x, v):
    """``v_k'(x) = -dF/dx / dF/dy`` at a point of the curve."""
    _, Fy, Fx = _quad.poisson_moments(ctx.k, x, v, ctx.precise, dy=True, dx=True, scaled=True)
    return -Fx / Fy


def p_map(ctx, x, v=None, tol=1e-12):
    """``P_k(x) = Re H_k(x + i v_k(x))``.

    The imaginary part ``v (1 - F_k)`` is checked to be at most ``1e-8``.
    """
    if v is None:
        v = solve_v(ctx, x, tol)
    h = h_transform(ctx, complex(x, v), ctx.precise)
    if not abs(h.imag) <= 1e-8:
        raise AssertionError(f"Im H_k on the curve is {h.imag:.3e} at x={x:g}; v is inconsistent")
    return h.real


def _solve_chunk(args):
    ctx, xs, tol = args
    out = []
    guess = None
    for x in xs:
        p = solve_point(ctx, x, tol, guess)
        out.append(p)
        guess = p.v
    return out


def _solve_many(ctx, xs, tol, workers=1):
    """Solve on ``xs`` in fixed chunks, each swept with warm starts.

    Chunks are independent so results do not depend on the worker count.
    """
    chunks = [(ctx, xs[i : i + CHUNK], tol) for i in range(0, len(xs), CHUNK)]
    if workers and workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_solve_chunk, chunks))
    else:
        parts = [_solve_chunk(c) for c in chunks]
    return [p for part in parts for p in part]


def _check_monotone(points):
    xi = np.array([p.xi for p in points])
    d = np.diff(xi)
    if np.any(d <= 0):
        j = int(np.argmin(d))
        raise MonotonicityError(
            f"P_k not increasing between x={points[j].x:g} and x={points[j + 1].x:g}"
        )


def curve_grid(ctx, x_min, x_max, n_points, refine=False, tol=1e-12, workers=1, max_points=20000):
    """Sample the curve on ``n_points`` equispaced ``x`` values.

    With ``refine`` set, midpoints are inserted until neighbouring spacings
    in ``xi = P_k(x)`` differ by less than a factor 4 and the density
    ``v/(pi(x^2+v^2))`` changes by at most ``JUMP`` times its maximum between
    neighbours; the second rule resolves hard edges of the support.

    Returns
    -------
    list of CurvePoint
        Ordered in ``x``.

    Raises
    ------
    MonotonicityError
        ``xi`` fails to increase strictly.
    """
    if not x_min < x_max:
        raise ValueError("x_min must be < x_max")
    if n_points < 16:
        raise ValueError("n_points must be >= 16")
    xs = np.linspace(x_min, x_max, int(n_points))
    points = _solve_many(ctx, xs, tol, workers)
    _check_monotone(points)
    if refine:
        points = _refine(ctx, points, tol, workers, max_points)
    return points


def _refine(ctx, points, tol, workers, max_points):
    for _ in range(30):
        xi = np.array([p.xi for p in points])
        d = np.diff(xi)
        bad = np.zeros(d.size, dtype=bool)
        ratio_up = d[1:] > 4 * d[:-1]
        ratio_dn = d[:-1] > 4 * d[1:]
        bad[1:] |= ratio_up
        bad[:-1] |= ratio_dn
        x = np.array([p.x for p in points])
        v = np.array([p.v for p in points])
        f = v / (x * x + v * v)
        bad |= np.abs(np.diff(f)) > JUMP * f.max()
        idx = np.nonzero(bad)[0]
        if idx.size == 0 or len(points) + idx.size > max_points:
            break
        mids = [0.5 * (points[i].x + points[i + 1].x) for i in idx]
        # warm starts from the left neighbour keep the result order-independent
        new = []
        for i, xm in zip(idx, mids):
            new.append(solve_point(ctx, xm, tol, guess=points[i].v))
        merged = []
        j = 0
        for i, p in enumerate(points):
            merged.append(p)
            if j < len(idx) and idx[j] == i:
                merged.append(new[j])
                j += 1
        points = merged
        _check_monotone(points)
    return points


def default_domain(ctx, ratio=1e-3, tol=1e-12, max_extent=1e6):
    """``[x_min, x_max]`` on which ``v_k`` stays above ``ratio * max v_k``.

    Starts at ``gamma_k`` and walks outward with doubling steps, then
    bisects each edge to the crossing of the threshold.  Points where the
    height is not representable count as below the threshold.
    """
    x0 = ctx.gamma
    v0 = solve_v(ctx, x0, tol)

    def height(x, guess):
        try:
            return solve_v(ctx, x, tol, guess)
        except (BracketError, NonConvergenceError):
            return 0.0

    vmax = v0
    edges = []
    for side in (-1, 1):
        inner, vin = x0, v0
        j = 0
        while True:
            step = v0 * (2.0**j)
            x = x0 + side * step
            vx = height(x, vin)
            vmax = max(vmax, vx)
            if vx <= ratio * vmax or step > max_extent:
                break
            inner, vin = x, vx
            j += 1
        outer, outer_ok = x, vx > 0
        for _ in range(60):
            mid = 0.5 * (inner + outer)
            vm = height(mid, vin)
            if vm > ratio * vmax:
                inner, vin = mid, vm
            else:
                outer, outer_ok = mid, vm > 0
            if abs(outer - inner) <= 1e-3 * max(1.0, abs(outer - x0)):
                break
        # never hand back an edge where the height could not be computed
        edges.append(outer if outer_ok else inner)
    return edges[0], edges[1]


def representable_edge(ctx, inner, outer, tol=1e-12):
    """Point closest to ``outer`` on ``[inner, outer]`` where ``v_k`` is computable.

    ``inner`` must be solvable.  Beyond the range where ``k`` underflows the
    height is below the smallest double and the solver fails; the edge of
    that range is located by bisection.
    """
    try:
        solve_v(ctx, outer, tol)
        return outer
    except (BracketError, NonConvergenceError):
        pass
    for _ in range(60):
        mid = 0.5 * (inner + outer)
        try:
            solve_v(ctx, mid, tol)
            inner = mid
        except (BracketError, NonConvergenceError):
            outer = mid
        if abs(outer - inner) <= 1e-6 * max(1.0, abs(outer)):
            break
    return inner


def angular_profile(ctx, r, thetas, spec=None):
    """``F_k`` along the circle through 0 and ``i r``: ``theta -> F_k(r sin(theta) e^{i theta})``.

    Parameters
    ----------
    ctx : TransformContext
    r : float
        Diameter of the circle, ``r > 0``.
    thetas : array_like
        Angles in ``(0, pi)``.

    Returns
    -------
    numpy.ndarray
    """
    if not r > 0:
        raise ValueError("r must be positive")
    th = np.asarray(thetas, dtype=float)
    if np.any((th <= 0) | (th >= np.pi)):
        raise ValueError("angles must lie in (0, pi)")
    spec = spec or ctx.precise
    s = np.sin(th)
    return np.array(
        [_quad.poisson_integral(ctx.k, r * si * ci, r * si * si, spec) for si, ci in zip(s, np.cos(th))]
    )


def angular_minima(values, flat_tol=None):
    """Count interior local minima of a sampled profile.

    Differences within ``flat_tol`` (default ``1e-12 * max|values|``) are
    flat; a plateau is one minimum.  Returns ``(count, index)`` with the index
    of the smallest sample.
    """
    v = np.asarray(values, dtype=float)
    if flat_tol is None:
        flat_tol = 1e-12 * np.max(np.abs(v))
    d = np.diff(v)
    sgn = np.where(np.abs(d) <= flat_tol, 0, np.sign(d))
    sgn = sgn[sgn != 0]
    count = int(np.sum((sgn[:-1] < 0) & (sgn[1:] > 0)))
    return count, int(np.argmin(v))
