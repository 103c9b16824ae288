"""Analytic transforms attached to a Lévy density factor ``k``.

``H_k(z) = z + gamma_k + int |t| k(t) / (z - t) dt`` maps the region above the
curve ``y = v_k(x)`` conformally onto the upper half-plane, and the Cauchy
transform of ``nu_k`` satisfies ``G(H_k(z)) = 1/z`` there.  Inverting ``H_k``
numerically therefore gives an evaluator for ``G`` that does not rely on the
parametric density formula.
"""

import cmath
from dataclasses import dataclass, field, replace

from . import quad as _quad
from .errors import NonConvergenceError
from .levy import FreeTriplet, LevyDensity, gamma_k, lemma_eta

__all__ = [
    "TransformContext",
    "h_transform",
    "h_and_deriv",
    "f_transform",
    "free_cumulant_transform",
    "voiculescu_transform",
    "invert_h",
    "cauchy_oracle",
]


def tightened(spec, rel_tol=1e-13, abs_tol=1e-15):
    """Copy of ``spec`` with tolerances at least as tight as the given ones."""
    return replace(spec, rel_tol=min(spec.rel_tol, rel_tol), abs_tol=min(spec.abs_tol, abs_tol))


@dataclass(frozen=True)
class TransformContext:
    """A density ``k`` bundled with its quadrature settings and cached ``gamma_k``.

    Parameters
    ----------
    k : LevyDensity
    quad : QuadSpec, optional
        Tolerances for plain transform evaluations.
    gamma : float, optional
        Precomputed ``gamma_k``; computed on construction when omitted.
    """

    k: LevyDensity
    quad: _quad.QuadSpec = field(default_factory=_quad.QuadSpec)
    gamma: float = None

    def __post_init__(self):
        if self.gamma is None:
            object.__setattr__(self, "gamma", gamma_k(self.k, tightened(self.quad)))

    @property
    def gamma_k(self):
        return self.gamma

    @property
    def precise(self):
        """Quadrature settings used by root finders, tighter than :attr:`quad`."""
        return tightened(self.quad)


def _check_upper(z):
    z = complex(z)
    if not z.imag > 0:
        raise ValueError("argument must lie in the open upper half-plane")
    return z


def h_transform(ctx, z, spec=None):
    """``H_k(z) = z + gamma_k + int |t| k(t)/(z-t) dt`` for ``Im z > 0``.

    Examples
    --------
    >>> from freesd.levy import SymExp
    >>> ctx = TransformContext(SymExp())
    >>> round(h_transform(ctx, 10j).imag, 6)
    9.810229
    """
    z = _check_upper(z)
    return z + ctx.gamma + _quad.cauchy_integral(ctx.k, z, spec or ctx.quad)


def h_and_deriv(ctx, z, spec=None):
    """``H_k(z)`` and ``H_k'(z) = 1 - int |t| k(t)/(z-t)^2 dt``."""
    z = _check_upper(z)
    c, c2 = _quad.cauchy_moments(ctx.k, z, spec or ctx.quad, deriv=True)
    return z + ctx.gamma + c, 1.0 - c2


def f_transform(ctx, x, y, spec=None):
    """``F_k(x+iy) = int |t| k(t)/((x-t)^2 + y^2) dt``.

    ``Im H_k(x+iy) = y (1 - F_k(x+iy))``, so ``F_k = 1`` marks the boundary of
    the region mapped into the upper half-plane.
    """
    return _quad.poisson_integral(ctx.k, x, y, spec or ctx.quad)


def free_cumulant_transform(triplet, w, spec=None, ctx=None):
    """Free cumulant transform ``C(w)`` of the law with free triplet ``(a, k, eta)``.

    Evaluated at ``Im w < 0`` as
    ``eta w + a w^2 + w (gamma_k + int |t| k(t)/(1/w - t) dt) - w eta_L``
    with ``eta_L = int_{-1}^{1} sign(t) k(t) dt``; for the triplet with
    ``a = 0`` and ``eta = eta_L`` this is ``w int sign(t) k(t)/(1-wt) dt``.

    Parameters
    ----------
    triplet : FreeTriplet
    w : complex
        ``Im w < 0``.
    spec : QuadSpec, optional
    ctx : TransformContext, optional
        Reused for ``gamma_k`` when given.

    Returns
    -------
    complex
    """
    w = complex(w)
    if not w.imag < 0:
        raise ValueError("free cumulant transform requires Im w < 0")
    if not isinstance(triplet, FreeTriplet):
        raise TypeError("triplet must be a FreeTriplet")
    spec = spec or _quad.DEFAULT_SPEC
    gam = ctx.gamma if ctx is not None else gamma_k(triplet.k, spec)
    eta_l = lemma_eta(triplet.k, spec)
    inner = gam + _quad.cauchy_integral(triplet.k, 1.0 / w, spec)
    return triplet.eta * w + triplet.a * w * w + w * inner - w * eta_l


def voiculescu_transform(triplet, z, spec=None):
    """``phi(z) = z C(1/z)`` for ``Im z > 0``."""
    z = _check_upper(z)
    return z * free_cumulant_transform(triplet, 1.0 / z, spec)


def _newton(ctx, zeta, z, spec, target, max_steps):
    h, dh = h_and_deriv(ctx, z, spec)
    res = abs(h - zeta)
    for _ in range(max_steps):
        if res <= target:
            return z, res, True
        if dh == 0 or not cmath.isfinite(dh):
            break
        step = (h - zeta) / dh
        lam = 1.0
        moved = False
        for _ in range(60):
            zn = z - lam * step
            if zn.imag > 0:
                hn, dhn = h_and_deriv(ctx, zn, spec)
                rn = abs(hn - zeta)
                if rn < res:
                    z, h, dh, res = zn, hn, dhn, rn
                    moved = True
                    break
            lam *= 0.5
        if not moved:
            break
    return z, res, res <= target


def invert_h(ctx, zeta, z0=None, tol=1e-9, max_steps=200):
    """Solve ``H_k(z) = zeta`` for ``z`` above the curve ``v_k``.

    Damped Newton from ``z0`` (default ``zeta``): each step is halved until
    the residual decreases and ``Im z`` stays positive.  If that stalls, the
    root is followed by continuation along the vertical path from
    ``Re zeta + i (Im zeta + L)`` down to ``zeta``, where the starting point is
    high enough that ``H_k(z)`` is close to ``z + gamma_k``.

    Returns
    -------
    z : complex
    residual : float
        ``|H_k(z) - zeta|``.

    Raises
    ------
    NonConvergenceError
        The residual is above ``tol * max(1, |zeta|)`` after the allotted
        steps; typically ``zeta`` is too close to the real axis.
    """
    zeta = _check_upper(zeta)
    spec = ctx.precise
    scale = max(1.0, abs(zeta))
    goal = 1e-13 * scale
    accept = tol * scale
    start = zeta if z0 is None else complex(z0)
    if not start.imag > 0:
        start = complex(start.real, abs(start.imag) or zeta.imag)
    z, res, ok = _newton(ctx, zeta, start, spec, goal, max_steps)
    if res <= accept:
        return z, res
    # continuation from far above
    best = (z, res)
    lift = 10.0 * scale
    z = zeta + 1j * lift - ctx.gamma
    for j in range(1, 61):
        h = lift * 2.0 ** (-j)
        target = zeta + 1j * h if h > 1e-3 * zeta.imag else zeta
        z, res, _ = _newton(ctx, target, z, spec, goal if target == zeta else 1e-10 * scale, 50)
        if target == zeta:
            break
    if res < best[1]:
        best = (z, res)
    z, res = best
    if res > accept:
        raise NonConvergenceError(
            f"H_k(z) = {zeta} not solved: residual {res:.3e}", estimate=res
        )
    return z, res


def cauchy_oracle(ctx, zeta, z0=None, tol=1e-9):
    """``G_{nu_k}(zeta) = 1/z`` where ``H_k(z) = zeta``.

    Parameters
    ----------
    ctx : TransformContext
    zeta : complex
        ``Im zeta > 0``.
    z0 : complex, optional
        Newton starting point; a nearby solution speeds up sweeps.
    tol : float
        Accepted residual ``|H_k(z) - zeta| / max(1, |zeta|)``.

    Returns
    -------
    complex
        Value with negative imaginary part.
    """
    z, _ = invert_h(ctx, zeta, z0=z0, tol=tol)
    return 1.0 / z

