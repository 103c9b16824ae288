"""Smooth, strictly positive approximations ``k_n`` of a monotone ``k``.

For ``t > 0``

    k_n(t) = a n^2 exp(-(n t)^2) + R_n(t) + epsilon exp(-t^2),
    R_n(t) = int_0^1 k_n^0(t + u/n) phi(-u) du,

where ``k_n^0`` equals ``k(1/n)`` on ``(0, 1/n)``, ``k`` on ``[1/n, n]`` and
0 beyond ``n``, and ``phi`` is a smooth bump supported in ``[-1, 0]``.  The
negative half-line is the mirror image built from ``tau -> k(-tau)``.  The
Gaussian term carries the semicircular coefficient ``a`` into the Lévy
measure: ``|t| a n^2 exp(-(nt)^2)`` has total mass ``a``.

The generating measures ``|t| k_n(t)/(1+t^2) dt`` converge weakly to
``a delta_0 + |t| k(t)/(1+t^2) dt``; :func:`sigma_distance` measures that on
cosine test functions.
"""

import functools
import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np
from scipy import integrate

from . import quad as _quad
from .levy import LevyDensity, _log_upper_gamma, validate_conditions

__all__ = ["MollifiedDensity", "mollify_k", "bump", "sigma_distance", "DEFAULT_FREQUENCIES"]

DEFAULT_FREQUENCIES = (0.0, 0.5, 1.0, 2.0, 4.0)
_NODES = 32


def _bump_raw(w):
    w = np.asarray(w, dtype=float)
    out = np.zeros_like(w)
    inside = np.abs(w) < 1
    out[inside] = np.exp(-1.0 / (1.0 - w[inside] ** 2))
    return out


@functools.lru_cache(maxsize=1)
def _bump_constant():
    # int_{-1}^{0} exp(-1/(1-(2s+1)^2)) ds = (1/2) int_{-1}^{1} exp(-1/(1-w^2)) dw
    val, _ = integrate.quad(lambda w: math.exp(-1.0 / (1.0 - w * w)), -1, 1, epsabs=0.0, epsrel=1e-13)
    return 2.0 / val


def bump(s):
    """The normalised bump ``phi(s) = C exp(-1/(1 - (2s+1)^2))`` on ``(-1, 0)``."""
    return _bump_constant() * _bump_raw(2.0 * np.asarray(s, dtype=float) + 1.0)


def bump_deriv(s):
    """``phi'(s) = -4 w phi(s) / (1 - w^2)^2`` with ``w = 2s + 1``."""
    s = np.asarray(s, dtype=float)
    w = 2.0 * s + 1.0
    out = np.zeros_like(w)
    inside = np.abs(w) < 1
    wi = w[inside]
    out[inside] = -4.0 * wi * bump(s[inside]) / (1.0 - wi * wi) ** 2
    return out


@functools.lru_cache(maxsize=1)
def _gl():
    return np.polynomial.legendre.leggauss(_NODES)


def _split_gl(ua, ub):
    """Two Gauss-Legendre panels on each ``[ua, ub]``: nodes and plain weights."""
    x, w = _gl()
    mid = 0.5 * (ua + ub)
    parts_u, parts_w = [], []
    for lo, hi in ((ua, mid), (mid, ub)):
        half = 0.5 * (hi - lo)
        parts_u.append(0.5 * (lo + hi)[..., None] + half[..., None] * x)
        parts_w.append(half[..., None] * w)
    return np.concatenate(parts_u, axis=-1), np.concatenate(parts_w, axis=-1)


@functools.lru_cache(maxsize=1)
def _rule():
    """Nodes in ``u`` and weights for ``int_0^1 g(u) phi(-u) du``.

    Two 32-point Gauss-Legendre panels split at ``u = 1/2``; the weights are
    rescaled so that constants are reproduced exactly.
    """
    u, w = _split_gl(np.array(0.0), np.array(1.0))
    wv = w * bump(-u)
    scale = wv.sum()
    return u, wv / scale, scale


def _piece_rule(ua, ub):
    """Rule on sub-intervals ``[ua, ub]`` of ``[0, 1]`` with bump weights."""
    _, _, scale = _rule()
    u, w = _split_gl(ua, ub)
    return u, w * bump(-u) / scale


@dataclass(frozen=True)
class MollifiedDensity(LevyDensity):
    """The density ``k_n`` built from ``base``.

    Parameters
    ----------
    base : LevyDensity
        Monotone on each half-line; may be non-integrable (``1/(pi |t|)``).
    a : float
        Semicircular coefficient absorbed by the Gaussian term.
    n : int
    epsilon_floor : float
        Weight of the positivity floor ``exp(-t^2)``.
    """

    base: LevyDensity
    a: float = 0.0
    n: int = 1
    epsilon_floor: float = 1e-8
    family: ClassVar[str] = "mollified"

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ValueError("mollified: n must be an integer >= 1")
        object.__setattr__(self, "n", int(self.n))
        if not self.a >= 0:
            raise ValueError("mollified: a must be >= 0")
        if not self.epsilon_floor >= 0:
            raise ValueError("mollified: epsilon_floor must be >= 0")

    # -- the convolution part ----------------------------------------------

    def _k0(self, s, side, deriv=False):
        """``k_n^0`` (or its derivative) of the side ``tau -> k(side * tau)``."""
        n = self.n
        inner = np.minimum(np.maximum(s, 1.0 / n), n)
        with np.errstate(divide="ignore", invalid="ignore"):
            if deriv:
                val = side * self.base._deriv(side * inner)
                return np.where((s < 1.0 / n) | (s > n), 0.0, val)
            val = self.base._value(side * inner)
        return np.where(s > n, 0.0, val)

    def _side_breaks(self, side):
        n = self.n
        pts = [1.0 / n, float(n)]
        pts += [abs(b) for b in self.base.breakpoints() if side * b > 0 and 1.0 / n < abs(b) < n]
        return np.unique(pts)

    def _conv(self, tau, side, deriv=False):
        """``R_n`` (or its derivative) at ``tau > 0`` for the given side.

        Windows ``[tau, tau + 1/n]`` that contain a kink or the cut at ``n``
        are split there.  The derivative integrates ``(k_n^0)'`` and adds the
        jump of ``k_n^0`` at ``n``.
        """
        n = self.n
        u, wv, _ = _rule()
        out = np.zeros_like(tau)
        live = tau < n
        tau_l = tau[live]
        if tau_l.size == 0:
            return out
        br = self._side_breaks(side)
        lo_idx = np.searchsorted(br, tau_l, side="right")
        hi_idx = np.searchsorted(br, tau_l + 1.0 / n, side="left")
        inside = hi_idx - lo_idx
        res = np.empty_like(tau_l)
        fast = inside == 0
        if np.any(fast):
            res[fast] = self._k0(tau_l[fast][:, None] + u / n, side, deriv) @ wv
        one = inside == 1
        if np.any(one):
            t1 = tau_l[one]
            ub = np.clip(n * (br[lo_idx[one]] - t1), 0.0, 1.0)
            total = np.zeros_like(t1)
            for a_, b_ in ((np.zeros_like(ub), ub), (ub, np.ones_like(ub))):
                uu, pv = _piece_rule(a_, b_)
                total += np.sum(self._k0(t1[:, None] + uu / n, side, deriv) * pv, axis=1)
            res[one] = total
        for j in np.nonzero(inside > 1)[0]:
            t1 = tau_l[j]
            cuts = np.concatenate([[0.0], n * (br[lo_idx[j] : hi_idx[j]] - t1), [1.0]])
            uu, pv = _piece_rule(cuts[:-1], cuts[1:])
            res[j] = np.sum(self._k0(t1 + uu / n, side, deriv) * pv)
        if deriv:
            cut = tau_l > n - 1.0 / n
            if np.any(cut):
                ustar = n * (n - tau_l[cut])
                kn_edge = float(self.base.value(side * float(n)))
                res[cut] -= n * kn_edge * bump(-ustar)
        out[live] = res
        return out

    def _halves(self, t, deriv=False):
        t = np.asarray(t, dtype=float)
        flat = np.atleast_1d(t).ravel()
        out = np.zeros_like(flat)
        pos = flat > 0
        neg = flat < 0
        if np.any(pos):
            out[pos] = self._conv(flat[pos], 1, deriv)
        if np.any(neg):
            r = self._conv(-flat[neg], -1, deriv)
            out[neg] = -r if deriv else r
        return out.reshape(t.shape)

    # -- LevyDensity interface ---------------------------------------------

    def _value(self, t):
        n = self.n
        g = self.a * n * n * np.exp(-((n * t) ** 2))
        fl = self.epsilon_floor * np.exp(-(t**2))
        return g + fl + self._halves(t)

    def _deriv(self, t):
        n = self.n
        g = -2.0 * self.a * n**4 * t * np.exp(-((n * t) ** 2))
        fl = -2.0 * self.epsilon_floor * t * np.exp(-(t**2))
        return g + fl + self._halves(t, deriv=True)

    def _log_value(self, t):
        n = self.n
        with np.errstate(divide="ignore"):
            lg = np.log(self.a * n * n) - (n * t) ** 2
            lf = np.log(self.epsilon_floor) - t**2
            lr = np.log(self._halves(t))
        return np.logaddexp(np.logaddexp(lg, lf), lr)

    @property
    def params(self):
        return {"base": self.base.describe(), "a": self.a, "n": self.n, "epsilon_floor": self.epsilon_floor}

    def breakpoints(self):
        n = self.n
        pts = {1.0 / n, 2.0 / n, 4.0 / n, n - 1.0 / n, float(n)}
        out = set()
        for p in pts:
            if p > 0:
                out.add(p)
                out.add(-p)
        for b in self.base.breakpoints():
            if 1.0 / n < abs(b) < n:
                out.add(b)
        return tuple(sorted(out))

    def tail_bound(self, T, m=1, side=1):
        n = self.n
        total = 0.0
        if self.a > 0:
            s = 0.5 * (m + 1)
            total += math.exp(math.log(0.5 * self.a) + (1 - m) * math.log(n) + _log_upper_gamma(s, (n * T) ** 2))
        if self.epsilon_floor > 0:
            total += math.exp(math.log(0.5 * self.epsilon_floor) + _log_upper_gamma(0.5 * (m + 1), T * T))
        if T < n:
            # R_n(t) <= k_n^0(t), which is decreasing in |t| and zero beyond n
            t0 = max(T, 1.0 / n)
            kmax = float(self.base.value(side * t0))
            crude = kmax * (n ** (m + 1) - T ** (m + 1)) / (m + 1)
            base_tail = self.base.tail_bound(t0, m, side)
            if T < 1.0 / n:
                base_tail += kmax * ((1.0 / n) ** (m + 1) - T ** (m + 1)) / (m + 1)
            total += min(crude, base_tail)
        return total


def mollify_k(base, a=0.0, n=1, epsilon_floor=1e-8):
    """Build :class:`MollifiedDensity` after checking that ``base`` is monotone.

    Raises
    ------
    ValueError
        ``n`` is not a positive integer, ``a < 0``, or ``base`` fails the
        monotonicity check on the default grid.

    Examples
    --------
    >>> from freesd.levy import SymExp
    >>> kn = mollify_k(SymExp(), n=8)
    >>> bool(SymExp()(2.125) <= kn(2.0) <= SymExp()(2.0) + 1e-8)
    True
    """
    if not isinstance(base, LevyDensity):
        raise TypeError("base must be a LevyDensity")
    rep = validate_conditions(base)
    mono = rep["b_monotone"]
    if not mono.passed:
        raise ValueError(f"mollify: base is not monotone (near t={mono.detail['offending_t']:g})")
    return MollifiedDensity(base, float(a), n, float(epsilon_floor))


def _sigma_of_base(base, s, g, spec):
    """``int g |t| k/(1+t^2) dt`` for the target measure."""
    if not base.heavy_tailed or s is None or s == 0:
        return _quad.sigma_integral(base, g, spec)
    # oscillatory integrals against a non-integrable base: split off the
    # tails and use a Fourier-weighted rule there
    L = 10.0
    total = 0.0
    for side in (-1, 1):

        def dens(t, side=side):
            # |t| k(t) stays bounded at 0 even where k does not
            t = max(t, 1e-300)
            return t * float(base.value(side * t)) / (1.0 + t * t)

        inner, _ = integrate.quad(dens, 0.0, L, weight="cos", wvar=s, epsabs=1e-13, epsrel=1e-10, limit=500)
        tail, _ = integrate.quad(dens, L, np.inf, weight="cos", wvar=s, epsabs=1e-13, limlst=200)
        total += inner + tail
    return total


def sigma_distance(kn, base=None, a=None, frequencies=DEFAULT_FREQUENCIES, test_fns=(), spec=None):
    """Distance between the generating measure of ``kn`` and its target.

    ``max_g |int g d sigma_n - (a g(0) + int g |t| k(t)/(1+t^2) dt)|`` over
    ``g(t) = cos(s t)`` for ``s`` in ``frequencies`` and over any extra
    bounded callables in ``test_fns``.

    Parameters
    ----------
    kn : LevyDensity
        Usually a :class:`MollifiedDensity`; its ``base`` and ``a`` are the
        defaults for the target.
    base : LevyDensity, optional
    a : float, optional

    Returns
    -------
    float
    """
    base = base if base is not None else kn.base
    a = a if a is not None else kn.a
    spec = spec or _quad.QuadSpec(abs_tol=1e-12, rel_tol=1e-11)
    tests = [(float(s), (lambda t, s=float(s): np.cos(s * t))) for s in frequencies]
    tests += [(None, g) for g in test_fns]
    worst = 0.0
    for s, g in tests:
        lhs = _quad.sigma_integral(kn, g, spec)
        rhs = a * float(g(np.zeros(1))[0]) + _sigma_of_base(base, s, g, spec)
        worst = max(worst, abs(lhs - rhs))
    return worst
