"""Lévy density factors ``k`` for freely selfdecomposable laws.

A freely selfdecomposable law has free Lévy measure ``k(t)/|t| dt`` with ``k``
increasing on ``(-inf, 0)`` and decreasing on ``(0, inf)``.  This module holds
the concrete families of ``k`` used throughout the package, the structural
checks on them, and the conversions between the free characteristic triplet
``(a, k, eta)`` and the free generating pair ``(gamma, sigma)``.

Every density is an immutable value object.  Evaluators are vectorised over
numpy arrays and must not be called at ``t = 0``.
"""

import functools
import math
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np
from scipy import special

from .errors import DivergentIntegralError
from .report import ValidationReport

__all__ = [
    "LevyDensity",
    "SymExp",
    "GaussScaled",
    "HalfExp",
    "Table",
    "Sum",
    "CauchyType",
    "FreeTriplet",
    "GeneratingPair",
    "make_family",
    "default_grid",
    "validate_conditions",
    "gamma_k",
    "lemma_eta",
    "drift_correction",
    "triplet_to_pair",
    "pair_to_triplet",
    "sd_residual_nonneg",
    "levy_measure_integral",
]


def _ret(t, val):
    """Return a python float for scalar input, an array otherwise."""
    if np.ndim(t) == 0:
        return float(val)
    return val


def _log_upper_gamma(s, x):
    """log of the upper incomplete gamma function Gamma(s, x)."""
    q = special.gammaincc(s, x)
    if q <= 0.0:
        return -math.inf
    return math.log(q) + special.gammaln(s)


class LevyDensity:
    """Base class for a Lévy density factor ``k`` on ``R \\ {0}``.

    Subclasses implement :meth:`_value`, :meth:`_deriv` and
    :meth:`tail_bound`; everything else has a generic fallback.
    """

    family: ClassVar[str] = ""
    #: ``True`` when the second derivative has a closed form.
    has_deriv2: ClassVar[bool] = False
    #: ``True`` when ``|t| k(t)`` is not integrable (only usable as a mollifier base).
    heavy_tailed: ClassVar[bool] = False

    # -- evaluation -------------------------------------------------------

    def __call__(self, t):
        return self.value(t)

    def value(self, t):
        t = np.asarray(t, dtype=float)
        return _ret(t, self._value(t))

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        return _ret(t, self._deriv(t))

    def deriv2(self, t):
        if not self.has_deriv2:
            raise NotImplementedError(f"{self.family} has no closed-form second derivative")
        t = np.asarray(t, dtype=float)
        return _ret(t, self._deriv2(t))

    def log_value(self, t):
        """``log k(t)``, finite wherever ``k(t) > 0`` even if ``k(t)`` underflows."""
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return _ret(t, self._log_value(t))

    def signed(self, t):
        """The signed factor ``sign(t) k(t)``."""
        t = np.asarray(t, dtype=float)
        return _ret(t, np.sign(t) * self._value(t))

    def _log_value(self, t):
        return np.log(self._value(t))

    def _deriv2(self, t):
        raise NotImplementedError

    # -- metadata ---------------------------------------------------------

    @property
    def params(self):
        return {}

    @property
    def support_hint(self):
        """Closure of the set where ``k`` is meant to be positive."""
        return (-math.inf, math.inf)

    def breakpoints(self):
        """Points of ``R \\ {0}`` where ``k`` is not smooth or changes scale."""
        return ()

    def tail_bound(self, T, m=1, side=1):
        """Upper bound for ``int_T^inf t^m k(side * t) dt`` (``T > 0``)."""
        raise NotImplementedError

    def dilate(self, c):
        """The density ``t -> k(t / c)`` of the Lévy measure pushed forward by ``x -> c x``."""
        raise NotImplementedError

    def cutoff(self, tol, m=1):
        """Truncation radii ``(T_neg, T_pos)`` with tail moments of order ``m`` below ``tol``."""
        return _cutoff(self, float(tol), int(m))

    def describe(self):
        return {"family": self.family, "params": self.params}


@functools.lru_cache(maxsize=4096)
def _cutoff(k, tol, m):
    out = []
    for side in (-1, 1):
        pts = [abs(b) for b in k.breakpoints() if side * b > 0]
        T = max([1.0] + pts)
        tail = k.tail_bound(T, m, side)
        if not math.isfinite(tail):
            raise DivergentIntegralError(
                f"tail moment of order {m} of {k.family} density is infinite", order=m
            )
        if tail > tol:
            lo = T
            while tail > tol:
                lo, T = T, 2.0 * T
                if T > 1e12:
                    raise DivergentIntegralError(
                        f"tail moment of order {m} does not decay", order=m
                    )
                tail = k.tail_bound(T, m, side)
            hi = T
            for _ in range(40):
                mid = 0.5 * (lo + hi)
                if k.tail_bound(mid, m, side) > tol:
                    lo = mid
                else:
                    hi = mid
                if hi - lo < 1e-3 * hi:
                    break
            T = hi
        out.append(T)
    return tuple(out)


# ---------------------------------------------------------------------------
# Built-in families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SymExp(LevyDensity):
    """``k(t) = lam * exp(-|t| / scale)``."""

    lam: float = 1.0
    scale: float = 1.0
    family: ClassVar[str] = "symexp"
    has_deriv2: ClassVar[bool] = True

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("symexp: lambda must be >= 0")
        if self.scale <= 0:
            raise ValueError("symexp: scale must be > 0")

    def _value(self, t):
        return self.lam * np.exp(-np.abs(t) / self.scale)

    def _deriv(self, t):
        return -np.sign(t) * self.lam / self.scale * np.exp(-np.abs(t) / self.scale)

    def _deriv2(self, t):
        return self.lam / self.scale**2 * np.exp(-np.abs(t) / self.scale)

    def _log_value(self, t):
        return np.log(self.lam) - np.abs(t) / self.scale

    @property
    def params(self):
        return {"lambda": self.lam, "scale": self.scale}

    def tail_bound(self, T, m=1, side=1):
        if self.lam == 0:
            return 0.0
        s = self.scale
        return math.exp(
            math.log(self.lam) + (m + 1) * math.log(s) + _log_upper_gamma(m + 1, T / s)
        )

    def dilate(self, c):
        return SymExp(self.lam, self.scale * c)


@dataclass(frozen=True)
class GaussScaled(LevyDensity):
    """``k(t) = a n^2 exp(-(n t)^2)``, the Gaussian part of the mollifier."""

    a: float = 1.0
    n: float = 1.0
    family: ClassVar[str] = "gauss-scaled"
    has_deriv2: ClassVar[bool] = True

    def __post_init__(self):
        if self.a < 0:
            raise ValueError("gauss-scaled: a must be >= 0")
        if self.n <= 0:
            raise ValueError("gauss-scaled: n must be > 0")

    def _value(self, t):
        return self.a * self.n**2 * np.exp(-((self.n * t) ** 2))

    def _deriv(self, t):
        n = self.n
        return -2.0 * self.a * n**4 * t * np.exp(-((n * t) ** 2))

    def _deriv2(self, t):
        n = self.n
        return self.a * n**2 * np.exp(-((n * t) ** 2)) * (4 * n**4 * t**2 - 2 * n**2)

    def _log_value(self, t):
        return np.log(self.a * self.n**2) - (self.n * t) ** 2

    @property
    def params(self):
        return {"a": self.a, "n": self.n}

    def breakpoints(self):
        n = self.n
        return (-4 / n, -2 / n, -1 / n, 1 / n, 2 / n, 4 / n)

    def tail_bound(self, T, m=1, side=1):
        if self.a == 0:
            return 0.0
        n = self.n
        s = 0.5 * (m + 1)
        return math.exp(
            math.log(0.5 * self.a) + (1 - m) * math.log(n) + _log_upper_gamma(s, (n * T) ** 2)
        )

    def dilate(self, c):
        return GaussScaled(self.a * c * c, self.n / c)


@dataclass(frozen=True)
class HalfExp(LevyDensity):
    """``k(t) = lam exp(-t/scale) 1_{t>0} + epsilon exp(-(t/scale)^2)``.

    A one-sided exponential with a Gaussian floor that restores strict
    positivity on the negative half-line.
    """

    lam: float = 1.0
    epsilon: float = 1e-8
    scale: float = 1.0
    family: ClassVar[str] = "half-exp"
    has_deriv2: ClassVar[bool] = True

    def __post_init__(self):
        if self.lam < 0 or self.epsilon < 0:
            raise ValueError("half-exp: lambda and epsilon must be >= 0")
        if self.scale <= 0:
            raise ValueError("half-exp: scale must be > 0")

    def _value(self, t):
        s = self.scale
        pos = np.where(t > 0, self.lam * np.exp(-np.abs(t) / s), 0.0)
        return pos + self.epsilon * np.exp(-((t / s) ** 2))

    def _deriv(self, t):
        s = self.scale
        pos = np.where(t > 0, -self.lam / s * np.exp(-np.abs(t) / s), 0.0)
        return pos - 2.0 * self.epsilon * t / s**2 * np.exp(-((t / s) ** 2))

    def _deriv2(self, t):
        s = self.scale
        u = t / s
        pos = np.where(t > 0, self.lam / s**2 * np.exp(-np.abs(t) / s), 0.0)
        return pos + self.epsilon / s**2 * (4 * u**2 - 2) * np.exp(-(u**2))

    def _log_value(self, t):
        s = self.scale
        lpos = np.where(t > 0, np.log(self.lam) - np.abs(t) / s, -np.inf)
        lfloor = np.log(self.epsilon) - (t / s) ** 2
        return np.logaddexp(lpos, lfloor)

    @property
    def params(self):
        return {"lambda": self.lam, "epsilon": self.epsilon, "scale": self.scale}

    @property
    def support_hint(self):
        if self.epsilon > 0:
            return (-math.inf, math.inf)
        return (0.0, math.inf)

    def tail_bound(self, T, m=1, side=1):
        s = self.scale
        total = 0.0
        if side > 0 and self.lam > 0:
            total += math.exp(
                math.log(self.lam) + (m + 1) * math.log(s) + _log_upper_gamma(m + 1, T / s)
            )
        if self.epsilon > 0:
            total += math.exp(
                math.log(0.5 * self.epsilon)
                + (m + 1) * math.log(s)
                + _log_upper_gamma(0.5 * (m + 1), (T / s) ** 2)
            )
        return total

    def dilate(self, c):
        return HalfExp(self.lam, self.epsilon, self.scale * c)


@dataclass(frozen=True)
class Table(LevyDensity):
    """Piecewise-linear ``k`` through tabulated knots.

    Each half-line is interpolated separately in ``|t|``: constant between 0
    and the innermost knot, linear between knots, and continued past the
    outermost knot by an exponential matching the last segment in value and
    slope.  A half-line without knots carries ``k = 0``.

    With ``strict=True`` (the default) tables that break the monotonicity of
    a selfdecomposable ``k`` are rejected; ``strict=False`` keeps them so the
    validation routines can locate the violation.
    """

    knots: tuple
    values: tuple
    strict: bool = True
    family: ClassVar[str] = "table"

    def __post_init__(self):
        t = np.asarray(self.knots, dtype=float)
        k = np.asarray(self.values, dtype=float)
        if t.shape != k.shape or t.ndim != 1 or t.size == 0:
            raise ValueError("table: knots and values must be equal-length 1-d sequences")
        if np.any(t == 0) or np.any(~np.isfinite(t)):
            raise ValueError("table: knots must be finite and nonzero")
        if np.any(k < 0) or np.any(~np.isfinite(k)):
            raise ValueError("table: values must be finite and >= 0")
        order = np.argsort(t)
        t, k = t[order], k[order]
        if np.any(np.diff(t) == 0):
            raise ValueError("table: duplicate knots")
        object.__setattr__(self, "knots", tuple(t.tolist()))
        object.__setattr__(self, "values", tuple(k.tolist()))
        sides = {}
        for side in (-1, 1):
            m = side * t > 0
            a = np.abs(t[m])
            v = k[m]
            if side < 0:
                a, v = a[::-1], v[::-1]
            if a.size == 0:
                sides[side] = None
                continue
            if a.size == 1:
                raise ValueError("table: each populated half-line needs at least two knots")
            if self.strict and np.any(np.diff(v) > 0):
                bad = a[1:][np.diff(v) > 0][0] * side
                raise ValueError(f"table: k is not monotone on its half-line (near t={bad:g})")
            slope = (v[-1] - v[-2]) / (a[-1] - a[-2])
            if v[-1] <= 0 or slope >= 0:
                raise ValueError("table: the outermost segment must decrease to a positive value")
            beta = -slope / v[-1]
            sides[side] = (a, v, beta)
        object.__setattr__(self, "_sides", sides)

    def _side_eval(self, side, a_abs, what):
        spec = self._sides[side]
        if spec is None:
            if what == "log":
                return np.full_like(a_abs, -np.inf)
            return np.zeros_like(a_abs)
        a, v, beta = spec
        tail = a_abs > a[-1]
        if what == "value":
            out = np.interp(a_abs, a, v)
            out[tail] = v[-1] * np.exp(-beta * (a_abs[tail] - a[-1]))
        elif what == "log":
            with np.errstate(divide="ignore"):
                out = np.log(np.interp(a_abs, a, v))
            out[tail] = np.log(v[-1]) - beta * (a_abs[tail] - a[-1])
        else:
            slopes = np.diff(v) / np.diff(a)
            idx = np.clip(np.searchsorted(a, a_abs, side="right") - 1, 0, a.size - 2)
            out = np.where(a_abs < a[0], 0.0, slopes[idx])
            out[tail] = -beta * v[-1] * np.exp(-beta * (a_abs[tail] - a[-1]))
        return out

    def _eval(self, t, what):
        t = np.atleast_1d(t)
        out = np.empty_like(t)
        for side in (-1, 1):
            m = side * t > 0 if side > 0 else t <= 0
            val = self._side_eval(side, np.abs(t[m]), what)
            if what == "deriv":
                val = side * val
            out[m] = val
        return out

    def _value(self, t):
        return self._eval(t, "value").reshape(np.shape(t))

    def _deriv(self, t):
        return self._eval(t, "deriv").reshape(np.shape(t))

    def _log_value(self, t):
        return self._eval(t, "log").reshape(np.shape(t))

    @property
    def params(self):
        return {"knots": list(self.knots), "values": list(self.values)}

    @property
    def support_hint(self):
        lo = -math.inf if self._sides[-1] is not None else 0.0
        hi = math.inf if self._sides[1] is not None else 0.0
        return (lo, hi)

    def breakpoints(self):
        return self.knots

    def tail_bound(self, T, m=1, side=1):
        spec = self._sides[side]
        if spec is None:
            return 0.0
        a, v, beta = spec
        T0 = max(T, a[-1])
        logt = (
            math.log(v[-1])
            + beta * a[-1]
            - (m + 1) * math.log(beta)
            + _log_upper_gamma(m + 1, beta * T0)
        )
        total = math.exp(logt) if logt > -745 else 0.0
        if T < a[-1]:
            total += v.max() * (a[-1] ** (m + 1) - T ** (m + 1)) / (m + 1)
        return total

    def dilate(self, c):
        return Table(tuple(c * np.asarray(self.knots)), self.values, self.strict)


@dataclass(frozen=True)
class Sum(LevyDensity):
    """Nonnegative linear combination ``sum_i w_i k_i``."""

    terms: tuple
    weights: tuple = None
    family: ClassVar[str] = "sum"

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise ValueError("sum: at least one term required")
        w = self.weights
        w = (1.0,) * len(terms) if w is None else tuple(float(x) for x in w)
        if len(w) != len(terms) or any(x < 0 for x in w):
            raise ValueError("sum: weights must be nonnegative, one per term")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "weights", w)

    @property
    def has_deriv2(self):
        return all(k.has_deriv2 for k in self.terms)

    @property
    def heavy_tailed(self):
        return any(k.heavy_tailed for k in self.terms)

    def _value(self, t):
        return sum(w * k._value(t) for w, k in zip(self.weights, self.terms))

    def _deriv(self, t):
        return sum(w * k._deriv(t) for w, k in zip(self.weights, self.terms))

    def _deriv2(self, t):
        return sum(w * k._deriv2(t) for w, k in zip(self.weights, self.terms))

    def _log_value(self, t):
        with np.errstate(divide="ignore"):
            logs = [np.log(w) + k._log_value(t) for w, k in zip(self.weights, self.terms)]
        return special.logsumexp(np.stack(logs), axis=0)

    @property
    def params(self):
        return {"terms": [k.describe() for k in self.terms], "weights": list(self.weights)}

    @property
    def support_hint(self):
        hints = [k.support_hint for k in self.terms]
        return (min(h[0] for h in hints), max(h[1] for h in hints))

    def breakpoints(self):
        return tuple(sorted(set(b for k in self.terms for b in k.breakpoints())))

    def tail_bound(self, T, m=1, side=1):
        return sum(w * k.tail_bound(T, m, side) for w, k in zip(self.weights, self.terms))

    def dilate(self, c):
        return Sum(tuple(k.dilate(c) for k in self.terms), self.weights)


@dataclass(frozen=True)
class CauchyType(LevyDensity):
    """``k(t) = scale / (pi |t|)``: the Lévy density factor of the Cauchy law.

    Violates the integrability conditions at both 0 and infinity; it is only
    meant as the base of :func:`freesd.mollify.mollify_k`.
    """

    scale: float = 1.0
    family: ClassVar[str] = "cauchy"
    heavy_tailed: ClassVar[bool] = True
    has_deriv2: ClassVar[bool] = True

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("cauchy: scale must be > 0")

    def _value(self, t):
        with np.errstate(divide="ignore"):
            return self.scale / (np.pi * np.abs(t))

    def _deriv(self, t):
        with np.errstate(divide="ignore"):
            return -np.sign(t) * self.scale / (np.pi * t * t)

    def _deriv2(self, t):
        with np.errstate(divide="ignore"):
            return 2 * self.scale / (np.pi * np.abs(t) ** 3)

    def _log_value(self, t):
        return np.log(self.scale / np.pi) - np.log(np.abs(t))

    @property
    def params(self):
        return {"scale": self.scale}

    def tail_bound(self, T, m=1, side=1):
        return math.inf

    def dilate(self, c):
        return CauchyType(self.scale * c)


_FAMILIES = {
    "symexp": (SymExp, {"lambda": "lam", "lam": "lam", "scale": "scale"}),
    "gauss-scaled": (GaussScaled, {"a": "a", "n": "n"}),
    "half-exp": (HalfExp, {"lambda": "lam", "lam": "lam", "epsilon": "epsilon", "scale": "scale"}),
    "table": (Table, {"knots": "knots", "values": "values", "strict": "strict"}),
    "cauchy": (CauchyType, {"scale": "scale"}),
}


def make_family(family, params=None, **kwargs):
    """Build a :class:`LevyDensity` from a family tag and a parameter map.

    Parameters
    ----------
    family : str
        One of ``symexp``, ``gauss-scaled``, ``half-exp``, ``table``,
        ``cauchy`` (mollifier base only), ``sum`` or ``mollified``.
    params : mapping, optional
        Family parameters; keyword arguments are merged on top.

    Returns
    -------
    LevyDensity

    Raises
    ------
    ValueError
        Unknown family tag, unknown parameter name, parameter out of range,
        or a non-monotone table.

    Examples
    --------
    >>> k = make_family("symexp", {"lambda": 1})
    >>> round(k(0.5), 6)
    0.606531
    """
    p = dict(params or {})
    p.update(kwargs)
    if family == "sum":
        terms = tuple(
            t if isinstance(t, LevyDensity) else make_family(t["family"], t.get("params"))
            for t in p.pop("terms")
        )
        weights = p.pop("weights", None)
        if p:
            raise ValueError(f"sum: unknown parameters {sorted(p)}")
        return Sum(terms, None if weights is None else tuple(weights))
    if family == "mollified":
        from .mollify import mollify_k

        base = p.pop("base")
        if not isinstance(base, LevyDensity):
            base = make_family(base["family"], base.get("params"))
        return mollify_k(base, **p)
    if family not in _FAMILIES:
        raise ValueError(f"unknown Lévy density family {family!r}")
    cls, names = _FAMILIES[family]
    kw = {}
    for key, val in p.items():
        if key not in names:
            raise ValueError(f"{family}: unknown parameter {key!r}")
        if key in ("knots", "values"):
            val = tuple(float(x) for x in val)
        elif key != "strict":
            val = float(val)
        kw[names[key]] = val
    return cls(**kw)


# ---------------------------------------------------------------------------
# Structural checks
# ---------------------------------------------------------------------------


def default_grid(t_min=1e-6, t_max=1e3, n=400):
    """Symmetric log-spaced grid ``+-[t_min, t_max]`` with ``n`` points per side."""
    pos = np.geomspace(t_min, t_max, n)
    return np.concatenate([-pos[::-1], pos])


def _check_grid(grid):
    g = np.sort(np.asarray(grid, dtype=float).ravel())
    if g.size == 0:
        raise ValueError("grid is empty")
    if np.any(g == 0):
        raise ValueError("grid must exclude 0")
    pos = g[g > 0]
    neg = -g[g < 0][::-1]
    if pos.size != neg.size or not np.allclose(pos, neg, rtol=1e-12, atol=0):
        raise ValueError("grid must be symmetric about 0")
    return g, pos


def validate_conditions(k, grid=None, bound=1e15):
    """Check the regularity, monotonicity and positivity conditions on ``k``.

    Failures are report entries, never exceptions.  Condition (a) is checked
    through the weighted sup-norms ``(1+t^2)^m |k^(n)(t)|``, ``m, n`` in
    ``{0, 1, 2}`` (``n = 2`` only where ``k''`` is available in closed form):
    they must be finite, below ``bound``, and must not grow when the grid is
    extended one decade towards 0 and towards infinity.
    """
    g, pos = _check_grid(default_grid() if grid is None else grid)
    rep = ValidationReport()

    ext = np.concatenate([[-pos[-1] * 10, -pos[0] / 10], g, [pos[0] / 10, pos[-1] * 10]])
    derivs = [("k", k.value), ("k'", k.deriv)]
    if k.has_deriv2:
        derivs.append(("k''", k.deriv2))
    worst = 0.0
    ok = True
    where = None
    with np.errstate(all="ignore"):
        for name, fn in derivs:
            for m in (0, 1, 2):
                on = (1 + g * g) ** m * np.abs(fn(g))
                off = (1 + ext * ext) ** m * np.abs(fn(ext))
                sup_on = np.max(on)
                sup_off = np.max(off)
                if not np.isfinite(sup_on) or sup_on > bound or sup_off > sup_on * (1 + 1e-3) + 1e-300:
                    ok = False
                    where = where or f"(1+t^2)^{m}|{name}|"
                worst = max(worst, sup_off if np.isfinite(sup_off) else math.inf)
    rep.add("a_bounded", ok, worst, first_growing=where, order=2 if k.has_deriv2 else 1)

    # (b) monotone per half-line, walking outward from 0
    vals = np.asarray(k.value(g))
    viol = 0.0
    bad_t = None
    for side in (-1, 1):
        idx = np.nonzero(side * g > 0)[0]
        idx = idx[np.argsort(np.abs(g[idx]))]
        v = vals[idx]
        inc = np.diff(v) - 1e-10 * np.maximum(v[:-1], v[1:])
        if np.any(inc > 0):
            j = int(np.argmax(inc))
            if inc[j] > viol:
                viol = float(np.diff(v)[j])
                bad_t = float(g[idx][j + 1])
    rep.add("b_monotone", bad_t is None, viol, offending_t=bad_t)

    # (c) strict positivity, checked in log space to survive underflow
    logs = np.asarray(k.log_value(g))
    bad = ~np.isfinite(logs)
    rep.add(
        "c_positive",
        not np.any(bad),
        float(np.sum(bad)),
        offending_t=float(g[bad][0]) if np.any(bad) else None,
        negative_side_ok=bool(np.all(~bad[g < 0])),
        positive_side_ok=bool(np.all(~bad[g > 0])),
    )
    return rep


def levy_measure_integral(k, grid=None):
    """Log-grid trapezoid estimate of ``int min(1, t^2) k(t)/|t| dt``."""
    g = default_grid(1e-8, 1e4, 600) if grid is None else np.asarray(grid, dtype=float)
    total = 0.0
    for side in (-1, 1):
        t = np.sort(np.abs(g[side * g > 0]))
        with np.errstate(all="ignore"):
            # d t = t d(log t)
            f = np.minimum(1.0, t * t) * np.asarray(k.value(side * t))
        total += np.trapezoid(f, np.log(t))
    return float(total)


def sd_residual_nonneg(k, c, grid=None, tol=1e-12):
    """Check ``k(t) - k(t/c) >= -tol`` on the grid, for a given ``0 < c < 1``.

    Nonnegativity is exactly the condition that the cofactor of the
    selfdecomposition at ratio ``c`` has a genuine Lévy density
    ``(k(t) - k(t/c)) / |t|``.
    """
    if not 0 < c < 1:
        raise ValueError("c must lie in (0, 1)")
    g, _ = _check_grid(default_grid() if grid is None else grid)
    with np.errstate(all="ignore"):
        r = np.asarray(k.value(g)) - np.asarray(k.value(g / c))
    rep = ValidationReport()
    j = int(np.argmin(r))
    rep.add(
        f"sd_residual_c={c:g}",
        bool(r[j] >= -tol),
        float(r[j]),
        offending_t=None if r[j] >= -tol else float(g[j]),
    )
    return rep


# ---------------------------------------------------------------------------
# Integrals of k and representation changes
# ---------------------------------------------------------------------------


def gamma_k(k, spec=None):
    """``gamma_k = int sign(t) k(t) dt`` over the whole line."""
    from .quad import weighted_integral

    return weighted_integral(k, np.sign, -math.inf, math.inf, spec=spec, moment=0)


def lemma_eta(k, spec=None):
    """The drift ``int_{-1}^{1} sign(t) k(t) dt`` of the measure ``nu_k``."""
    from .quad import weighted_integral

    if isinstance(k, CauchyType):
        # symmetric and not integrable at 0: the principal value is 0
        return 0.0
    return weighted_integral(k, np.sign, -1.0, 1.0, spec=spec, moment=0)


def drift_correction(k, spec=None):
    """``eta - gamma = int t (1_{[-1,1]}(t) - 1/(1+t^2)) k(t)/|t| dt``."""
    from .quad import sigma_integral

    def h(t):
        inner = np.abs(t) <= 1
        with np.errstate(divide="ignore"):
            return np.where(inner, t, -1.0 / t)

    return sigma_integral(k, h, spec=spec, breaks=(-1.0, 1.0))


@dataclass(frozen=True)
class FreeTriplet:
    """Free characteristic triplet ``(a, k(t)/|t| dt, eta)``."""

    a: float
    k: LevyDensity
    eta: float

    def __post_init__(self):
        if not self.a >= 0:
            raise ValueError("Gaussian coefficient a must be >= 0")
        if not math.isfinite(self.eta):
            raise ValueError("drift eta must be finite")
        if not math.isfinite(levy_measure_integral(self.k)):
            raise ValueError("k(t)/|t| dt is not a Lévy measure")

    @classmethod
    def lemma(cls, k, a=0.0, spec=None):
        """The triplet ``(a, k, int_{-1}^1 sign(t) k(t) dt)`` used for ``nu_k``."""
        return cls(a, k, lemma_eta(k, spec))


@dataclass(frozen=True)
class GeneratingPair:
    """Free generating pair ``(gamma, sigma)``.

    ``sigma = sigma_atom * delta_0 + |t| k(t)/(1+t^2) dt``; the pair keeps
    ``k`` itself so that the absolutely continuous part can be evaluated.
    """

    gamma: float
    sigma_atom: float
    k: LevyDensity = field(repr=False)

    def __post_init__(self):
        if not self.sigma_atom >= 0:
            raise ValueError("sigma({0}) must be >= 0")

    def sigma_density(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            val = np.where(t == 0, 0.0, np.abs(t) * self.k._value(t) / (1 + t * t))
        return _ret(t, val)

    def sigma_mass(self, spec=None):
        from .quad import sigma_integral

        return self.sigma_atom + sigma_integral(self.k, np.ones_like, spec=spec)


def triplet_to_pair(triplet, spec=None):
    corr = drift_correction(triplet.k, spec)
    return GeneratingPair(triplet.eta - corr, triplet.a, triplet.k)


def pair_to_triplet(pair, spec=None):
    corr = drift_correction(pair.k, spec)
    return FreeTriplet(pair.sigma_atom, pair.k, pair.gamma + corr)
