"""Free cumulants of ``nu`` from its triplet, and moments from free cumulants.

Expanding ``1/(1 - wt) - 1`` in the free cumulant transform gives

* ``kappa_1 = eta + int_{|t|>1} sign(t) k(t) dt``,
* ``kappa_2 = a + int |t| k(t) dt``,
* ``kappa_m = int t^(m-1) sign(t) k(t) dt`` for ``m >= 3``.

For the triplet with ``eta = int_{-1}^{1} sign(t) k(t) dt`` the first
cumulant collapses to ``gamma_k``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import quad as _quad
from .errors import DivergentIntegralError

__all__ = ["MAX_ORDER", "CumulantList", "cumulants_from_k", "moments_from_cumulants"]

MAX_ORDER = 12
_SPEC = _quad.QuadSpec(abs_tol=1e-13, rel_tol=1e-13)


@dataclass(frozen=True)
class CumulantList:
    """Free cumulants ``kappa_1..kappa_N``; ``kappa[0]`` is ``kappa_1``."""

    kappa: tuple
    source: object = field(default=None, repr=False, compare=False)

    def __len__(self):
        return len(self.kappa)

    def __iter__(self):
        return iter(self.kappa)

    def order(self, n):
        """``kappa_n`` (1-based)."""
        if not 1 <= n <= len(self.kappa):
            raise IndexError(f"cumulant order {n} outside 1..{len(self.kappa)}")
        return self.kappa[n - 1]


def cumulants_from_k(triplet, N, spec=None):
    """Free cumulants of the law with free triplet ``(a, k, eta)`` up to order ``N``.

    Parameters
    ----------
    triplet : FreeTriplet
    N : int
        ``1 <= N <= 12``.
    spec : QuadSpec, optional
        Defaults to absolute and relative tolerance ``1e-13``.

    Returns
    -------
    CumulantList

    Raises
    ------
    ValueError
        ``N`` out of range.
    DivergentIntegralError
        A moment ``int |t|^m k(t) dt`` is infinite; ``.order`` carries the
        first failing cumulant order.

    Examples
    --------
    >>> from freesd.levy import FreeTriplet, SymExp
    >>> c = cumulants_from_k(FreeTriplet.lemma(SymExp()), 4)
    >>> [round(x, 8) for x in c]
    [0.0, 2.0, 0.0, 12.0]
    """
    N = int(N)
    if not 1 <= N <= MAX_ORDER:
        raise ValueError(f"cumulant order must be between 1 and {MAX_ORDER}")
    spec = spec or _SPEC
    k = triplet.k
    out = []
    for m in range(1, N + 1):
        p = m - 1
        try:
            if m == 1:
                outside = _quad.weighted_integral(k, np.sign, -math.inf, -1.0, spec) + _quad.weighted_integral(
                    k, np.sign, 1.0, math.inf, spec
                )
                val = triplet.eta + outside
            else:

                def w(t, p=p):
                    return np.sign(t) * t**p

                val = _quad.weighted_integral(k, w, -math.inf, math.inf, spec, moment=p)
                if m == 2:
                    val += triplet.a
        except DivergentIntegralError as exc:
            raise DivergentIntegralError(
                f"free cumulant of order {m} is infinite for the {k.family} density", order=m
            ) from exc
        out.append(float(val))
    return CumulantList(tuple(out), triplet)


def moments_from_cumulants(kappa):
    """Moments ``m_1..m_N`` from free cumulants ``kappa_1..kappa_N``.

    Uses ``m_n = sum_{s=1}^{n} kappa_s [x^(n-s)] M(x)^s`` with
    ``M(x) = sum_j m_j x^j`` and ``m_0 = 1``, which sums over non-crossing
    partitions by the block containing 1.

    Examples
    --------
    >>> moments_from_cumulants([0, 1, 0, 0, 0, 0])
    [0.0, 1.0, 0.0, 2.0, 0.0, 5.0]
    """
    kap = [float(x) for x in kappa]
    N = len(kap)
    m = [1.0] + [0.0] * N
    for n in range(1, N + 1):
        # powers of the truncated series M(x) up to degree n - 1
        base = np.array(m[:n])
        power = np.zeros(n)
        power[0] = 1.0
        total = 0.0
        for s in range(1, n + 1):
            power = np.convolve(power, base)[:n]
            total += kap[s - 1] * power[n - s]
        m[n] = float(total)
    return m[1:]
