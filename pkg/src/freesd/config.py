"""JSON run configurations for the command-line interface.

Example
-------
::

    {
      "levy": {"family": "symexp", "params": {"lambda": 1}},
      "a": 0,
      "eta": "lemma",
      "epsilon_floor": 1e-8,
      "mollify": {"n": 64, "epsilon_floor": 1e-8},
      "grid": {"x_min": -12, "x_max": 12, "n_points": 512, "refine": true},
      "tolerances": {"solve_v": 1e-12, "quad_abs": 1e-11, "quad_rel": 1e-9, "mass": 1e-2}
    }

Only ``levy`` is required.  ``eta`` is a number or ``"lemma"`` (the drift
``int_{-1}^{1} sign(t) k(t) dt``, which makes the law exactly ``nu_k``).
"""

import json
import math
from dataclasses import dataclass, field

from .density import GridSpec
from .errors import ConfigError
from .levy import FreeTriplet, HalfExp, Sum, drift_correction, lemma_eta, make_family
from .mollify import mollify_k
from .quad import QuadSpec
from .transforms import TransformContext

__all__ = ["RunConfig", "load_config", "parse_config"]

_TOP = {"levy", "a", "eta", "epsilon_floor", "mollify", "grid", "tolerances", "order", "seed", "workers"}
_TOL_DEFAULTS = {"solve_v": 1e-12, "quad_abs": 1e-11, "quad_rel": 1e-9, "mass": 1e-2}


def _number(val, name, positive=False, nonneg=False):
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
        raise ConfigError(f"{name} must be a finite number")
    if positive and not val > 0:
        raise ConfigError(f"{name} must be > 0")
    if nonneg and not val >= 0:
        raise ConfigError(f"{name} must be >= 0")
    return float(val)


def _integer(val, name, lo=None, hi=None):
    if isinstance(val, bool) or not isinstance(val, (int, float)) or int(val) != val:
        raise ConfigError(f"{name} must be an integer")
    val = int(val)
    if lo is not None and val < lo or hi is not None and val > hi:
        raise ConfigError(f"{name} must lie in [{lo}, {hi}]")
    return val


@dataclass(frozen=True)
class RunConfig:
    levy: dict
    a: float = 0.0
    eta: object = "lemma"
    epsilon_floor: float = 1e-8
    mollify: dict = None
    grid: GridSpec = field(default_factory=GridSpec)
    tolerances: dict = field(default_factory=lambda: dict(_TOL_DEFAULTS))
    order: int = 4
    seed: int = 0
    workers: int = 1

    @property
    def quad(self):
        return QuadSpec(abs_tol=self.tolerances["quad_abs"], rel_tol=self.tolerances["quad_rel"])

    def base_k(self):
        """The configured ``k`` as given, without floor or mollification."""
        try:
            return make_family(self.levy["family"], self.levy.get("params"))
        except (ValueError, TypeError, KeyError) as exc:
            raise ConfigError(f"levy: {exc}") from exc

    def levy_k(self):
        """``k`` with the positivity floor added when it vanishes on a half-line."""
        k = self.base_k()
        lo, hi = k.support_hint
        if self.epsilon_floor > 0 and (lo == 0 or hi == 0):
            k = Sum((k, HalfExp(lam=0.0, epsilon=self.epsilon_floor)))
        return k

    def mollified(self, n=None):
        m = self.mollify or {}
        n = m.get("n") if n is None else n
        if n is None:
            raise ConfigError("mollify.n is required")
        eps = m.get("epsilon_floor", self.epsilon_floor)
        try:
            return mollify_k(self.base_k(), a=self.a, n=n, epsilon_floor=eps)
        except ValueError as exc:
            raise ConfigError(f"mollify: {exc}") from exc

    def n_list(self):
        m = self.mollify or {}
        if "n_list" in m:
            return list(m["n_list"])
        if "n" in m:
            return [m["n"]]
        return [8, 16, 32]

    def triplet(self):
        """The free triplet ``(a, k, eta)`` with the floored ``k``."""
        k = self.levy_k()
        eta = lemma_eta(k, self.quad) if self.eta == "lemma" else self.eta
        return FreeTriplet(self.a, k, eta)

    def target_gamma(self):
        """Drift ``gamma`` of the generating pair of the configured law."""
        k = self.base_k()
        eta = lemma_eta(k, self.quad) if self.eta == "lemma" else self.eta
        return eta - drift_correction(k, self.quad)

    def density_setup(self, n=None):
        """``(ctx, shift)`` for the density of the configured law.

        Without a ``mollify`` block the law is ``(0, k, eta)`` and ``a`` must
        vanish.  With one, ``k_n`` carries ``a`` and the drift is chosen so the
        generating pair keeps the drift ``gamma`` of the target.
        """
        if self.mollify is not None or n is not None:
            kn = self.mollified(n)
            ctx = TransformContext(kn, self.quad)
            eta_n = self.target_gamma() + drift_correction(kn, self.quad)
            return ctx, eta_n - lemma_eta(kn, self.quad)
        if self.a > 0:
            raise ConfigError("a > 0 needs a 'mollify' block: the density is computed for k_n")
        k = self.levy_k()
        if k.heavy_tailed:
            raise ConfigError(f"{k.family} density needs a 'mollify' block")
        ctx = TransformContext(k, self.quad)
        shift = 0.0 if self.eta == "lemma" else self.eta - lemma_eta(k, self.quad)
        return ctx, shift


def parse_config(data):
    """Validate a decoded JSON object and build a :class:`RunConfig`.

    Raises
    ------
    ConfigError
    """
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(data) - _TOP
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    levy = data.get("levy")
    if not isinstance(levy, dict) or "family" not in levy:
        raise ConfigError("levy.family is required")
    if set(levy) - {"family", "params"}:
        raise ConfigError(f"unknown levy keys: {sorted(set(levy) - {'family', 'params'})}")
    params = levy.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("levy.params must be an object")
    kw = {"levy": {"family": levy["family"], "params": params}}
    if "a" in data:
        kw["a"] = _number(data["a"], "a", nonneg=True)
    if "eta" in data:
        eta = data["eta"]
        kw["eta"] = "lemma" if eta == "lemma" else _number(eta, "eta")
    if "epsilon_floor" in data:
        kw["epsilon_floor"] = _number(data["epsilon_floor"], "epsilon_floor", nonneg=True)
    if data.get("mollify") is not None:
        m = data["mollify"]
        if not isinstance(m, dict) or set(m) - {"n", "epsilon_floor", "n_list"}:
            raise ConfigError("mollify accepts n, n_list and epsilon_floor")
        m = dict(m)
        if "n" in m:
            m["n"] = _integer(m["n"], "mollify.n", lo=1)
        if "n_list" in m:
            if not isinstance(m["n_list"], list) or not m["n_list"]:
                raise ConfigError("mollify.n_list must be a nonempty list")
            m["n_list"] = [_integer(n, "mollify.n_list", lo=1) for n in m["n_list"]]
        if "epsilon_floor" in m:
            m["epsilon_floor"] = _number(m["epsilon_floor"], "mollify.epsilon_floor", nonneg=True)
        kw["mollify"] = m
    if "grid" in data:
        g = data["grid"]
        if not isinstance(g, dict) or set(g) - {"x_min", "x_max", "n_points", "refine"}:
            raise ConfigError("grid accepts x_min, x_max, n_points and refine")
        try:
            kw["grid"] = GridSpec(
                None if g.get("x_min") is None else _number(g["x_min"], "grid.x_min"),
                None if g.get("x_max") is None else _number(g["x_max"], "grid.x_max"),
                _integer(g.get("n_points", 512), "grid.n_points", lo=16),
                bool(g.get("refine", True)),
            )
        except ValueError as exc:
            raise ConfigError(f"grid: {exc}") from exc
    tols = dict(_TOL_DEFAULTS)
    if "tolerances" in data:
        t = data["tolerances"]
        if not isinstance(t, dict) or set(t) - set(_TOL_DEFAULTS):
            raise ConfigError(f"tolerances accepts {sorted(_TOL_DEFAULTS)}")
        for key, val in t.items():
            tols[key] = _number(val, f"tolerances.{key}", positive=True)
    kw["tolerances"] = tols
    if "order" in data:
        kw["order"] = _integer(data["order"], "order")
    if "seed" in data:
        kw["seed"] = _integer(data["seed"], "seed", lo=0)
    if "workers" in data:
        kw["workers"] = _integer(data["workers"], "workers", lo=1)
    cfg = RunConfig(**kw)
    cfg.base_k()  # surface unknown families and bad parameters now
    return cfg


def load_config(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(data)
