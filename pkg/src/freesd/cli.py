"""Command-line interface: ``freesd {density,verify,cumulants,mollify}``.

Exit status is 0 on success, 1 when a verification check fails, 2 for
configuration and validation errors and 3 for numerical failures.
"""

import argparse
import math
import os
import sys

import numpy as np
from scipy import optimize

from .config import load_config
from .cumulants import MAX_ORDER, cumulants_from_k, moments_from_cumulants
from .density import (
    build_density,
    cauchy_from_curve,
    check_cdf_shape,
    check_unimodal,
    crossvalidate,
    mode,
    write_csv,
)
from .errors import (
    ConfigError,
    DivergentIntegralError,
    MassDeficitError,
    MonotonicityError,
    NonConvergenceError,
)
from .levy import FreeTriplet, drift_correction, validate_conditions
from .mollify import sigma_distance
from .report import ValidationReport
from .transforms import cauchy_oracle, h_transform
from .vcurve import angular_minima, angular_profile, default_domain, solve_v

__all__ = ["main", "cmd_density", "cmd_verify", "cmd_cumulants", "cmd_mollify"]

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
GH_TOL = 1e-8
GH_SAMPLES = 200
RADII = (0.25, 0.5, 1.0, 2.0, 4.0)
N_ANGLES = 101
_NUMERIC = (NonConvergenceError, MassDeficitError, MonotonicityError, DivergentIntegralError, AssertionError)


def _fmt(x):
    return f"{x:.10g}"


def _density(cfg, n=None, workers=None):
    ctx, shift = cfg.density_setup(n)
    curve = build_density(
        ctx,
        cfg.grid,
        tol=cfg.tolerances["solve_v"],
        mass_tol=cfg.tolerances["mass"],
        shift=shift,
        workers=workers or cfg.workers,
    )
    return ctx, curve


# -- density -----------------------------------------------------------------


def cmd_density(cfg, out_path, workers=None, stream=None):
    stream = stream or sys.stdout
    ctx, curve = _density(cfg, workers=workers)
    if out_path:
        write_csv(curve, out_path)
    omega, fmax = mode(curve, ctx)
    print(f"mass={_fmt(curve.mass)} mode={_fmt(omega)} fmax={_fmt(fmax)}", file=stream)
    return EXIT_OK


# -- verify ------------------------------------------------------------------


def _sample_above(ctx, curve, rng, n):
    """``n`` points above the curve with ``Re z`` spread over the sampled range."""
    lo, hi = float(curve.x[0]), float(curve.x[-1])
    scale = float(np.max(curve.v))
    zs = []
    for x in rng.uniform(lo, hi, n):
        v = solve_v(ctx, x)
        zs.append(complex(x, v + scale * (0.05 + 2.0 * rng.uniform())))
    return np.array(zs)


def gh_checks(ctx, curve, seed=0, n=GH_SAMPLES, tol=GH_TOL):
    """``z G(H_k(z)) = 1`` above the curve, with ``G`` from two routes.

    ``gh_identity`` integrates the parametric density along the curve;
    ``gh_roundtrip`` inverts ``H_k`` from the image point.
    """
    rng = np.random.default_rng(seed)
    zs = _sample_above(ctx, curve, rng, n)
    hs = np.array([h_transform(ctx, z, ctx.precise) for z in zs])
    rep = ValidationReport()
    # the curve route needs the full mass; widen to the edge of negligible v
    lo, hi = default_domain(ctx, ratio=1e-14)
    lo, hi = min(lo, curve.x[0]), max(hi, curve.x[-1])
    g_curve = cauchy_from_curve(ctx, hs, lo, hi)
    r1 = np.abs(zs * g_curve - 1.0)
    rep.add("gh_identity", r1.max() <= tol, r1.max(), samples=n)
    r2 = []
    failed = 0
    for z, h in zip(zs, hs):
        try:
            r2.append(abs(z * cauchy_oracle(ctx, h) - 1.0))
        except NonConvergenceError:
            failed += 1
    worst = max(r2, default=math.inf)
    rep.add("gh_roundtrip", worst <= tol and failed == 0, worst, failed=failed)
    return rep


def angular_check(ctx, r, n=N_ANGLES):
    """One interior minimum of the angular profile, at an angle with ``|cos| < 1/sqrt 2``."""
    th = np.pi * np.arange(1, n + 1) / (n + 1)
    prof = angular_profile(ctx, r, th)
    count, j = angular_minima(prof)
    theta = th[j]
    if 0 < j < n - 1:
        res = optimize.minimize_scalar(
            lambda t: angular_profile(ctx, r, [t])[0],
            bounds=(th[j - 1], th[j + 1]),
            method="bounded",
            options={"xatol": 1e-10},
        )
        theta = float(res.x)
    c = math.cos(theta)
    bound = math.sqrt(0.5)
    rep = ValidationReport()
    rep.add(
        f"angular_r={r:g}",
        count == 1 and abs(c) < bound,
        max(abs(c) - bound, 0.0) + abs(count - 1),
        minima=count,
        extras={"theta_r": theta, "cos_theta_r": c},
    )
    return rep


def verify_report(cfg, ctx, curve, seed=0):
    rep = ValidationReport()
    rep.extend(gh_checks(ctx, curve, seed))
    d = np.diff(curve.xi)
    rep.add("homeomorphism", bool(np.all(d > 0)), float(max(-d.min(), 0.0)), min_step=float(d.min()))
    rep.add("mass", abs(curve.mass - 1) <= cfg.tolerances["mass"], abs(curve.mass - 1))
    rep.extend(crossvalidate(ctx, curve))
    rep.extend(check_unimodal(curve))
    rep.extend(check_cdf_shape(curve))
    for r in RADII:
        rep.extend(angular_check(ctx, r))
    return rep


def cmd_verify(cfg, out_path=None, workers=None, stream=None):
    stream = stream or sys.stdout
    k = cfg.mollified() if cfg.mollify is not None else cfg.levy_k()
    val = validate_conditions(k)
    for line in val.lines():
        print(line, file=stream)
    if not val.ok:
        print("validation failed: k does not satisfy the standing conditions", file=stream)
        return EXIT_CONFIG
    ctx, curve = _density(cfg, workers=workers)
    rep = verify_report(cfg, ctx, curve, cfg.seed)
    text = "\n".join(rep.lines())
    print(text, file=stream)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write("\n".join(val.lines()) + "\n" + text + "\n")
    return EXIT_OK if rep.ok else EXIT_CHECK


# -- cumulants ---------------------------------------------------------------


def cumulant_triplet(cfg):
    """Triplet whose cumulants are reported: ``k_n`` when mollified, else the unfloored ``k``."""
    if cfg.mollify is not None:
        kn = cfg.mollified()
        return FreeTriplet(0.0, kn, cfg.target_gamma() + drift_correction(kn, cfg.quad))
    k = cfg.base_k()
    if cfg.eta == "lemma":
        return FreeTriplet.lemma(k, cfg.a)
    return FreeTriplet(cfg.a, k, cfg.eta)


def cmd_cumulants(cfg, order, out_path=None, stream=None):
    stream = stream or sys.stdout
    if not 1 <= order <= MAX_ORDER:
        raise ConfigError(f"order must be between 1 and {MAX_ORDER}, got {order}")
    kappa = list(cumulants_from_k(cumulant_triplet(cfg), order))
    moments = moments_from_cumulants(kappa)
    print(f"{'n':>3}  {'kappa':>24}  {'moment':>24}", file=stream)
    for n, (c, m) in enumerate(zip(kappa, moments), 1):
        print(f"{n:>3}  {c:>24.15e}  {m:>24.15e}", file=stream)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write("n,kappa,moment\n")
            for n, (c, m) in enumerate(zip(kappa, moments), 1):
                fh.write(f"{n},{c:.16e},{m:.16e}\n")
    return EXIT_OK


# -- mollify -----------------------------------------------------------------


def sup_distance(a, b):
    """Sup of ``|f_a - f_b|`` on the overlap of two sampled densities."""
    lo = max(a.xi[0], b.xi[0])
    hi = min(a.xi[-1], b.xi[-1])
    xi = np.union1d(a.xi, b.xi)
    xi = xi[(xi >= lo) & (xi <= hi)]
    return float(np.max(np.abs(np.interp(xi, a.xi, a.f) - np.interp(xi, b.xi, b.f))))


def cmd_mollify(cfg, n_list, out_dir, workers=None, stream=None):
    stream = stream or sys.stdout
    n_list = sorted(set(n_list or cfg.n_list()))
    os.makedirs(out_dir, exist_ok=True)
    rep = ValidationReport()
    lines = []
    curves = []
    dists = []
    for n in n_list:
        ctx, curve = _density(cfg, n=n, workers=workers)
        write_csv(curve, os.path.join(out_dir, f"density_n{n}.csv"))
        dist = sigma_distance(ctx.k)
        dists.append(dist)
        omega, fmax = mode(curve, ctx)
        lines.append(
            f"n={n} sigma_distance={dist:.6e} mass={_fmt(curve.mass)} mode={_fmt(omega)} fmax={_fmt(fmax)}"
        )
        rep.add(f"mass_n={n}", abs(curve.mass - 1) <= cfg.tolerances["mass"], abs(curve.mass - 1))
        curves.append(curve)
    for (n0, c0), (n1, c1) in zip(zip(n_list, curves), zip(n_list[1:], curves[1:])):
        lines.append(f"n={n0}->{n1} sup_density_distance={sup_distance(c0, c1):.6e}")
    steps = np.diff(dists)
    rep.add(
        "sigma_decreasing",
        bool(np.all(steps < 0)),
        float(max(steps.max(initial=-math.inf), 0.0)) if steps.size else 0.0,
    )
    text = "\n".join(lines + rep.lines())
    print(text, file=stream)
    with open(os.path.join(out_dir, "report.txt"), "w") as fh:
        fh.write(text + "\n")
    return EXIT_OK if rep.ok else EXIT_CHECK


# -- entry point -------------------------------------------------------------


def _n_list(text):
    try:
        out = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers") from None
    if not out or min(out) < 1:
        raise argparse.ArgumentTypeError("n values must be positive")
    return out


def build_parser():
    p = argparse.ArgumentParser(prog="freesd", description="Densities of freely selfdecomposable laws.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_help):
        sp.add_argument("--config", required=True, help="JSON run configuration")
        sp.add_argument("--out", help=out_help)
        sp.add_argument("--workers", type=int, default=None, help="processes for curve solves")

    common(sub.add_parser("density", help="sample the density and write x,v,xi,f"), "CSV output path")
    common(sub.add_parser("verify", help="run the consistency checks"), "optional report path")
    sp = sub.add_parser("cumulants", help="free cumulants and moments")
    common(sp, "optional CSV output path")
    sp.add_argument("--order", type=int, default=None, help=f"highest order, at most {MAX_ORDER}")
    sp = sub.add_parser("mollify", help="densities along a mollification sequence")
    common(sp, "output directory")
    sp.add_argument("--n-list", type=_n_list, default=None, help="comma-separated n, e.g. 8,16,32")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.workers is not None and args.workers < 1:
            raise ConfigError("--workers must be positive")
        if args.command == "density":
            return cmd_density(cfg, args.out, args.workers)
        if args.command == "verify":
            return cmd_verify(cfg, args.out, args.workers)
        if args.command == "cumulants":
            return cmd_cumulants(cfg, args.order or cfg.order, args.out)
        return cmd_mollify(cfg, args.n_list, args.out or "mollify_out", args.workers)
    except _NUMERIC as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
