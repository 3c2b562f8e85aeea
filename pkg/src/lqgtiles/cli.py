"""Command line interface.

Subcommands: tile, distance, ball, kpz, measure, ptp, field-check.
Options may come from a JSON config file (--config) and are overridden
by flags.  Exit codes: 0 success, 2 domain/config error, 3 numeric
failure, 4 capacity exceeded.
"""
import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .config import parse_config, resolve_config
from .errors import CapacityError, ConfigError, DomainError, NumericError
from .experiment import (run_ball_growth, run_kpz, run_measure,
                         run_ptp_distance)
from .graph import AdjacencyGraph
from .io import dump_tiling, emit_csv, emit_plot
from .tiling import subdivide


def _add_common(p):
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--q", type=float, help="background charge Q")
    p.add_argument("--cm", type=float, dest="c_m", help="matter central charge")
    p.add_argument("--epsilon", type=float, help="coarsest mass threshold")
    p.add_argument("--ladder-steps", type=int, dest="ladder_steps",
                   help="number of epsilon halvings")
    p.add_argument("--replicas", type=int, help="independent field replicas")
    p.add_argument("--seed", type=int, help="base seed")
    p.add_argument("--depth-cap", type=int, dest="depth_cap",
                   help="maximum subdivision level")
    p.add_argument("--backend", choices=("exact", "octave", "stub"),
                   help="field realization backend")
    p.add_argument("--stub-value", type=float, dest="stub_value",
                   help="constant field value for the stub backend")
    p.add_argument("--alpha", type=float, help="log-singularity strength")
    p.add_argument("--domain-level", type=int, dest="domain_level",
                   help="domain is the dyadic square (level, 0, 0)")
    p.add_argument("--workers", type=int, help="parallel replica workers")
    p.add_argument("--out", help="output file path")


_OVERRIDE_KEYS = ("q", "c_m", "epsilon", "ladder_steps", "replicas", "seed",
                  "depth_cap", "backend", "stub_value", "alpha",
                  "domain_level", "workers", "out")


def _load(ns, extra=None):
    overrides = {k: getattr(ns, k, None) for k in _OVERRIDE_KEYS}
    if extra:
        overrides.update({k: v for k, v in extra.items() if v is not None})
    if ns.config:
        with open(ns.config) as f:
            text = f.read()
        return parse_config(text, overrides)
    return resolve_config({}, overrides)


def _meta(cfg, **extra):
    m = {"version": __version__, "config_hash": cfg.config_hash,
         "q": cfg.params.q, "seed": cfg.seed, "backend": cfg.backend}
    m.update(extra)
    return m


def _out(cfg, default):
    return cfg.out if cfg.out else default


# -- subcommand bodies --------------------------------------------------------

def cmd_tile(ns):
    cfg = _load(ns)
    field = cfg.fieldspec.build(cfg.seed)
    t = subdivide(cfg.domain, cfg.epsilon, field, cfg.params, cfg.depth_cap)
    path = _out(cfg, "tiling.txt")
    dump_tiling(t, path)
    print(f"tile: {len(t)} squares, {t.n_unresolved} unresolved, "
          f"max side {t.max_side() if len(t) else float('nan')} -> {path}")
    return 0


def cmd_distance(ns):
    cfg = _load(ns, {"z": ns.z, "w": ns.w})
    res = run_ptp_distance(tuple(cfg.z), tuple(cfg.w), cfg.ladder, cfg.params,
                           cfg.fieldspec, cfg.domain, cfg.depth_cap,
                           cfg.workers)
    path = _out(cfg, "distance.csv")
    rows = [(e, r, "" if d is None else d, c) for (e, r, d, c) in res.rows]
    emit_csv(path, "ptp", ("epsilon", "replica", "distance", "censored"),
             rows, _meta(cfg, z=f"{cfg.z[0]} {cfg.z[1]}",
                         w=f"{cfg.w[0]} {cfg.w[1]}"))
    print(f"distance: {len(res.rows)} rows, {res.censored} censored -> {path}")
    if res.fit is not None:
        print(f"distance exponent fit: {res.fit.slope:.4f} "
              f"(stderr {res.fit.stderr:.4f}, lower bound {res.lower_bound:.4f})")
    return 0


def cmd_ball(ns):
    cfg = _load(ns, {"radii": ns.radii, "center": ns.center})
    res = run_ball_growth(cfg.radii, cfg.params, cfg.fieldspec, cfg.epsilon,
                          cfg.domain, cfg.depth_cap, cfg.replicas, cfg.seed,
                          tuple(cfg.center), cfg.workers)
    path = _out(cfg, "ball.csv")
    emit_csv(path, "ball", ("radius", "replica", "count", "truncated"),
             res.rows, _meta(cfg, epsilon=cfg.epsilon))
    print(f"ball: {len(res.rows)} rows -> {path}")
    for r, e in res.exponents:
        print(f"  e({r}) = {e:.4f}")
    for name, val in res.reference.items():
        print(f"  reference {name} = {val:.4f}")
    if res.exponents:
        prefix = path.rsplit(".", 1)[0]
        xs = [r for r, _ in res.exponents]
        ys = [e for _, e in res.exponents]
        emit_plot(prefix, "ball growth exponent", "radius r", "e(r)",
                  {"e(r)": (xs, ys)}, logscale=False)
    return 0


def _fractal_extra(ns):
    if getattr(ns, "fractal", None):
        try:
            return {"fractal": json.loads(ns.fractal)}
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--fractal is not valid JSON: {exc}") from exc
    return None


def cmd_kpz(ns):
    cfg = _load(ns, _fractal_extra(ns))
    X = cfg.fractal_set
    res = run_kpz(X, cfg.ladder, cfg.params, cfg.fieldspec, cfg.domain,
                  cfg.depth_cap, cfg.workers)
    path = _out(cfg, "kpz.csv")
    emit_csv(path, "kpz", ("epsilon", "replica", "count", "unresolved_hits"),
             res.rows, _meta(cfg, fractal=X.kind, x=X.nominal_dimension))
    print(f"kpz: {len(res.rows)} rows, {res.censored} censored -> {path}")
    if res.prediction.infinite:
        print(f"predicted exponent: infinite (blow-up regime); "
              f"blow-up fraction at finest epsilon = {res.blowup_fraction:.3f}")
    else:
        print(f"predicted exponent: {res.prediction.value:.6f}"
              + (" (boundary case)" if res.prediction.at_boundary else ""))
    if res.fit is not None:
        flag = ("" if res.fit.reportable
                else " [NOT REPORTABLE: <3 ladder points or >50% censored]")
        print(f"fitted exponent: {res.fit.slope:.4f} "
              f"(stderr {res.fit.stderr:.4f}, r2 {res.fit.r2:.4f}){flag}")
        prefix = path.rsplit(".", 1)[0]
        xs = [math.exp(-x) for x, _ in res.fit.points]     # back to epsilon
        ys = [math.exp(y) for _, y in res.fit.points]
        emit_plot(prefix, "quantum count scaling", "epsilon", "mean count",
                  {"mean count": (xs, ys)})
    return 0


def cmd_measure(ns):
    cfg = _load(ns, _fractal_extra(ns))
    X = cfg.fractal_set
    res = run_measure(X, cfg.ladder, cfg.params, cfg.fieldspec, cfg.domain,
                      cfg.depth_cap, cfg.workers)
    path = _out(cfg, "measure.csv")
    emit_csv(path, "measure", ("epsilon", "replica", "count", "rescaled"),
             res.rows, _meta(cfg, fractal=X.kind, x=X.nominal_dimension,
                             exponent=res.exponent))
    print(f"measure: {len(res.rows)} rows, exponent {res.exponent:.6f} -> {path}")
    for eps, m in res.series:
        print(f"  eps={eps:.6g}  mean rescaled count = {m:.6g}")
    return 0


def cmd_ptp(ns):
    return cmd_distance(ns)


def cmd_field_check(ns):
    """Self-test: special function and synthesized field statistics."""
    cfg = _load(ns)
    from .covariance import layer_covariance, wn_covariance, wn_variance
    from .expint import _e1_contfrac, _e1_series
    from .field import OctaveField
    from .squares import DyadicSquare

    failures = 0

    def check(name, got, want, tol):
        nonlocal failures
        ok = abs(got - want) <= tol
        failures += 0 if ok else 1
        print(f"{'PASS' if ok else 'FAIL'} {name}: got {got:.6g}, "
              f"want {want:.6g} (tol {tol:.2g})")

    # branch agreement of the exponential integral at the switch point
    for x in (0.5, 0.9, 1.0, 1.1, 2.0, 5.0):
        check(f"E1 branch agreement x={x}",
              float(_e1_series(x)), float(_e1_contfrac(x)), 1e-10)
    # diagonal variance identity
    for m in (1, 3, 6, 10):
        t = 2.0 ** -m
        check(f"variance identity t=2^-{m}", wn_variance(t),
              math.log(1.0 / t), 1e-12)
    # octave layer covariance at zero separation equals log 2
    check("layer variance", float(layer_covariance(np.array([0.0]))[0]),
          math.log(2.0), 1e-12)

    # Monte-Carlo check of the synthesized field against the analytic law
    reps = ns.mc_replicas
    m = 5
    pts = np.array([[0.5, 0.5], [0.75, 0.5], [0.5, 0.25]])
    samples = np.empty((reps, len(pts)))
    for rep in range(reps):
        f = OctaveField(DyadicSquare(0, 0, 0), depth=m + 1, seed=cfg.seed + rep)
        samples[rep] = f.values(pts[:, 0], pts[:, 1], m)
    t = 2.0 ** -m
    var = samples.var(axis=0, ddof=1)
    se = math.sqrt(2.0 / (reps - 1)) * math.log(1.0 / t)
    for i in range(len(pts)):
        check(f"MC variance point {i}", float(var[i]), math.log(1.0 / t),
              0.12 * math.log(1.0 / t) + 4 * se)
    c01 = float(np.cov(samples[:, 0], samples[:, 1])[0, 1])
    want01 = wn_covariance(pts[0], t, pts[1], t)
    check("MC covariance d=0.25", c01, want01, 0.15 * want01 + 4 * se)

    if failures:
        raise NumericError(f"field-check: {failures} check(s) failed")
    print("field-check: all checks passed")
    return 0


# -- entry point ---------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(
        prog="lqgtiles",
        description="Dyadic-square tilings of Liouville quantum gravity: "
                    "build tilings, measure graph distances, ball growth "
                    "and fractal counting exponents.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tile", help="build and dump one tiling")
    _add_common(p)
    p.set_defaults(func=cmd_tile)

    p = sub.add_parser("distance", help="point-to-point tiling distance")
    _add_common(p)
    p.add_argument("--z", type=float, nargs=2, metavar=("X", "Y"))
    p.add_argument("--w", type=float, nargs=2, metavar=("X", "Y"))
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("ptp", help="alias of distance")
    _add_common(p)
    p.add_argument("--z", type=float, nargs=2, metavar=("X", "Y"))
    p.add_argument("--w", type=float, nargs=2, metavar=("X", "Y"))
    p.set_defaults(func=cmd_ptp)

    p = sub.add_parser("ball", help="graph ball growth around a center")
    _add_common(p)
    p.add_argument("--radii", type=int, nargs="+")
    p.add_argument("--center", type=float, nargs=2, metavar=("X", "Y"))
    p.set_defaults(func=cmd_ball)

    p = sub.add_parser("kpz", help="quantum counting exponent of a fractal")
    _add_common(p)
    p.add_argument("--fractal", help="JSON fractal description")
    p.set_defaults(func=cmd_kpz)

    p = sub.add_parser("measure", help="rescaled-count stability of a fractal")
    _add_common(p)
    p.add_argument("--fractal", help="JSON fractal description")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("field-check",
                       help="self-test field statistics against analytic law")
    _add_common(p)
    p.add_argument("--mc-replicas", type=int, default=400, dest="mc_replicas")
    p.set_defaults(func=cmd_field_check)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    try:
        return ns.func(ns)
    except (DomainError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
