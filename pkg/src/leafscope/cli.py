"""Command-line interface.

JSON records go to ``--out`` (stdout by default) and always start with a
provenance header; grids are written as CSV; ``--svg`` adds a static figure.
Exit codes: 0 success, 2 usage error, 3 numerical refusal (diagnostic JSON on
stderr).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import constructor, currents, horocycles, io, leafmetrics, localmodel
from .group import (
    ResourceError,
    cyclic_group,
    dirichlet_domain,
    fundamental_domain_violations,
    limit_set_sample,
    ping_pong,
    tail_bounds,
    word_ball,
)
from .moebius import BoundaryPoint, ClassificationError, DomainError, Horocycle

EXIT_OK, EXIT_USAGE, EXIT_REFUSAL = 0, 2, 3

REFUSALS = (
    horocycles.RefusalError,
    leafmetrics.DirectionError,
    constructor.ConstraintViolation,
    constructor.ConstructionError,
    io.SpecFormatError,
    ResourceError,
    DomainError,
    ClassificationError,
)


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _grid(text: str) -> tuple[int, int]:
    try:
        n_r, n_t = (int(x) for x in text.lower().replace("x", ",").split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected N_R,N_THETA, got {text!r}") from exc
    if n_r < 1 or n_t < 1:
        raise argparse.ArgumentTypeError("grid sizes must be positive")
    return n_r, n_t


def _emit(args, record: dict) -> None:
    io.write_json(args.out, record)


def _svg(args, **layers) -> None:
    if args.svg:
        Path(args.svg).write_text(io.render_svg(**layers))


def _header(args, command: str, **params) -> dict:
    return io.provenance(command, seed=args.seed, **params)


def _load(args):
    group, ext = io.read_group(args.spec)
    return group, ext


# ---------------------------------------------------------------------------
# handlers


def cmd_group_make_cyclic(args) -> int:
    group = cyclic_group(args.r)
    io.write_group(args.out, group, header=_header(args, "group make-cyclic", r=args.r))
    return EXIT_OK


def cmd_group_check(args) -> int:
    group, _ = _load(args)
    rng = np.random.default_rng(args.seed)
    n = args.samples
    pts = 0.99 * np.sqrt(rng.random(n)) * np.exp(2j * math.pi * rng.random(n))
    dom = dirichlet_domain(group, args.depth)
    rep = fundamental_domain_violations(group, args.depth, pts, domain=dom)
    pp = ping_pong(group)
    tb = tail_bounds(group, args.depth)
    ball = word_ball(group, args.depth)
    record = {
        "provenance": _header(args, "group check", depth=args.depth, samples=n),
        "rank": group.rank,
        "ball_size": len(ball),
        "ping_pong": {"valid": pp.valid, "min_gap": pp.min_gap, "reason": pp.reason},
        "tail": {"valid": tb.valid, "spectral_radius": tb.spectral_radius, "orbit_distance": tb.orbit_distance},
        "dirichlet_constraints": len(dom.constraints),
        "checked_samples": rep.checked,
        "violations": [
            {"sample": v.sample_index, "z": [v.z.real, v.z.imag], "image": [v.image.real, v.image.imag],
             "word": v.element.label(group.labels)}
            for v in rep.pairs[:100]
        ],
        "violation_count": len(rep),
        "warnings": list(rep.warnings),
    }
    _emit(args, record)
    _svg(args, geodesics=dom.geodesics, limit_points=limit_set_sample(group, args.depth))
    return EXIT_OK


def cmd_field(args) -> int:
    group, _ = _load(args)
    n_r, n_t = args.grid
    pts = io.polar_grid(args.rmax, n_r, n_t)
    records = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", leafmetrics.TruncationWarning)
        for z in pts:
            rep = leafmetrics.leaf_report(group, args.depth, complex(z), tol=args.tol)
            records.append({
                "zeta_re": z.real, "zeta_im": z.imag,
                "beta": rep.beta.value, "beta_certified": rep.beta.certified,
                "alpha": rep.alpha.value, "alpha_lo": rep.alpha.lower_bound, "alpha_hi": rep.alpha.upper_bound,
                "rho_lower": rep.rho_lower,
            })
    text = io.field_csv(records)
    if args.csv:
        Path(args.csv).write_text(text)
    else:
        sys.stdout.write(text)
        return EXIT_OK
    column = {"alpha": "alpha", "beta": "beta", "rho": "rho_lower"}[args.which]
    vals = np.array([r[column] for r in records])
    summary = {
        "provenance": _header(args, "field", depth=args.depth, which=args.which, grid=[n_r, n_t], rmax=args.rmax, tol=args.tol),
        "rows": len(records),
        "csv": args.csv,
        "min": float(vals.min()),
        "max": float(vals.max()),
        "beta_certified_fraction": float(np.mean([r["beta_certified"] for r in records])),
    }
    _emit(args, summary)
    return EXIT_OK


def cmd_limitset(args) -> int:
    group, _ = _load(args)
    pts = limit_set_sample(group, args.depth, args.eps)
    record = {
        "provenance": _header(args, "limitset", depth=args.depth, eps=args.eps),
        "count": len(pts),
        "points": [{"angle": p.point.angle, "modulus": p.modulus} for p in pts],
    }
    _emit(args, record)
    _svg(args, limit_points=pts, geodesics=dirichlet_domain(group, min(args.depth, 6)).geodesics)
    return EXIT_OK


def cmd_construct_fullmeasure(args) -> int:
    state = constructor.fullmeasure_construct(args.stages, args.deltas, depth=args.depth)
    header = _header(args, "construct fullmeasure", stages=args.stages, depth=args.depth)
    io.write_group(args.out, state.group, state.to_extensions(), header=header)
    geos = [g for pair in state.domain_geodesics for g in pair]
    _svg(args, geodesics=geos)
    return EXIT_OK


def cmd_horocycle_check(args) -> int:
    group, _ = _load(args)
    h = Horocycle(BoundaryPoint(args.zeta), args.radius)
    cert = horocycles.horocycle_injectivity(group, args.depth, h)
    record = {
        "provenance": _header(args, "horocycle check", depth=args.depth),
        "zeta": args.zeta,
        "radius": args.radius,
        "verdict": cert.verdict.value,
        "min_gap": cert.min_gap,
        "element": cert.element.label(group.labels) if cert.element is not None else None,
        "witness": [[w.real, w.imag] for w in cert.witness] if cert.witness else None,
    }
    _emit(args, record)
    _svg(args, horocycles=[h], geodesics=dirichlet_domain(group, min(args.depth, 6)).geodesics)
    return EXIT_OK


def cmd_horocycle_floor(args) -> int:
    fl = horocycles.displacement_floor(args.N, args.n)
    record = {"provenance": _header(args, "horocycle floor", N=args.N, n=args.n), "m": fl.m, "M": fl.M}
    if fl.M_exact is not None:
        record["M_exact"] = str(fl.M_exact)
    _emit(args, record)
    return EXIT_OK


def cmd_localmodel_annulus(args) -> int:
    a, b = args.a, args.b
    spec = localmodel.AnnulusSpec(a, b)
    record = {
        "provenance": _header(args, "localmodel annulus", nodes=args.nodes),
        "inner": a,
        "outer": b,
        "modulus": spec.modulus,
        "core_radius": spec.core_radius,
        "core_circle_length": localmodel.core_circle_length(a, b),
    }
    if args.M is not None:
        ch = localmodel.choose_annulus_and_winding(spec.core_radius, args.M, ratio=b / a, nodes=args.nodes)
        record["winding"] = {
            "M": args.M,
            "N": ch.N,
            "escape_inner_radius": ch.escape_inner_radius,
            "escape_outer_radius": ch.escape_outer_radius,
            "escape_lengths": list(ch.escape_lengths),
            "winding_length": ch.winding_length,
            "certified": ch.certified,
            "refined": ch.reverify(2 * args.nodes),
        }
    _emit(args, record)
    return EXIT_OK


def cmd_localmodel_strip(args) -> int:
    lam = args.lam if args.lam_im == 0 else complex(args.lam, args.lam_im)
    model = localmodel.SingularModelSpec(lam)
    strip = localmodel.StripSpec(args.a, args.b, args.N)
    verdict = localmodel.strip_injectivity(model, strip)
    deg = localmodel.covering_projection_degree(strip, seed=args.seed)
    coincid = localmodel.brute_force_coincidences(model, strip)
    record = {
        "provenance": _header(args, "localmodel strip", N=args.N),
        "lambda": [complex(lam).real, complex(lam).imag],
        "injective": verdict.injective,
        "witness_k": verdict.witness_k,
        "brute_force_coincidences": len(coincid),
        "degree": deg.degree,
        "fiber_min": deg.fiber_min,
        "fiber_max": deg.fiber_max,
        "degree_confirmed": deg.confirmed,
    }
    _emit(args, record)
    return EXIT_OK


def _map(args) -> currents.AnalyticMapSpec:
    if args.map == "identity":
        return currents.identity_map()
    if args.map == "annulus":
        return currents.annulus_cover(args.a, args.b)
    if not args.coeffs:
        raise DomainError("--map poly needs --coeffs")
    return currents.polynomial_map(args.coeffs)


def cmd_current_mass(args) -> int:
    fmap = _map(args)
    grid = sorted({r for r in currents.DEFAULT_MASS_GRID if r < args.rmax} | {args.rmax})
    curve = [currents.nevanlinna_mass(fmap, r) for r in grid]
    record = {
        "provenance": _header(args, "current mass", map=args.map, rmax=args.rmax, rtol=currents.MASS_RTOL),
        "grid": grid,
        "mass": [e.value for e in curve],
        "relative_change": [e.relative_change for e in curve],
        "converged": all(e.converged for e in curve),
    }
    _emit(args, record)
    return EXIT_OK


def cmd_current_ray(args) -> int:
    fmap = _map(args)
    res = currents.ray_divergence(fmap, args.theta)
    record = {
        "provenance": _header(args, "current ray", map=args.map, theta=args.theta),
        "slope": res.slope,
        "r_squared": res.r_squared,
        "diverging": res.diverging,
        "final_value": float(res.cumulative[-1]),
        "final_s": float(res.grid[-1]),
    }
    _emit(args, record)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for randomized steps (default 0)")
    common.add_argument("--out", default="-", help="JSON output path (default stdout)")
    common.add_argument("--svg", default=None, help="also write a static SVG figure here")

    spec = argparse.ArgumentParser(add_help=False)
    spec.add_argument("--spec", required=True, help="group-spec JSON file")

    p = argparse.ArgumentParser(prog="leafscope", description="Disk-likeness diagnostics for uniformized leaves.")
    sub = p.add_subparsers(dest="command")

    grp = sub.add_parser("group", help="group specs").add_subparsers(dest="action")
    q = grp.add_parser("make-cyclic", parents=[common], help="cyclic group of make_hyperbolic(r)")
    q.add_argument("--r", type=float, required=True)
    q.set_defaults(func=cmd_group_make_cyclic)
    q = grp.add_parser("check", parents=[common, spec], help="discreteness evidence at finite depth")
    q.add_argument("--depth", type=int, default=6)
    q.add_argument("--samples", type=int, default=1000)
    q.set_defaults(func=cmd_group_check)

    q = sub.add_parser("field", parents=[common, spec], help="metric grid as CSV")
    q.add_argument("--which", choices=("alpha", "beta", "rho"), default="beta")
    q.add_argument("--depth", type=int, default=8)
    q.add_argument("--grid", type=_grid, default=(8, 32), help="N_R,N_THETA")
    q.add_argument("--rmax", type=float, default=0.9)
    q.add_argument("--tol", type=float, default=leafmetrics.DEFAULT_ALPHA_TOL)
    q.add_argument("--csv", default=None, help="CSV path; without it the CSV goes to stdout")
    q.set_defaults(func=cmd_field)

    q = sub.add_parser("limitset", parents=[common, spec], help="limit-set samples")
    q.add_argument("--depth", type=int, default=8)
    q.add_argument("--eps", type=float, default=0.05)
    q.set_defaults(func=cmd_limitset)

    con = sub.add_parser("construct", help="inductive constructions").add_subparsers(dest="action")
    q = con.add_parser("fullmeasure", parents=[common], help="groups with injective horocycles on large boundary sets")
    q.add_argument("--stages", type=int, required=True)
    q.add_argument("--deltas", type=_floats, default=None, help="comma-separated removal budgets for stages 2..m")
    q.add_argument("--depth", type=int, default=constructor.DEFAULT_DEPTH)
    q.set_defaults(func=cmd_construct_fullmeasure)

    hor = sub.add_parser("horocycle", help="horodisk injectivity").add_subparsers(dest="action")
    q = hor.add_parser("check", parents=[common, spec])
    q.add_argument("--zeta", type=float, required=True, help="base angle")
    q.add_argument("--radius", type=float, required=True)
    q.add_argument("--depth", type=int, default=8)
    q.set_defaults(func=cmd_horocycle_check)
    q = hor.add_parser("floor", parents=[common], help="displacement floor m(N, n), M(N, n)")
    q.add_argument("--N", type=int, required=True)
    q.add_argument("--n", type=int, required=True)
    q.set_defaults(func=cmd_horocycle_floor)

    loc = sub.add_parser("localmodel", help="local model near a singular point").add_subparsers(dest="action")
    q = loc.add_parser("annulus", parents=[common])
    q.add_argument("--a", type=float, required=True)
    q.add_argument("--b", type=float, required=True)
    q.add_argument("--M", type=float, default=None, help="target length for escape and winding")
    q.add_argument("--nodes", type=int, default=32)
    q.set_defaults(func=cmd_localmodel_annulus)
    q = loc.add_parser("strip", parents=[common])
    q.add_argument("--lambda", dest="lam", type=float, required=True)
    q.add_argument("--lambda-im", dest="lam_im", type=float, default=0.0)
    q.add_argument("--N", type=int, required=True)
    q.add_argument("--a", type=float, default=0.5)
    q.add_argument("--b", type=float, default=2.0)
    q.set_defaults(func=cmd_localmodel_strip)

    cur = sub.add_parser("current", help="mass and ray energy of disk maps").add_subparsers(dest="action")
    for name, func in (("mass", cmd_current_mass), ("ray", cmd_current_ray)):
        q = cur.add_parser(name, parents=[common])
        q.add_argument("--map", choices=("identity", "annulus", "poly"), default="identity")
        q.add_argument("--a", type=float, default=0.5)
        q.add_argument("--b", type=float, default=2.0)
        q.add_argument("--coeffs", type=_floats, default=None, help="polynomial coefficients, lowest degree first")
        if name == "mass":
            q.add_argument("--rmax", type=float, default=0.99)
        else:
            q.add_argument("--theta", type=float, default=0.0)
        q.set_defaults(func=func)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    if not hasattr(args, "func"):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except REFUSALS as exc:
        diag = {"error": type(exc).__name__, "message": str(exc)}
        extra = getattr(exc, "diagnostic", None) or getattr(exc, "offending", None)
        if extra is not None:
            diag["diagnostic"] = extra
        sys.stderr.write(json.dumps(diag, default=str) + "\n")
        return EXIT_REFUSAL
    except (OSError, ValueError) as exc:
        sys.stderr.write(f"leafscope: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
