"""Command-line interface.

Every subcommand writes its data to the ``-o`` file (CSV or JSON) and prints
a one-line JSON summary to stdout.  Errors produce a single diagnostic line
on stderr and exit status 1 (2 for usage errors).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings

import numpy as np

from . import __version__
from .almgren import (
    DEFAULT_TOL_MONO,
    doubling_check,
    frequency_series,
    verify_monotone,
    write_frequency_csv,
)
from .cube import DEFAULT_QUAD_ORDER, curve_rows, energy_curve, write_curve_csv
from .errors import AlmgrenError, EmptyHorizon, IoError, ParseError
from .generators import gen_lattice, gen_tree, random_connected_graph
from .graph import layer_decompose, load_edge_list, load_graph_json, save_graph_json
from .harmonic import load_field_json, residual, save_field_json, solve_dirichlet, tree_example_field
from .polynomial import parse_polynomial
from .suites import monotonicity_suite, star_suite

PROG = "discrete-almgren"


class CliError(Exception):
    def __init__(self, where, message):
        self.where = where
        super().__init__(message)


def _clean(obj):
    if isinstance(obj, float):
        return None if math.isnan(obj) or math.isinf(obj) else obj
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return _clean(obj.item())
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def emit(summary):
    print(json.dumps(_clean(summary), sort_keys=True))


def _input(flag, loader, path, *args):
    try:
        return loader(path, *args)
    except ParseError as exc:
        detail = exc.message if exc.line is None else f"line {exc.line}: {exc.message}"
        raise CliError(f"{flag} {path}", detail) from None
    except IoError as exc:
        raise CliError(f"{flag} {path}", getattr(exc.__cause__, "strerror", None) or str(exc)) from None
    except (AlmgrenError, OSError) as exc:
        raise CliError(f"{flag} {path}", str(exc)) from None


def _load_graph(path):
    if str(path).endswith(".json"):
        return load_graph_json(path)
    return load_edge_list(path)


def _check_paths(args, inputs):
    out = getattr(args, "output", None)
    if out is None:
        return
    for flag in inputs:
        p = getattr(args, flag.lstrip("-").replace("-", "_"), None)
        if p is not None and os.path.abspath(p) == os.path.abspath(out):
            raise CliError("-o", f"output path equals {flag} input path")


def _series_summary(series, report):
    return {
        "horizon": series.horizon,
        "pass": report.passed,
        "worst_margins": report.as_dict(),
        "energy_scale": series.energy_scale,
    }


def _frequency(args):
    g = _input("--graph", _load_graph, args.graph)
    f = _input("--field", load_field_json, args.field, g.vertex_count)
    try:
        dec = layer_decompose(g, args.base)
    except AlmgrenError as exc:
        raise CliError("--base", str(exc)) from None
    try:
        residual(g, f)
    except AlmgrenError as exc:
        raise CliError(f"--field {args.field}", str(exc)) from None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EmptyHorizon)
        s = frequency_series(dec, f, args.tol_mono)
    return g, f, dec, s


def cmd_gen(args):
    _check_paths(args, ["--input"])
    if args.family == "tree":
        g, _ = gen_tree(args.degree, args.depth)
    elif args.family == "lattice":
        g, _ = gen_lattice(args.dim, args.radius)
    elif args.family == "random":
        g = random_connected_graph(args.vertices, np.random.default_rng(args.seed))
    else:
        if args.input is None:
            raise CliError("--input", "gen edgelist needs --input")
        g = _input("--input", load_edge_list, args.input)
    save_graph_json(g, args.output)
    emit({"command": "gen", "family": args.family, "vertex_count": g.vertex_count,
          "edge_count": g.edge_count, "pass": True, "files": [args.output]})
    return 0


def cmd_solve(args):
    _check_paths(args, ["--graph", "--boundary"])
    g = _input("--graph", _load_graph, args.graph)
    try:
        with open(args.boundary) as fh:
            raw = json.load(fh)
        boundary = {int(k): float(v) for k, v in raw.items()}
    except OSError as exc:
        raise CliError(f"--boundary {args.boundary}", exc.strerror or str(exc)) from None
    except json.JSONDecodeError as exc:
        raise CliError(f"--boundary {args.boundary}", f"line {exc.lineno}: {exc.msg}") from None
    except (AttributeError, TypeError, ValueError) as exc:
        raise CliError(f"--boundary {args.boundary}", f"expected an object of id: value ({exc})") from None
    f = solve_dirichlet(g, boundary, tol=args.tol, max_iter=args.max_iter, method=args.method)
    save_field_json(f, args.output)
    emit({"command": "solve", "iterations": f.iterations, "max_residual": f.max_residual,
          "interior": int(f.interior.sum()), "pass": True, "files": [args.output]})
    return 0


def cmd_freq(args):
    _check_paths(args, ["--graph", "--field"])
    g, f, dec, s = _frequency(args)
    rep = verify_monotone(s)
    files = []
    if args.output:
        write_frequency_csv(s, args.output)
        files.append(args.output)
    out = {"command": args.command, **_series_summary(s, rep),
           "flow_balance_error": dec.flow_balance_error(),
           "max_residual": f.max_residual, "files": files}
    if args.command == "freq":
        out["N"] = s.N.tolist()
    emit(out)
    return 0 if rep.passed or args.command == "freq" else 3


def cmd_verify(args):
    if args.suite is None:
        if args.graph is None or args.field is None:
            raise CliError("--graph/--field", "verify needs --graph and --field, or --suite")
        return cmd_freq(args)
    if args.suite == "random":
        res = monotonicity_suite(args.count or 200, args.seed, args.max_vertices,
                                    args.tol, args.tol_mono)
    else:
        res = star_suite(args.count or 1000, args.seed)
    emit({"command": "verify", "suite": args.suite, "seed": args.seed, **res.as_dict(),
          "files": []})
    return 0 if res.passed else 3


def cmd_doubling(args):
    _check_paths(args, ["--graph", "--field"])
    g, f, dec, s = _frequency(args)
    try:
        rep = doubling_check(dec, f, s, args.a, args.b)
    except AlmgrenError as exc:
        raise CliError("-a/-b", str(exc)) from None
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(_clean(rep.as_dict()), fh, sort_keys=True)
            fh.write("\n")
    emit({"command": "doubling", "horizon": s.horizon, "pass": rep.passed,
          **rep.as_dict(), "files": [args.output] if args.output else []})
    return 0 if rep.passed else 3


def cmd_tree_example(args):
    g, root, f = tree_example_field(args.depth)
    dec = layer_decompose(g, root)
    residual(g, f)
    s = frequency_series(dec, f, args.tol_mono)
    rep = verify_monotone(s)
    k = np.arange(s.horizon + 1)
    closed = 8.0 - 3.0 / np.ldexp(1.0, k - 1)
    err = float(np.abs(s.N - closed).max()) if s.horizon >= 0 else 0.0
    files = []
    if args.output:
        write_frequency_csv(s, args.output)
        files.append(args.output)
    out = {"command": "tree-example", "depth": args.depth, **_series_summary(s, rep),
           "closed_form_max_error": err, "max_residual": f.max_residual, "files": files}
    ok = rep.passed
    if args.a is not None or args.b is not None:
        a = args.a if args.a is not None else 0
        b = args.b if args.b is not None else s.horizon
        try:
            d = doubling_check(dec, f, s, a, b)
        except AlmgrenError as exc:
            raise CliError("-a/-b", str(exc)) from None
        out["doubling"] = d.as_dict()
        ok = ok and d.passed
    out["pass"] = ok
    emit(out)
    return 0 if ok else 3


def cmd_cube_energy(args):
    try:
        p = parse_polynomial(args.poly, args.dim)
    except (ParseError, AlmgrenError) as exc:
        raise CliError("--poly", str(exc)) from None
    curve = energy_curve(p, args.tmin, args.tmax, args.steps, args.quad_order,
                         allow_nonharmonic=args.allow_nonharmonic)
    rows = list(curve_rows(p, curve, args.h_rel, args.stencil)) if p.is_continuum_harmonic else []
    files = []
    if args.output:
        if not rows:
            rows = [[repr(float(t)), repr(float(e)),
                     repr(float(curve.second_diffs[i - 1])) if 0 < i < len(curve.E) - 1 else "",
                     "", "", ""] for i, (t, e) in enumerate(zip(curve.t_grid, curve.E))]
        write_curve_csv(rows, args.output)
        files.append(args.output)
    gap = max((abs(float(r[3]) - float(r[4]) - float(r[5])) for r in rows if r[3]), default=None)
    convex = curve.is_convex(1e-8)
    emit({"command": "cube-energy", "poly": str(p), "dim": p.dim,
          "harmonic": p.is_continuum_harmonic, "pass": convex,
          "min_second_diff": curve.min_second_diff(), "max_E": float(np.abs(curve.E).max()),
          "max_decomposition_gap": gap, "files": files})
    return 0 if convex else 3


def build_parser():
    ap = argparse.ArgumentParser(prog=PROG, description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def graph_field(p, required=True):
        p.add_argument("--graph", required=required, help="graph JSON or edge-list file")
        p.add_argument("--field", required=required, help="field JSON")
        p.add_argument("--base", type=int, default=0)
        p.add_argument("--tol-mono", type=float, default=DEFAULT_TOL_MONO)

    p = sub.add_parser("gen", help="generate a graph family or convert an edge list")
    p.add_argument("family", choices=["tree", "lattice", "random", "edgelist"])
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--radius", type=int, default=4)
    p.add_argument("--vertices", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--input")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="solve a Dirichlet problem")
    p.add_argument("--graph", required=True)
    p.add_argument("--boundary", required=True, help="JSON object mapping vertex id to value")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iter", type=int, default=10**6)
    p.add_argument("--method", choices=["cg", "gauss-seidel"], default="cg")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("freq", help="frequency series N(k) as CSV")
    graph_field(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_freq)

    p = sub.add_parser("verify", help="check N >= 0 and monotonicity")
    graph_field(p, required=False)
    p.add_argument("--suite", choices=["random", "stars"])
    p.add_argument("--count", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-vertices", type=int, default=60)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("doubling", help="additive doubling bounds between layers a and b+1")
    graph_field(p)
    p.add_argument("-a", type=int, required=True)
    p.add_argument("-b", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_doubling)

    p = sub.add_parser("tree-example", help="closed-form harmonic field on the cubic tree")
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--tol-mono", type=float, default=DEFAULT_TOL_MONO)
    p.add_argument("-a", type=int)
    p.add_argument("-b", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_tree_example)

    p = sub.add_parser("cube-energy", help="boundary energy E(t) on cubes")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--poly", required=True, help='e.g. "x^2 - y^2" or "1*x^1*y^1"')
    p.add_argument("--tmin", "--t-min", dest="tmin", type=float, default=0.25)
    p.add_argument("--tmax", "--t-max", dest="tmax", type=float, default=4.0)
    p.add_argument("--steps", type=int, default=64)
    p.add_argument("--quad-order", type=int, default=DEFAULT_QUAD_ORDER)
    p.add_argument("--h-rel", type=float, default=1e-3, help="finite-difference step as a fraction of t")
    p.add_argument("--stencil", type=int, choices=[3, 5], default=5)
    p.add_argument("--allow-nonharmonic", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_cube_energy)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"{PROG} {args.command}: error: {exc.where}: {exc}", file=sys.stderr)
    except AlmgrenError as exc:
        print(f"{PROG} {args.command}: error: {type(exc).__name__}: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"{PROG} {args.command}: error: {exc.filename or ''}: {exc.strerror or exc}",
              file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
