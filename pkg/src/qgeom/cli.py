"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 numerical failure.
"""
import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .charts import load_chart
from .curvature import (
    DEFAULT_SCHEME,
    assembled_field,
    builtin_field,
    flatness_scan,
    pullback_field,
    quantum_metric_field,
    riemann,
)
from .errors import ConfigError, NumericalError, QGeomError
from .expr_dsl import canonical_print, eval_expression, load_family_file, parse_expression
from .finite_diff import DifferentiationScheme
from .quantum_metric import qgt, signature
from .state_families import load_family
from .verification import verify_paper

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


# -- output ------------------------------------------------------------------

def to_json(obj):
    """Deterministic JSON: sorted keys, floats at 17 significant digits.

    Non-finite floats raise :class:`NumericalError`.
    """
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(k))}: {to_json(v)}" for k, v in sorted(obj.items(), key=lambda kv: str(kv[0])))
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            raise NumericalError("refusing to write a non-finite number to JSON")
        return format(float(obj), ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return to_json(obj.tolist())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format(v, ".17g") if isinstance(v, float) else v for v in row])
    return buf.getvalue()


# -- argument helpers --------------------------------------------------------

def _number(text):
    value = eval_expression(parse_expression(text))
    if value.imag != 0:
        raise ConfigError(f"{text!r} is not a real number")
    return value.real


def _floats(text):
    try:
        return [_number(t) for t in text.split(",")]
    except QGeomError as exc:
        raise ConfigError(f"cannot read numbers from {text!r}: {exc}") from None


def _constants(pairs):
    out = {}
    for item in pairs or []:
        if "=" not in item:
            raise ConfigError(f"constant must look like name=value, got {item!r}")
        name, text = item.split("=", 1)
        name = name.strip()
        if name == "vector":
            out[name] = [eval_expression(parse_expression(t)) for t in text.split(",")]
        else:
            out[name] = _number(text)
    return out


def _scheme(args):
    kind = {2: "central-2", 4: "central-4"}[args.order]
    return DifferentiationScheme(kind, h=args.h)


def _curvature_scheme(args):
    kind = {2: "central-2", 4: "central-4"}[args.order]
    return DifferentiationScheme(kind, h=args.h if args.h is not None else DEFAULT_SCHEME.h)


def _metric_field(args):
    sources = [s for s in (args.assemble, args.builtin, args.chart, args.family) if s is not None]
    if len(sources) != 1:
        raise ConfigError("give exactly one of --assemble, --builtin, --chart, --family")
    if args.assemble is not None:
        vals = _floats(args.assemble)
        if len(vals) != 3:
            raise ConfigError("--assemble expects g11,g22,c")
        return assembled_field(*vals)
    if args.builtin is not None:
        return builtin_field(args.builtin)
    consts = _constants(args.const)
    if args.chart is not None:
        return pullback_field(load_chart(args.chart, consts), scheme=_scheme(args))
    return quantum_metric_field(load_family(args.family, consts), args.convention, _scheme(args))


# -- subcommands -------------------------------------------------------------

def cmd_metric(args):
    family = load_family(args.family, _constants(args.const))
    if not args.point:
        raise ConfigError("metric needs at least one --point")
    scheme = _scheme(args)
    results = []
    for text in args.point:
        p = _floats(text)
        if len(p) != family.n_params:
            raise ConfigError(
                f"--point {text!r} has {len(p)} coordinates; {family.name} expects {family.n_params} "
                f"({', '.join(family.parameter_names)})"
            )
        q = qgt(family, p, scheme, args.convention)
        results.append({"point": p, "qgt": q.as_pairs(), "metric": q.metric.tolist(), "signature": list(signature(q.metric))})
    report = {
        "command": "metric",
        "family": family.name,
        "parameters": list(family.parameter_names),
        "constants": {k: v for k, v in family.constants.items() if isinstance(v, (int, float))},
        "convention": args.convention,
        "scheme": scheme.as_dict(),
        "version": __version__,
        "results": results,
    }
    if args.format == "csv":
        m = family.n_params
        header = list(family.parameter_names)
        header += [f"q_re_{i}{j}" for i in range(m) for j in range(m)]
        header += [f"q_im_{i}{j}" for i in range(m) for j in range(m)]
        rows = []
        for r in results:
            pairs = r["qgt"]
            rows.append(
                [float(v) for v in r["point"]]
                + [pairs[i][j][0] for i in range(m) for j in range(m)]
                + [pairs[i][j][1] for i in range(m) for j in range(m)]
            )
        _emit(_csv_text(header, rows), args.out)
    else:
        _emit(to_json(report) + "\n", args.out)
    return EXIT_OK


def cmd_curvature(args):
    field = _metric_field(args)
    scheme = _curvature_scheme(args)
    rep = flatness_scan(field, args.points, args.tol, args.seed, scheme)
    data = {"command": "curvature", "version": __version__, **rep.as_dict()}
    if args.format == "csv":
        header = [p.name for p in field.parameters] + ["max_abs_riemann", "scalar_curvature"]
        rows = [list(p) + [m, s] for p, m, s in zip(rep.points, rep.max_abs_riemann, rep.scalar_curvature)]
        _emit(_csv_text(header, rows), args.out)
    else:
        _emit(to_json(data) + "\n", args.out)
    print(
        f"{field.name}: max|R| = {rep.global_max:.3e}, flat = {rep.flat} (tol {rep.tol:g}, {len(rep.points)} points)",
        file=sys.stderr,
    )
    return EXIT_OK


def _parse_axis(text, names):
    try:
        name, bounds = text.split("=", 1)
        lo, hi, count = bounds.split(":")
        count = int(count)
        lo, hi = _number(lo), _number(hi)
    except (ValueError, QGeomError):
        raise ConfigError(f"--axis must look like name=min:max:count, got {text!r}") from None
    if name not in names:
        raise ConfigError(f"unknown axis {name!r}; axes are {', '.join(names)}")
    if count < 1:
        raise ConfigError("grid count must be >= 1")
    return names.index(name), np.linspace(lo, hi, count) if count > 1 else np.array([lo])


def _observable(name, m):
    """Return ``(kind, i, j)`` for an observable name."""
    if name in ("n_plus", "n_minus", "n_zero", "scalar_curvature"):
        return name, None, None
    for prefix in ("q_re", "q_im", "g"):
        if name.startswith(prefix + "_"):
            idx = name[len(prefix) + 1:]
            if len(idx) == 2 and idx.isdigit() and int(idx[0]) < m and int(idx[1]) < m:
                return prefix, int(idx[0]), int(idx[1])
    raise ConfigError(
        f"unknown observable {name!r}; use q_re_ij, q_im_ij, g_ij, n_plus, n_minus, n_zero, scalar_curvature"
    )


def cmd_grid(args):
    family = None
    if args.family is not None and not any((args.assemble, args.builtin, args.chart)):
        family = load_family(args.family, _constants(args.const))
    field = _metric_field(args)
    names = [p.name for p in field.parameters]
    m = len(names)
    if args.at:
        base = np.array(_floats(args.at))
        if base.size != m:
            raise ConfigError(f"--at has {base.size} coordinates, expected {m} ({', '.join(names)})")
    else:
        lo = np.where(np.isfinite(field.lower), field.lower, 0.0)
        hi = np.where(np.isfinite(field.upper), field.upper, 0.0)
        base = 0.5 * (lo + hi)
    axes = [_parse_axis(a, names) for a in args.axis or []]
    if not axes:
        raise ConfigError("grid needs at least one --axis")
    if len(axes) > 2:
        raise ConfigError("grid supports at most 2 free axes")
    if len({k for k, _ in axes}) != len(axes):
        raise ConfigError("an axis is listed twice")
    observables = [_observable(o, m) for o in (args.observable or ["g_00"])]
    if family is None and any(kind in ("q_re", "q_im") for kind, _, _ in observables):
        raise ConfigError("q_re/q_im observables need --family")

    scheme = _scheme(args)
    rows = []
    grids = np.meshgrid(*[vals for _, vals in axes], indexing="ij")
    for idx in np.ndindex(grids[0].shape):
        p = base.copy()
        for (k, _), g in zip(axes, grids):
            p[k] = g[idx]
        row = [float(p[k]) for k, _ in axes]
        q = qgt(family, p, scheme, args.convention).matrix if family is not None else None
        G = q.real if q is not None else field(p)
        sig = None
        for kind, i, j in observables:
            if kind == "q_re":
                row.append(float(q[i, j].real))
            elif kind == "q_im":
                row.append(float(q[i, j].imag))
            elif kind == "g":
                row.append(float(G[i, j]))
            elif kind == "scalar_curvature":
                row.append(riemann(field, p, _curvature_scheme(args))[1])
            else:
                sig = sig or signature(G)
                row.append(getattr(sig, kind))
        rows.append(row)
    header = [names[k] for k, _ in axes] + (args.observable or ["g_00"])
    if args.format == "json":
        data = {
            "command": "grid",
            "version": __version__,
            "field": field.name,
            "base_point": base.tolist(),
            "scheme": scheme.as_dict(),
            "columns": header,
            "rows": rows,
        }
        _emit(to_json(data) + "\n", args.out)
    else:
        _emit(_csv_text(header, rows), args.out)
    return EXIT_OK


def cmd_verify_paper(args):
    if not args.c > 0:
        raise ConfigError("--c must be positive")
    report = verify_paper(c=args.c, seed=args.seed, break_eta=args.break_eta)
    _emit(to_json(report.as_dict()) + "\n", args.out)
    for chk in report.checks:
        status = "PASS" if chk.passed else "FAIL"
        print(f"[{status}] {chk.name}: residual {chk.residual:.3e} (tol {chk.tolerance:g})", file=sys.stderr)
    n = sum(c.passed for c in report.checks)
    print(f"{n}/{len(report.checks)} checks passed", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_parse(args):
    defn = load_family_file(args.file)
    data = {
        "kind": defn.kind,
        "name": defn.name,
        "parameters": [
            {"name": p.name, "lower": p.lower, "upper": p.upper, "upper_closed": p.upper_closed}
            for p in defn.parameters
        ],
        "constants": defn.constants,
        "components": [canonical_print(c) for c in defn.components],
    }
    if defn.twist is not None:
        data["twist"] = list(defn.twist)
    # unbounded parameters of minimal files cannot go to JSON as numbers
    for p in data["parameters"]:
        for key in ("lower", "upper"):
            if not math.isfinite(p[key]):
                p[key] = None
    _emit(to_json(data) + "\n", args.out)
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="qgeom", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qgeom {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt="json"):
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=("json", "csv"), default=fmt)
        p.add_argument("--h", type=float, default=None, help="finite-difference step")
        p.add_argument("--order", type=int, choices=(2, 4), default=4)
        p.add_argument("--seed", type=int, default=0)

    def family_opts(p):
        p.add_argument("--family", help="built-in family name or family file")
        p.add_argument("--const", action="append", metavar="NAME=VALUE", help="override a constant")
        p.add_argument("--convention", choices=("projective", "raw"), default="projective")

    def field_opts(p):
        p.add_argument("--assemble", metavar="G11,G22,C", help="constant assembled Lorentzian metric")
        p.add_argument("--builtin", help="built-in metric field (sphere2, polar_plane, s3_hopf, minkowski, wick)")
        p.add_argument("--chart", help="pull back the flat metric through a chart (name or file)")

    p = sub.add_parser("metric", help="quantum geometric tensor at points")
    common(p)
    family_opts(p)
    p.add_argument("--point", action="append", help="comma-separated coordinates (radians for angles)")
    p.set_defaults(func=cmd_metric)

    p = sub.add_parser("curvature", help="Riemann scan of a metric field")
    common(p)
    family_opts(p)
    field_opts(p)
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("grid", help="observables over a 1- or 2-axis grid (plot data)")
    common(p, fmt="csv")
    family_opts(p)
    field_opts(p)
    p.add_argument("--axis", action="append", metavar="NAME=MIN:MAX:COUNT")
    p.add_argument("--at", help="values of the pinned coordinates")
    p.add_argument("--observable", action="append")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("verify-paper", help="replay the Lorentzian reformulation as residual checks")
    p.add_argument("--out")
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--break-eta", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify_paper)

    p = sub.add_parser("parse", help="lint a family or chart file")
    p.add_argument("file")
    p.add_argument("--out")
    p.set_defaults(func=cmd_parse)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "tol", 1.0) <= 0:
        parser.error("--tol must be positive")
    if getattr(args, "points", 1) < 1:
        parser.error("--points must be >= 1")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
