"""``gjmslab`` command line: ``invariants``, ``gamma`` and ``verify``.

Exit codes: 0 success, 1 verification failure, 2 usage/parse/validation,
3 numeric-domain errors.  Every JSON report has the same top-level keys
(``REPORT_KEYS``); table output prints the same floats with ``repr``.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__
from .catalog import NAMES, builtin
from .conformal import conformal_bundle
from .curvature import riemann
from .dsl import load_metric
from .errors import (DimensionError, InsufficientOrderError, NotEinsteinError, ParseError, SingularPointError,
                     UnsupportedRewriteError, ValidationError, WeightRangeError)
from .green import as_half_integer, gamma_gjms
from .invariants import RICCI_FLAT_TOL, InvariantName, eval_invariant, heat_invariant
from .suites import SUITES, gamma_agreement
from .tensor import build_frame

REPORT_KEYS = ("command", "tool_version", "metric", "point", "order", "values", "verdicts", "timing")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3
USAGE_ERRORS = (ParseError, ValidationError, DimensionError)
DOMAIN_ERRORS = (SingularPointError, InsufficientOrderError, NotEinsteinError, WeightRangeError,
                 UnsupportedRewriteError)

# conformal scalars: attribute, label, weight, minimal jet order
CONFORMAL_SCALARS = (
    ("weylSq", "|W|^2", 4, 2),
    ("cubicW1", "W_ij^kl W^ij_pq W^pq_kl", 6, 2),
    ("cubicW2", "W_ijkl W^i_p^k_q W^pjql", 6, 2),
    ("cottonSq", "|C|^2", 6, 3),
    ("phi", "Phi", 6, 4),
)
INVARIANT_MIN_ORDER = {InvariantName.LapKappa: 4, InvariantName.GradRiemSq: 3}


class UsageError(ValueError):
    pass


def _value(name, value, path, partial=False):
    return {"name": name, "value": float(value) + 0.0, "formula_path": path, "partial": bool(partial)}


def _report(argv, metric=None, point=None, order=None):
    return {"command": list(argv), "tool_version": __version__, "metric": metric, "point": point,
            "order": order, "values": [], "verdicts": [], "timing": {}}


def _parse_params(items):
    out = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"--param expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _parse_point(text, dim):
    try:
        pt = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"--point must be comma-separated numbers: {exc}") from None
    if len(pt) != dim:
        raise DimensionError(f"--point has {len(pt)} coordinates, metric has dimension {dim}")
    return pt


def _resolve_metric(args):
    spec = args.metric
    params = _parse_params(args.param)
    if spec.startswith("builtin:"):
        entry = builtin(spec[len("builtin:"):], args.dim, params, points=1)
        field = entry.field
        identity = {"kind": "builtin", "name": field.name}
    else:
        try:
            field = load_metric(spec)
        except OSError as exc:
            raise UsageError(f"cannot read metric file {spec!r}: {exc.strerror}") from None
        if params:
            unknown = set(params) - set(field.params)
            if unknown:
                raise ValidationError(f"file declares no parameter(s) {sorted(unknown)}")
            try:
                override = {k: float(v) for k, v in params.items()}
            except ValueError:
                raise UsageError("file parameters must be numbers") from None
            field = dataclasses.replace(field, params={**field.params, **override})
        if args.dim is not None and args.dim != field.dim:
            raise DimensionError(f"--dim {args.dim} disagrees with the file's dimension {field.dim}")
        identity = {"kind": "file", "name": field.name, "path": spec}
    return field, identity


def _weights(text):
    try:
        ws = sorted({int(w) for w in text.split(",") if w.strip()})
    except ValueError:
        raise UsageError(f"--weights must be integers, got {text!r}") from None
    bad = [w for w in ws if w not in (0, 2, 4, 6)]
    if bad:
        raise WeightRangeError(f"weights must be among 0,2,4,6, got {bad}")
    return ws


def cmd_invariants(args, argv):
    t0 = time.perf_counter()
    field, identity = _resolve_metric(args)
    point = _parse_point(args.point, field.dim)
    weights = _weights(args.weights)
    rep = _report(argv, identity, point, args.order)
    frame = build_frame(field, point, args.order)
    bundle = riemann(frame)
    t1 = time.perf_counter()
    vals = rep["values"]
    for name in InvariantName:
        if name.weight in weights:
            need = INVARIANT_MIN_ORDER.get(name, 2)
            if args.order < need:
                raise InsufficientOrderError(f"{name.label} needs --order >= {need}")
            vals.append(_value(name.label, eval_invariant(name, bundle), "riemannian_invariant"))
    ricci_flat = args.order >= 6 and bundle.ricci_vanishes(RICCI_FLAT_TOL, to_order=4)
    for w in weights:
        h = heat_invariant(w // 2, bundle, ricci_flat_mode=(w == 6 and ricci_flat))
        vals.append(_value(f"a{w}", h.value, h.formula_path, h.partial))
    if field.dim >= 3 and any(w >= 4 for w in weights):
        cb = conformal_bundle(bundle)
        for attr, label, w, need in CONFORMAL_SCALARS:
            if w in weights and args.order >= need:
                vals.append(_value(label, cb.quantity(attr), "conformal_tensor"))
    rep["verdicts"].append({"name": "ricci_flat_certified", "passed": bool(ricci_flat), "kind": "property"})
    rep["timing"] = {"frame_s": t1 - t0, "total_s": time.perf_counter() - t0}
    return rep, EXIT_OK


def cmd_gamma(args, argv):
    t0 = time.perf_counter()
    field, identity = _resolve_metric(args)
    point = _parse_point(args.point, field.dim)
    try:
        k = Fraction(args.k)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--k must be a number such as 3 or 5/2, got {args.k!r}") from None
    k = as_half_integer(k)
    rep = _report(argv, identity, point, args.order)
    bundle = riemann(build_frame(field, point, args.order))
    g = gamma_gjms(k, bundle)
    rep["values"].append(_value(f"gamma[P_{k}]", g.value, g.formula_path.value, g.partial_flag)
                         | {"expression": g.expression})
    weight = field.dim - 2 * k
    # the Riemannian path is only the same quantity when Ric vanishes far enough
    ricci_flat = (weight < 6 or args.order >= 6) and bundle.ricci_vanishes(
        RICCI_FLAT_TOL, to_order=min(4, args.order - 2))
    if ricci_flat:
        gh, gc, ok = gamma_agreement(k, bundle, ricci_flat_mode=weight == 6)
        rep["values"].append(_value(f"gamma[Delta^{k}]", gh.value, gh.formula_path.value, gh.partial_flag)
                             | {"expression": gh.expression})
        rep["verdicts"].append({"name": "formula_paths_agree", "passed": bool(ok),
                                "abs_difference": abs(gh.value - gc.value)})
    rep["timing"] = {"total_s": time.perf_counter() - t0}
    return rep, EXIT_OK


def cmd_verify(args, argv):
    t0 = time.perf_counter()
    rep = _report(argv, None, None, None)
    checks = SUITES[args.suite]()
    rep["verdicts"] = [c.as_dict() for c in checks]
    passed = sum(c.passed for c in checks)
    rep["values"].append(_value("checks_passed", passed, f"verify:{args.suite}"))
    rep["values"].append(_value("checks_total", len(checks), f"verify:{args.suite}"))
    rep["timing"] = {"total_s": time.perf_counter() - t0}
    return rep, EXIT_OK if passed == len(checks) else EXIT_FAIL


def render_table(rep, out):
    w = out.write
    w(f"gjmslab {rep['tool_version']}  {' '.join(rep['command'])}\n")
    if rep["metric"] is not None:
        w(f"metric: {rep['metric']['name']}  point: {rep['point']}  order: {rep['order']}\n")
    if rep["values"]:
        width = max(len(v["name"]) for v in rep["values"])
        for v in rep["values"]:
            flag = "  PARTIAL" if v["partial"] else ""
            w(f"  {v['name']:<{width}}  {v['value']!r:>24}  [{v['formula_path']}]{flag}\n")
    for c in rep["verdicts"]:
        if c.get("kind") == "property":
            w(f"  {c['name']}: {'yes' if c['passed'] else 'no'}\n")
            continue
        status = "PASS" if c["passed"] else "FAIL"
        extra = f"  value={c['value']!r} target={c['target']!r}" if "target" in c else ""
        w(f"  {status}  {c['name']}{extra}\n")
    w(f"time: {rep['timing'].get('total_s', 0.0):.3f} s\n")


def build_parser():
    p = argparse.ArgumentParser(prog="gjmslab", description="Local invariants and GJMS Green-function constants.")
    p.add_argument("--version", action="version", version=f"gjmslab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def metric_flags(sp):
        sp.add_argument("--metric", required=True, help=f"builtin:<name> ({', '.join(NAMES)}) or a metric file")
        sp.add_argument("--dim", type=int, default=None)
        sp.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
        sp.add_argument("--point", required=True, help="comma-separated coordinates")
        sp.add_argument("--order", type=int, default=6, help="jet order (default 6)")
        sp.add_argument("--format", choices=("table", "json"), default="table")

    inv = sub.add_parser("invariants", help="curvature, heat and conformal scalars at a point")
    metric_flags(inv)
    inv.add_argument("--weights", default="0,2,4,6")
    inv.set_defaults(func=cmd_invariants)

    gam = sub.add_parser("gamma", help="Green-function log coefficient of P_k")
    metric_flags(gam)
    gam.add_argument("--k", required=True)
    gam.set_defaults(func=cmd_gamma)

    ver = sub.add_parser("verify", help="run a verification suite")
    ver.add_argument("suite", choices=sorted(SUITES))
    ver.add_argument("--format", choices=("table", "json"), default="table")
    ver.set_defaults(func=cmd_verify)
    return p


def main(argv=None, out=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        rep, code = args.func(args, argv)
    except (UsageError, *USAGE_ERRORS) as exc:
        print(f"gjmslab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DOMAIN_ERRORS as exc:
        print(f"gjmslab: numeric error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    if args.format == "json":
        json.dump(rep, out, indent=2, default=_json_default)
        out.write("\n")
    else:
        render_table(rep, out)
    return code


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, Fraction):
        return str(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


if __name__ == "__main__":
    sys.exit(main())
