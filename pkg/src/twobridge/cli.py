"""Command-line interface.

Subcommands: identity, cusp, longitude, endinv, batch.  Slopes are written
"q/p"; outputs are JSON by default, CSV for tables, SVG for cusp pictures.
Exit codes: 0 success, 1 usage/other error, 2 non-hyperbolic slope,
3 ambiguous geometric-root selection.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import cusp_layout, endinvariants, mcshane, plat
from .errors import (
    AmbiguousGeometricRootError,
    NonHyperbolicError,
    SlopeError,
    TwoBridgeError,
)
from .markoff import geometric_evaluation, translation_length
from .slopes import Slope, is_hyperbolic

CSV_SCHEMA_VERSION = 1


def _write(text: str, path: str | None):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _census_csv(report) -> str:
    rows = ["schema,slope,phi_re,phi_im,l_re,l_im,h_re,h_im"]
    for s, v in report.slopes_small_trace:
        try:
            l = translation_length(v).value
        except TwoBridgeError:
            l = complex("nan")
        try:
            hv = mcshane.h(v)
        except TwoBridgeError:
            hv = complex("nan")
        rows.append("%d,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g"
                    % (CSV_SCHEMA_VERSION, s, v.real, v.imag,
                       l.real, l.imag, hv.real, hv.imag))
    return "\n".join(rows) + "\n"


def cmd_identity(args) -> int:
    r = Slope.parse(args.r)
    report = mcshane.cusp_shape(r, eps=args.eps, max_depth=args.depth,
                                precision=args.precision)
    if args.format == "csv":
        _write(_census_csv(report), args.out)
    else:
        _write(json.dumps(report.to_json(), indent=2), args.out)
    ok = (report.identity_residual <= 1e-6
          and report.finite_identity_residual <= 1e-9
          and not report.partial)
    return 0 if ok else 1


def cmd_cusp(args) -> int:
    r = Slope.parse(args.r)
    ev = geometric_evaluation(r, precision=args.precision)
    layout = cusp_layout.layout_cusp(r, ev)
    fold = cusp_layout.check_simply_folded(layout, r)
    doc = layout.to_json()
    doc["folds_ok"] = fold["ok"]
    doc["fold_slopes"] = [str(layout.fold_minus.fold_slope),
                          str(layout.fold_plus.fold_slope)]
    if args.out:
        svg = cusp_layout.render_svg(layout, {"periods": args.periods})
        with open(args.out, "w") as fh:
            fh.write(svg)
        doc["svg_written_to"] = args.out
    if args.format == "svg":
        _write(cusp_layout.render_svg(layout, {"periods": args.periods}),
               None if args.out else None)
        return 0
    _write(json.dumps(doc, indent=2), None)
    return 0


def cmd_longitude(args) -> int:
    r = Slope.parse(args.r)
    doc = plat.longitude_json(r, orientation=args.orientation)
    _write(json.dumps(doc, indent=2), args.out)
    return 0 if doc["lk_formula"] == doc["lk_diagram"] else 1


def cmd_endinv(args) -> int:
    r = Slope.parse(args.r)
    report = endinvariants.bowditch_L(r, depth=args.depth)
    if args.format == "svg":
        _write(endinvariants.render_gaps_svg(report.gap_system), args.out)
        return 0
    _write(json.dumps(report.to_json(), indent=2), args.out)
    return 0


def _batch_rows(pmax, eps, depth):
    for p in range(3, pmax + 1):
        for q in range(1, p):
            if math.gcd(q, p) != 1:
                continue
            r = Slope(q, p)
            if not is_hyperbolic(r):
                continue
            report = mcshane.cusp_shape(r, eps=eps, max_depth=depth)
            lk = plat.linking_number_formula(r)
            lk_diag = plat.linking_number_diagram(r)
            case = endinvariants.bowditch_L(r, depth=0).case
            yield {
                "schema": CSV_SCHEMA_VERSION,
                "r": str(r),
                "q": q,
                "p": p,
                "components": report.components,
                "lambda_link_re": report.lambda_link.real,
                "lambda_link_im": report.lambda_link.imag,
                "lk_formula": lk,
                "lk_diagram": lk_diag,
                "identity_residual": report.identity_residual,
                "tail_bound": report.tail_bound_1 + report.tail_bound_2,
                "end_invariant_case": case,
            }


_BATCH_COLUMNS = ("schema", "r", "q", "p", "components", "lambda_link_re",
                  "lambda_link_im", "lk_formula", "lk_diagram",
                  "identity_residual", "tail_bound", "end_invariant_case")


def cmd_batch(args) -> int:
    rows = list(_batch_rows(args.pmax, args.eps, args.depth))
    if args.format == "json":
        _write(json.dumps(rows, indent=2), args.out)
        return 0
    lines = [",".join(_BATCH_COLUMNS)]
    for row in rows:
        cells = []
        for col in _BATCH_COLUMNS:
            val = row[col]
            cells.append("%.17g" % val if isinstance(val, float) else str(val))
        lines.append(",".join(cells))
    _write("\n".join(lines) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twobridge",
        description="Cusp shapes, trace identities and end invariants of "
                    "hyperbolic 2-bridge links.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt=("json",)):
        p.add_argument("r", help='slope "q/p" with 0 < q/p < 1')
        p.add_argument("--out", "-o", default=None, help="output path")
        if fmt:
            p.add_argument("--format", choices=fmt, default=fmt[0])

    p = sub.add_parser("identity", help="McShane-type identity and cusp moduli")
    common(p, ("json", "csv"))
    p.add_argument("--eps", type=float, default=mcshane.DEFAULT_EPS)
    p.add_argument("--depth", type=int, default=mcshane.DEFAULT_MAX_DEPTH)
    p.add_argument("--precision", choices=("double", "extended"), default="double")
    p.set_defaults(func=cmd_identity)

    p = sub.add_parser("cusp", help="cusp triangulation zigzag layout and SVG")
    common(p, ("json", "svg"))
    p.add_argument("--periods", type=int, default=2)
    p.add_argument("--precision", choices=("double", "extended"), default="double")
    p.set_defaults(func=cmd_cusp)

    p = sub.add_parser("longitude", help="longitude homology class and linking numbers")
    common(p, ("json",))
    p.add_argument("--orientation", choices=("default", "reversed"),
                   default="default")
    p.set_defaults(func=cmd_longitude)

    p = sub.add_parser("endinv", help="end-invariant classification and gap system")
    common(p, ("json", "svg"))
    p.add_argument("--depth", type=int, default=6)
    p.set_defaults(func=cmd_endinv)

    p = sub.add_parser("batch", help="one row per hyperbolic slope up to --pmax")
    p.add_argument("--pmax", type=int, required=True)
    p.add_argument("--eps", type=float, default=mcshane.DEFAULT_EPS)
    p.add_argument("--depth", type=int, default=mcshane.DEFAULT_MAX_DEPTH)
    p.add_argument("--out", "-o", default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_batch)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NonHyperbolicError as exc:
        print("error: %s (need q != +-1 mod p)" % exc, file=sys.stderr)
        return 2
    except AmbiguousGeometricRootError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 3
    except (SlopeError, TwoBridgeError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
