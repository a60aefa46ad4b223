"""Command-line front end: ``fcreduce reduce | series | verify``."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .algebra import as_rational, parse
from .errors import EvaluationFailure, ExceptionalParameter, FcError, ParseError, PoleInParameter
from .reduction import PARAM_NAMES, ParameterVector, ReductionResult, ShiftVector, index_change
from .series import (
    DERIV_MODES,
    TRUNCATIONS,
    convergence_check,
    fc_series,
    fc_series_deriv,
    verify_reduction,
)
from .theta import BASIS_LABELS

EXIT_OK, EXIT_FAILED, EXIT_PARSE, EXIT_EXCEPTIONAL, EXIT_EVAL = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _split(text, n, what):
    items = [s.strip() for s in text.split(",")]
    if len(items) != n or not all(items):
        raise ParseError(f"{what} needs {n} comma-separated entries, got {text!r}")
    return items


def _bindings(items):
    out = {}
    for item in items or ():
        for part in item.split(","):
            name, sep, value = part.partition("=")
            if not sep or not name.strip():
                raise ParseError(f"binding must look like name=value, got {part!r}")
            out[name.strip()] = as_rational(parse(value.strip()))
    return out


def _params(text, bindings):
    pv = ParameterVector.of(_split(text, 5, "--params"))
    return pv.subs(bindings) if bindings else pv


def _z(text):
    return tuple(parse(s) for s in _split(text, 3, "--z"))


def _fmt(value):
    return f"{float(value):.15g}"


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fcreduce", description="Differential reduction and series evaluation of F_C.")
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p):
        p.add_argument("--params", default=",".join(PARAM_NAMES),
                       help="a,b,c1,c2,c3 as exact expressions (default: symbolic)")
        p.add_argument("--bind", action="append", metavar="NAME=VALUE",
                       help="substitute a rational for a symbol, e.g. eps=1/10")
        p.add_argument("--format", choices=("json", "text"), default="text")

    p = sub.add_parser("reduce", help="express F_C(params) through F_C(params + shift)")
    p.add_argument("--shift", required=True, help="n_a,n_b,m1,m2,m3")
    common(p)

    p = sub.add_parser("series", help="evaluate the truncated series")
    p.add_argument("--z", required=True, help="z1,z2,z3")
    p.add_argument("--order", type=int, default=10,
                   help="each summation index runs from 0 to ORDER (box truncation)")
    p.add_argument("--truncation", choices=TRUNCATIONS, default="box")
    p.add_argument("--deriv", default="0,0,0", help="derivative orders d1,d2,d3")
    p.add_argument("--deriv-mode", choices=DERIV_MODES, default="d",
                   help="d: series of the derivative; termwise: derivative of the "
                        "truncated series; theta: z_i d/dz_i")
    common(p)

    p = sub.add_parser("verify", help="check a reduction numerically against the series")
    p.add_argument("--shift", help="n_a,n_b,m1,m2,m3 (reduce first)")
    p.add_argument("--result", help="JSON file holding a stored reduction result")
    p.add_argument("--z", action="append", required=True, help="sample point z1,z2,z3 (repeatable)")
    p.add_argument("--order", type=int, default=30)
    p.add_argument("--tol", type=float, default=1e-8)
    common(p)
    return parser


def _reduce(args, out):
    bindings = _bindings(args.bind)
    result = index_change(ShiftVector.of(args.shift), _params(args.params, bindings))
    if args.format == "json":
        out.write(result.to_json() + "\n")
    else:
        for label, q in zip(BASIS_LABELS, result.Q.coeffs):
            out.write(f"Q[{label}] = {q}\n")
        out.write(f"newParams = {result.new_params}\n")
    return EXIT_OK


def _series(args, out):
    bindings = _bindings(args.bind)
    params = _params(args.params, bindings)
    z = _z(args.z)
    deriv = tuple(int(d) for d in _split(args.deriv, 3, "--deriv"))
    if any(deriv):
        value = fc_series_deriv(params, z, args.order, deriv, mode=args.deriv_mode,
                                truncation=args.truncation, bindings=bindings)
    else:
        value = fc_series(params, z, args.order, truncation=args.truncation, bindings=bindings)
    zvals = [as_rational(v.subs(bindings)) for v in z]
    convergent = convergence_check(zvals)
    if args.format == "json":
        doc = {"value": float(value), "convergent": convergent}
        if isinstance(value, Fraction):
            doc["exact"] = str(value)
        out.write(json.dumps(doc) + "\n")
    else:
        out.write(_fmt(value) + "\n")
        if not convergent:
            sys.stderr.write("note: sqrt(z1)+sqrt(z2)+sqrt(z3) >= 1\n")
    return EXIT_OK


def _verify(args, out):
    bindings = _bindings(args.bind)
    params = _params(args.params, bindings)
    if (args.shift is None) == (args.result is None):
        raise UsageError("verify needs exactly one of --shift or --result")
    if args.result:
        with open(args.result, encoding="utf-8") as fh:
            result = ReductionResult.from_json(fh.read())
    else:
        result = index_change(ShiftVector.of(args.shift), params)
    points = [_z(text) for text in args.z]
    report = verify_reduction(result, params, points, args.order, args.tol, bindings=bindings)
    if args.format == "json":
        out.write(json.dumps(report.to_dict()) + "\n")
    else:
        for p in report.points:
            zs = ", ".join(str(v) for v in p.z)
            if p.error:
                out.write(f"({zs}): error {p.error}\n")
            else:
                mark = "ok" if p.passed else "FAIL"
                out.write(f"({zs}): lhs={_fmt(p.lhs)} rhs={_fmt(p.rhs)} rel={p.rel_dev:.3g} {mark}\n")
        out.write("passed\n" if report.passed else "failed\n")
    if any(p.error for p in report.points):
        return EXIT_EVAL
    return EXIT_OK if report.passed else EXIT_FAILED


def _error(kind, message, out, **extra):
    doc = {"error": {"type": kind, "message": message, **extra}}
    out.write(json.dumps(doc) + "\n")


_VALUE_FLAGS = ("--shift", "--params", "--z", "--deriv", "--bind")


def _glue_negative(argv):
    # argparse takes "-1,0,..." for an option; bind it to its flag explicitly
    out, items = [], iter(argv)
    for tok in items:
        if tok in _VALUE_FLAGS:
            nxt = next(items, None)
            if nxt is not None and nxt.startswith("-"):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
        else:
            out.append(tok)
    return out


def run_cli(argv=None, out=None) -> int:
    """Run the CLI and return the exit status."""
    out = out or sys.stdout
    argv = _glue_negative(sys.argv[1:] if argv is None else list(argv))
    try:
        args = build_parser().parse_args(argv)
        return {"reduce": _reduce, "series": _series, "verify": _verify}[args.verb](args, out)
    except (UsageError, ParseError, ValueError, KeyError) as exc:
        if isinstance(exc, FcError):
            out.write(json.dumps({"error": exc.to_dict()}) + "\n")
        else:
            _error("UsageError", str(exc).strip("'\""), out)
        return EXIT_PARSE
    except ExceptionalParameter as exc:
        out.write(json.dumps({"error": exc.to_dict()}) + "\n")
        return EXIT_EXCEPTIONAL
    except (EvaluationFailure, PoleInParameter, ZeroDivisionError, FcError) as exc:
        doc = exc.to_dict() if isinstance(exc, FcError) else {"type": "EvaluationFailure", "message": str(exc)}
        out.write(json.dumps({"error": doc}) + "\n")
        return EXIT_EVAL
    except OSError as exc:
        _error("IOError", str(exc), out)
        return EXIT_PARSE


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
