"""Command-line front end: solve, sqrt-solve, newton-sums, recover,
composed-product, bench, selftest.

Exit codes: 0 ok, 1 parse error, 2 precondition violation, 3 the solution is
not p-integral (the failing t-degree is printed).
"""

import argparse
import re
import sys

from . import apps, pseries, solver
from .apps import MonicPoly, NewtonSeries
from .errors import NonIntegralCoefficient, PadicError
from .pseries import (PolynomialRhs, RationalRhs, SqrtRationalRhs, TruncSeries,
                      from_text, to_text)
from .zpfixed import PadicContext

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_PRECONDITION = 2
EXIT_NONINTEGRAL = 3


class CliParseError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; route through CliParseError
    # so flag problems report as parse errors (exit 1) instead.
    def error(self, message):
        raise CliParseError(message)


def _int_list(text):
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise CliParseError(f"expected a comma-separated integer list, got {text!r}") from None


_TERM_RE = re.compile(r"^([+-]?)(?:(\d+)\*?)?(t(?:\^(\d+))?)?$")


def _parse_poly_text(text):
    """Little-endian coefficients of an integer polynomial in t, written with
    +, -, optional '*', and '^' powers, e.g. '1', '5t^4', '1-t+2t^3'."""
    s = text.replace(" ", "")
    if not s:
        raise CliParseError("empty polynomial")
    coeffs = {}
    for term in re.findall(r"[+-]?[^+-]+", s):
        m = _TERM_RE.match(term)
        if not m or (m.group(2) is None and m.group(3) is None):
            raise CliParseError(f"bad polynomial term {term!r}")
        value = int(m.group(2)) if m.group(2) else 1
        if m.group(1) == "-":
            value = -value
        if m.group(3):
            power = int(m.group(4)) if m.group(4) else 1
        else:
            power = 0
        coeffs[power] = coeffs.get(power, 0) + value
    out = [0] * (max(coeffs) + 1)
    for power, value in coeffs.items():
        out[power] = value
    return out


def _strip_parens(s):
    while s.startswith("(") and s.endswith(")"):
        depth = 0
        for i, ch in enumerate(s):
            depth += ch == "("
            depth -= ch == ")"
            if depth == 0 and i < len(s) - 1:
                return s
        s = s[1:-1]
    return s


def _split_fraction(s):
    depth = 0
    for i, ch in enumerate(s):
        depth += ch == "("
        depth -= ch == ")"
        if ch == "/" and depth == 0:
            return s[:i], s[i + 1:]
    return s, None


def _inline_series(expr, ctx, order):
    num_text, den_text = _split_fraction(expr.replace(" ", ""))
    num = _parse_poly_text(_strip_parens(num_text))
    series = TruncSeries(ctx, num, order=order)
    if den_text is not None:
        den = _parse_poly_text(_strip_parens(den_text))
        series = series * TruncSeries(ctx, den, order=order).invert()
    return series


def _series_source(value, ctx, order):
    """A series from 'inline:<poly or poly/poly>' or from a text-format file;
    a file must match the planned context and carry enough coefficients."""
    if value.startswith("inline:"):
        return _inline_series(value[len("inline:"):], ctx, order)
    try:
        with open(value, "r", encoding="ascii") as stream:
            text = stream.read()
    except OSError as exc:
        raise CliParseError(f"cannot read series file {value!r}: {exc}") from None
    try:
        series = from_text(text)
    except ValueError as exc:
        raise CliParseError(f"bad series file {value!r}: {exc}") from None
    if series.ctx != ctx:
        raise ValueError(
            f"series file is over {series.ctx.p}^{series.ctx.prec}, "
            f"the plan needs {ctx.p}^{ctx.prec}")
    if series.order < order:
        raise ValueError(f"series file has order {series.order}, need {order}")
    return series.truncate(order)


def _parse_rhs(text):
    kind, sep, payload = text.partition(":")
    if not sep:
        raise CliParseError(f"right-hand side must look like 'poly:...', got {text!r}")
    if kind == "poly":
        return PolynomialRhs(_int_list(payload))
    if kind in ("rat", "sqrtrat"):
        num_text, sep, den_text = payload.partition("/")
        if not sep:
            raise CliParseError(f"'{kind}:' needs P/Q, got {payload!r}")
        num, den = _int_list(num_text), _int_list(den_text)
        return RationalRhs(num, den) if kind == "rat" else SqrtRationalRhs(num, den)
    raise CliParseError(f"unknown right-hand-side kind {kind!r}")


def _emit(args, text):
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="ascii") as stream:
            stream.write(text)
    else:
        sys.stdout.write(text)


def _cmd_solve(args):
    budget = solver.plan(args.kappa, args.n, args.p)
    ctx = budget.context()
    g = _series_source(args.g, ctx, args.n)
    h = _parse_rhs(args.h)
    if args.command == "sqrt-solve":
        y = apps.solve_separated_square(g, h, args.n)
    else:
        y = solver.solve_separated(g, h, args.n)
    out = y.reduce_precision(budget.kappa)
    _emit(args, to_text(out) + f"guaranteed_precision: {args.p}^{budget.kappa}\n")
    return EXIT_OK


def _cmd_newton_sums(args):
    ctx = PadicContext(args.p, args.kappa)
    f = MonicPoly.from_coeff_list(ctx, _int_list(args.f))
    sums = apps.newton_series(f, args.n)
    _emit(args, to_text(sums.series) + f"guaranteed_precision: {args.p}^{args.kappa}\n")
    return EXIT_OK


def _cmd_recover(args):
    if args.sums.startswith("inline:"):
        if args.p is None or args.kappa is None:
            raise CliParseError("inline sums need --p and --kappa")
        budget = solver.plan(args.kappa, args.d, args.p)
        ctx = budget.context()
        series = _inline_series(args.sums[len("inline:"):], ctx, args.d)
    else:
        series = _series_source_any(args.sums)
        if series.order < args.d:
            raise ValueError(f"need {args.d} power sums, file has {series.order}")
        series = series.truncate(args.d)
        ctx = series.ctx
    poly = apps.recover_from_newton_series(NewtonSeries(series, args.d), args.d)
    guarantee = apps.recovery_guarantee(ctx, args.d)
    _emit(args, ",".join(str(c) for c in poly.coeff_list()) + "\n"
          + f"guaranteed_precision: {ctx.p}^{guarantee}\n")
    return EXIT_OK


def _series_source_any(path):
    try:
        with open(path, "r", encoding="ascii") as stream:
            text = stream.read()
    except OSError as exc:
        raise CliParseError(f"cannot read series file {path!r}: {exc}") from None
    try:
        return from_text(text)
    except ValueError as exc:
        raise CliParseError(f"bad series file {path!r}: {exc}") from None


def _cmd_composed_product(args):
    ctx = PadicContext(args.p, 1)
    f = MonicPoly.from_coeff_list(ctx, _int_list(args.f))
    g = MonicPoly.from_coeff_list(ctx, _int_list(args.g))
    product = apps.composed_product(f, g)
    _emit(args, ",".join(str(c) for c in product.coeff_list()) + "\n")
    return EXIT_OK


def _cmd_bench(args):
    m_list = _int_list(args.m)
    if args.dry_run:
        lines = []
        for m in m_list:
            budget = solver.plan(1, 4 * m, args.p)
            lines.append(f"m={m} lambda_old={budget.naive_prec} "
                         f"lambda_new={budget.prec}")
        _emit(args, "\n".join(lines) + "\n")
        return EXIT_OK
    if args.out:
        apps.bench_isogeny(m_list, p=args.p, out=args.out, parallel=args.parallel)
    else:
        apps.bench_isogeny(m_list, p=args.p, out=sys.stdout, parallel=args.parallel)
    return EXIT_OK


def _selftest_checks():
    from fractions import Fraction

    def fixed_division():
        ctx = PadicContext(5, 3)
        return (ctx.elt(10) / ctx.elt(5) == 2
                and ctx.elt(5) / ctx.elt(10) == 13
                and (ctx.elt(120) + ctx.elt(10)).rep == 5)

    def series_inverse():
        ctx = PadicContext(7, 1)
        inv = ctx.series([1, 2], order=3).invert()
        return inv.coeffs == (1, 5, 4)

    def series_sqrt():
        ctx = PadicContext(5, 2)
        root = ctx.series([1, 1], order=3).sqrt_unit()
        return root.coeffs == (1, 13, 3) and (root * root).coeffs == (1, 1, 0)

    def composition():
        ctx = PadicContext(7, 1)
        out = RationalRhs([1], [1, -1]).compose(ctx.series([0, 1, 1], order=4))
        return out.coeffs == (1, 1, 2, 3)

    def newton_update():
        ctx = PadicContext(5, 3)
        g = TruncSeries.constant(ctx, 1, 3)
        u = ctx.series([0, 1], order=2)
        stepped = solver.newton_step(g, PolynomialRhs([1, 2, 1]), u, 3)
        return stepped.coeffs == (0, 1, 1, 1)

    def fixed_point_solve():
        ctx = PadicContext(5, 3)
        g = ctx.series([1, 1], order=8).invert()
        y = solver.solve_separated(g, PolynomialRhs([1, 1]), 8)
        return y.coeffs == (0, 1) + (0,) * 7

    def precision_plan():
        budget = solver.plan(1, 417124, 5)
        return budget.prec == 9 and budget.naive_prec == 72

    def power_sums():
        ctx = PadicContext(7, 2)
        sums = apps.newton_series(MonicPoly.from_coeff_list(ctx, [2, -3, 1]), 4)
        return sums.series.coeffs == (3, 5, 9, 17)

    def composed():
        ctx = PadicContext(5, 1)
        product = apps.composed_product(MonicPoly.from_coeff_list(ctx, [4, 0, 1]),
                                        MonicPoly.from_coeff_list(ctx, [3, 1]))
        return product.coeff_list() == [1, 0, 1]

    def isogeny_smallest():
        ctx = PadicContext(5, 1)
        g, h = apps.isogeny_instance(1, ctx, 4)
        y = apps.solve_separated_square(g, h, 4)
        return y.coeffs == (0, 1, 0, 0, 0)

    return [
        ("fixed-precision division", fixed_division),
        ("series inverse", series_inverse),
        ("series square root", series_sqrt),
        ("rational composition", composition),
        ("newton update", newton_update),
        ("fixed point y = t", fixed_point_solve),
        ("precision plan 417124", precision_plan),
        ("power sums", power_sums),
        ("composed product", composed),
        ("isogeny equation m=1", isogeny_smallest),
    ]


def _cmd_selftest(args):
    failures = 0
    for name, check in _selftest_checks():
        try:
            good = check()
        except Exception as exc:  # a crash is a failure, keep going
            good = False
            print(f"FAIL {name}: {exc}")
        else:
            print(("ok  " if good else "FAIL ") + name)
        failures += not good
    print(f"{'all good' if not failures else f'{failures} failing'}")
    return EXIT_OK if not failures else EXIT_PRECONDITION


def _build_parser():
    parser = _Parser(prog="padode",
                     description="p-adic differential equations with separation "
                                 "of variables, at minimal working precision")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    for name, blurb in (("solve", "solve y' = g*h(y), y(0)=0"),
                        ("sqrt-solve", "solve (y')^2 = g*h(y), y(0)=0, p != 2")):
        cmd = sub.add_parser(name, help=blurb)
        cmd.add_argument("--p", type=int, required=True)
        cmd.add_argument("--kappa", type=int, required=True,
                         help="guaranteed output digits")
        cmd.add_argument("--n", type=int, required=True,
                         help="output is printed mod t^(n+1)")
        cmd.add_argument("--g", required=True,
                         help="series file, or inline:<poly[/poly]> in t")
        cmd.add_argument("--h", required=True,
                         help="poly:c0,c1,... | rat:P/Q | sqrtrat:P/Q")
        cmd.add_argument("--out", help="write output to this file")
        cmd.set_defaults(func=_cmd_solve)

    cmd = sub.add_parser("newton-sums", help="power-sum series of a monic polynomial")
    cmd.add_argument("--p", type=int, required=True)
    cmd.add_argument("--kappa", type=int, required=True)
    cmd.add_argument("--n", type=int, required=True)
    cmd.add_argument("--f", required=True, help="full coefficient list, monic")
    cmd.add_argument("--out")
    cmd.set_defaults(func=_cmd_newton_sums)

    cmd = sub.add_parser("recover", help="monic polynomial from its power sums")
    cmd.add_argument("--p", type=int)
    cmd.add_argument("--kappa", type=int)
    cmd.add_argument("--d", type=int, required=True)
    cmd.add_argument("--sums", required=True,
                     help="series file (context taken from it), or inline:<...>")
    cmd.add_argument("--out")
    cmd.set_defaults(func=_cmd_recover)

    cmd = sub.add_parser("composed-product",
                         help="polynomial whose roots are products of roots")
    cmd.add_argument("--p", type=int, required=True)
    cmd.add_argument("--f", required=True)
    cmd.add_argument("--g", required=True)
    cmd.add_argument("--out")
    cmd.set_defaults(func=_cmd_composed_product)

    cmd = sub.add_parser("bench", help="timing comparison of the two precision budgets")
    cmd.add_argument("--p", type=int, default=5)
    cmd.add_argument("--m", required=True, help="comma-separated list of m values")
    cmd.add_argument("--out", help="CSV path (default: stdout)")
    cmd.add_argument("--dry-run", action="store_true",
                     help="print both precisions per m, no solving")
    cmd.add_argument("--parallel", action="store_true")
    cmd.set_defaults(func=_cmd_bench)

    cmd = sub.add_parser("selftest", help="run the built-in example checks")
    cmd.set_defaults(func=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except CliParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NonIntegralCoefficient as exc:
        print(f"error: solution is not p-integral at degree {exc.degree}",
              file=sys.stderr)
        return EXIT_NONINTEGRAL
    except (PadicError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
