"""Consumers of the solver: power-sum series and polynomial recovery,
composed products over F_p, and the square-root equation (y')^2 = g * h(y)
with its precision benchmark."""

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .errors import BadConstantTerm, ContextMismatch, EvenPrime, InvalidInput
from .pseries import (OpaqueRhs, PolynomialRhs, RationalRhs, Rhs,
                      SqrtRationalRhs, TruncSeries)
from .solver import floor_log, plan, solve_separated
from .zpfixed import PadicContext


@dataclass(frozen=True)
class MonicPoly:
    """A monic polynomial: the degree-many low coefficients, leading 1 implicit."""

    ctx: PadicContext
    low: tuple

    def __post_init__(self):
        object.__setattr__(self, "low",
                           tuple(self.ctx.reduce(c) for c in self.low))

    @classmethod
    def from_coeff_list(cls, ctx, coeffs):
        """Little-endian full coefficient list; the last entry must reduce to 1."""
        coeffs = list(coeffs)
        if not coeffs or ctx.reduce(coeffs[-1]) != 1 % ctx.modulus:
            raise InvalidInput("coefficient list is not monic")
        return cls(ctx, tuple(coeffs[:-1]))

    @property
    def degree(self) -> int:
        return len(self.low)

    def coeff_list(self):
        return [*self.low, 1]

    def with_context(self, ctx):
        """The same representatives reduced into another ring of the same p
        (the canonical lift when prec grows, plain reduction when it shrinks)."""
        if ctx.p != self.ctx.p:
            raise ContextMismatch("different primes")
        return MonicPoly(ctx, self.low)

    def reversal_series(self, order) -> TruncSeries:
        """x^degree * f(1/x) as a series mod t^order; constant term 1 by
        monicity."""
        rev = [1, *reversed(self.low)]
        return TruncSeries(self.ctx, rev, order=order)

    def __repr__(self):
        return f"MonicPoly({self.ctx.p}^{self.ctx.prec}, {self.coeff_list()})"


@dataclass(frozen=True)
class NewtonSeries:
    """Power sums of a monic polynomial's roots as a series, shifted by one:
    coefficient k is the (k+1)-st power sum. `degree` is the source degree."""

    series: TruncSeries
    degree: int


def newton_series(f: MonicPoly, n: int) -> NewtonSeries:
    """First n power-sum coefficients, read off the logarithmic derivative:
    with r = x^d f(1/x), r' = -(power sum series) * r."""
    rev = f.reversal_series(n + 1)
    series = -(rev.derivative() * rev.invert())
    return NewtonSeries(series, f.degree)


def recover_from_newton_series(newton: NewtonSeries,
                               degree: int | None = None) -> MonicPoly:
    """The monic polynomial with the given power sums, correct modulo
    p^(prec - floor_log(p, degree)).

    The reversed polynomial r satisfies r' = -(sums) * r with r(0) = 1;
    substituting r = 1 + z gives the solver's shape z' = (-sums) * (1 + z).
    Inconsistent sums surface as NonIntegralCoefficient.
    """
    d = newton.degree if degree is None else degree
    series = newton.series
    if series.order < d:
        raise ValueError(f"need {d} power sums, have {series.order}")
    ctx = series.ctx
    if d == 0:
        return MonicPoly(ctx, ())
    g_ode = -series.truncate(d)
    z = solve_separated(g_ode, PolynomialRhs([1, 1]), d)
    rev = z + 1
    return MonicPoly(ctx, tuple(rev.coeffs[d - i] for i in range(d)))


def recovery_guarantee(ctx: PadicContext, degree: int) -> int:
    """Exponent of the precision guaranteed on recovered coefficients."""
    return ctx.prec - (floor_log(ctx.p, degree) if degree >= 1 else 0)


def composed_product(f: MonicPoly, g: MonicPoly) -> MonicPoly:
    """The monic polynomial over F_p whose roots are all pairwise products of
    the roots of f and g.

    Lift canonically to Z/p^w, where w = 1 + floor_log(p, d*e) working digits
    suffice to land back in F_p (w = 2 + ... when p = 2), take the power-sum
    series of both factors to order d*e, multiply them coefficient-wise, and
    recover the degree-(d*e) polynomial. Zero roots carry no power-sum
    information, so zero constant terms are rejected; factor out t^k first.
    """
    if f.ctx.prec != 1 or g.ctx.prec != 1:
        raise InvalidInput("composed products are defined over F_p (prec = 1)")
    if f.ctx.p != g.ctx.p:
        raise ContextMismatch("different primes")
    if f.degree < 1 or g.degree < 1:
        raise InvalidInput("both degrees must be >= 1")
    if f.low[0] == 0 or g.low[0] == 0:
        raise InvalidInput("constant terms must be nonzero (no zero roots)")
    p = f.ctx.p
    de = f.degree * g.degree
    kappa_out = 2 if p == 2 else 1
    work = PadicContext(p, kappa_out + floor_log(p, de))
    hf = newton_series(f.with_context(work), de).series
    hg = newton_series(g.with_context(work), de).series
    mixed = NewtonSeries(hf.hadamard(hg), de)
    return recover_from_newton_series(mixed).with_context(f.ctx)


def _sqrt_rhs(h: Rhs) -> Rhs:
    if isinstance(h, PolynomialRhs):
        return SqrtRationalRhs(h.coeffs, (1,))
    if isinstance(h, RationalRhs):
        return SqrtRationalRhs(h.num, h.den)
    if isinstance(h, SqrtRationalRhs):
        raise InvalidInput("cannot take the square root of a square-root "
                           "right-hand side (fourth roots are unsupported)")
    if isinstance(h, OpaqueRhs):
        return OpaqueRhs(lambda s: h.compose(s).sqrt_unit(),
                         description=f"sqrt of {h!r}")
    raise TypeError(f"unsupported right-hand side {h!r}")


def solve_separated_square(g: TruncSeries, h: Rhs, n: int) -> TruncSeries:
    """Solve (y')^2 = g * h(y), y(0) = 0, for p != 2, returning the branch
    with y'(0) = 1.

    Requires g(0) = 1 and h(0) = 1, so both square roots exist with constant
    term 1 and the equation rewrites as y' = sqrt(g) * sqrt(h)(y); the
    first-order solver then applies with the same precision plan (the square
    roots cost no digits).
    """
    ctx = g.ctx
    if ctx.p == 2:
        raise EvenPrime("(y')^2 = g*h(y) is not handled for p = 2")
    if g.order > 0 and g.coeffs[0] != 1:
        raise BadConstantTerm(f"g(0) = {g.coeffs[0]}, must be 1")
    return solve_separated(g.sqrt_unit(), _sqrt_rhs(h), n)


def isogeny_instance(m: int, ctx: PadicContext, order: int):
    """The benchmark equation (y')^2 = g * h(y) with
    g = 1/(1 + t^2/4 + t^6) expanded mod t^order and
    h(u) = 1 + (m^2/4) u^2 + m^6 u^6."""
    den = TruncSeries(ctx, [1, 0, Fraction(1, 4), 0, 0, 0, 1], order=order)
    h = PolynomialRhs((1, 0, Fraction(m * m, 4), 0, 0, 0, m ** 6))
    return den.invert(), h


@dataclass(frozen=True)
class BenchRow:
    m: int
    lambda_old: int
    lambda_new: int
    t_old_ms: float
    t_new_ms: float
    speedup: float


BENCH_HEADER = "m,lambda_old,lambda_new,t_old_ms,t_new_ms,speedup"


def _bench_one(job):
    m, p = job
    n = 4 * m
    budget = plan(1, n, p)
    timings = {}
    for label, prec in (("old", budget.naive_prec), ("new", budget.prec)):
        ctx = PadicContext(p, prec)
        g, h = isogeny_instance(m, ctx, n)
        t0 = time.perf_counter()
        y = solve_separated_square(g, h, n)
        timings[label] = (time.perf_counter() - t0, y)
    t_old, y_old = timings["old"]
    t_new, y_new = timings["new"]
    if not y_old.congruent(y_new, kappa=1):
        raise AssertionError(
            f"m={m}: outputs at precisions {budget.naive_prec} and "
            f"{budget.prec} disagree mod {p}")
    speedup = t_old / t_new if t_new > 0 else float("inf")
    return BenchRow(m, budget.naive_prec, budget.prec,
                    t_old * 1e3, t_new * 1e3, speedup)


def bench_isogeny(m_list, p: int = 5, out=None, parallel: bool = False):
    """Solve the benchmark equation mod (p, t^(4m+1)) at both precision
    budgets for each m, assert the outputs agree mod p, and report timings.

    Rows go to `out` as CSV (path or open file) when given. Sequential by
    default for timing fidelity; `parallel` fans the m values out across
    processes (timings then reflect a loaded machine).
    """
    if p == 2:
        raise EvenPrime("the benchmark equation needs p != 2")
    jobs = []
    for m in m_list:
        if m < 1:
            raise ValueError(f"m must be >= 1, got {m}")
        jobs.append((m, p))
    if parallel:
        with ProcessPoolExecutor() as pool:
            rows = list(pool.map(_bench_one, jobs))
    else:
        rows = [_bench_one(job) for job in jobs]
    if out is not None:
        _write_csv(rows, out)
    return rows


def _format_row(r: BenchRow) -> str:
    return (f"{r.m},{r.lambda_old},{r.lambda_new},"
            f"{r.t_old_ms:.3f},{r.t_new_ms:.3f},{r.speedup:.3f}")


def _write_csv(rows, out):
    text = "\n".join([BENCH_HEADER, *(_format_row(r) for r in rows)]) + "\n"
    if isinstance(out, (str, os.PathLike)):
        with open(out, "w", encoding="ascii") as stream:
            stream.write(text)
    else:
        out.write(text)
