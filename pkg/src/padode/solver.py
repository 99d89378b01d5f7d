"""Newton solver for y' = g * h(y), y(0) = 0, over Z/p^prec, with the
precision planning that matches the problem's own digit loss.

Each Newton step roughly doubles the number of correct series coefficients.
All arithmetic stays at one fixed precision; the only lossy operations are
the divisions by 2..n inside antidifferentiation, which cost at most
floor_log(p, n) digits in total. Planning prec = kappa + floor_log(p, n)
therefore guarantees the first n+1 coefficients modulo p^kappa, and no
smaller working precision can (dividing t^(b-1) coefficients by b = p^s
really does lose s digits).
"""

import random
from dataclasses import dataclass

from .errors import ContextMismatch, KappaTooSmall
from .pseries import Rhs, TruncSeries
from .zpfixed import PadicContext


def floor_log(p: int, n: int) -> int:
    """floor(log_p(n)) for n >= 1, exactly (no floating point)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    v = 0
    while n >= p:
        n //= p
        v += 1
    return v


def naive_loss(n: int, p: int) -> int:
    """Worst-case digit loss summed step by step along the doubling orders.

    Each step to order k loses at most floor_log(p, k) digits, and the orders
    form the chain n, ceil((n-1)/2), ..., 1, so the total is O(log(n)^2).
    Kept as the comparison budget; the solver only needs floor_log(p, n).
    """
    total = 0
    while n > 0:
        total += floor_log(p, n)
        n //= 2
    return total


@dataclass(frozen=True)
class SolvePlan:
    """Precision budget for n+1 output coefficients correct mod p^kappa.

    `prec` is the working precision that suffices; `naive_prec` is the budget
    the step-by-step analysis would demand, kept for comparison (always >=
    prec).
    """

    p: int
    n: int
    kappa: int
    prec: int
    naive_prec: int

    def context(self, trusted_prime: bool = False) -> PadicContext:
        return PadicContext(self.p, self.prec, trusted_prime=trusted_prime)

    def naive_context(self, trusted_prime: bool = False) -> PadicContext:
        return PadicContext(self.p, self.naive_prec, trusted_prime=trusted_prime)


def plan(kappa: int, n: int, p: int) -> SolvePlan:
    """Working precisions for a solve of order n with kappa guaranteed digits.

    kappa must be >= 1, and >= 2 when p = 2 (the first digit of a 2-adic
    perturbation analysis is not stable enough to promise).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if kappa < 1 or (p == 2 and kappa < 2):
        raise KappaTooSmall(f"kappa={kappa} is too small for p={p}")
    loss = floor_log(p, n) if n >= 1 else 0
    return SolvePlan(p=p, n=n, kappa=kappa, prec=kappa + loss,
                     naive_prec=kappa + naive_loss(n, p))


def guaranteed_precision(ctx: PadicContext, n: int) -> int:
    """The exponent kappa guaranteed by a solve of order n at this context."""
    loss = floor_log(ctx.p, n) if n >= 1 else 0
    return ctx.prec - loss


def newton_step(g: TruncSeries, h: Rhs, u: TruncSeries,
                target_order: int) -> TruncSeries:
    """One Newton update u - h(u) * integral(u'/h(u) - g), mod t^(target_order+1).

    If u agrees with the solution mod t^k, the result agrees with it mod
    t^min(2k, target_order+1); callers keep target_order <= 2k. u is treated
    as the polynomial it is (zero coefficients above its order). The only
    divisions happen inside the antiderivative, so a NonIntegralCoefficient
    raised here names the t-degree where integrality breaks.
    """
    if g.ctx != u.ctx:
        raise ContextMismatch("g and u live in different contexts")
    if u.order < 1 or u.coeffs[0] != 0:
        raise ValueError("u must satisfy u(0) = 0")
    if g.order < target_order:
        raise ValueError(f"g has order {g.order}, need {target_order}")
    poly = u.zero_extend(target_order + 1)
    hu = h.compose(poly)
    # Integrating g - u'/h(u) rather than its negation is the same update,
    # but the canonical quotient choices then favor the plain solution
    # (e.g. exactly t^b for g = a*t^(b-1)) in the undetermined digits.
    residual = g.truncate(target_order) - poly.derivative() * hu.invert()
    return poly + hu * residual.antiderivative()


def solve_separated(g: TruncSeries, h: Rhs, n: int) -> TruncSeries:
    """First n+1 coefficients of the solution of y' = g * h(y), y(0) = 0.

    g must carry at least n coefficients and h(0) = 1. With the context
    planned by `plan(kappa, n, p)` the output agrees with the exact solution
    modulo (p^kappa, t^(n+1)) whenever that solution is p-integral; the one
    failure mode is NonIntegralCoefficient, whose degree reports where
    integrality fails.

    The doubling recursion is unrolled into a loop over target orders (no
    deep call stacks for huge n), every step at the same fixed precision; the
    final step dominates the cost.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if g.order < n:
        raise ValueError(f"g has order {g.order}, need {n}")
    targets = []
    m = n
    while m > 0:
        targets.append(m)
        m //= 2
    u = TruncSeries.zero(g.ctx, 1)
    for t_ord in reversed(targets):
        u = newton_step(g, h, u, t_ord)
    return u


def check_first_differential(g: TruncSeries, w: TruncSeries, j: int,
                             h: Rhs) -> bool:
    """Directional-derivative law of the solution map, checked numerically.

    Solves at g and at g + p^j * w and tests whether the difference equals
    p^j * h(y) * integral(w) modulo (p^(2j), t^(n+1)), n = g.order. Requires
    p >= 3, j >= 1, 2j <= prec, w of order >= n with p-integral integral(w).
    Higher-order terms carry p^(2j), so the answer should always be True.
    """
    ctx = g.ctx
    if ctx.p < 3:
        raise ValueError("requires p >= 3")
    if j < 1 or 2 * j > ctx.prec:
        raise ValueError("requires 1 <= j and 2j <= prec")
    if w.ctx != ctx:
        raise ContextMismatch("w lives in a different context")
    if w.order < g.order:
        raise ValueError("w must carry at least as many coefficients as g")
    n = g.order
    pj = ctx.p ** j
    base = solve_separated(g, h, n)
    shifted = solve_separated(g + w.scale(pj), h, n)
    rhs = (h.compose(base) * w.antiderivative()).scale(pj)
    return (shifted - base).congruent(rhs, kappa=2 * j)


@dataclass
class PerturbationReport:
    forward_pass: int = 0
    forward_fail: int = 0
    converse_pass: int = 0
    converse_fail: int = 0

    @property
    def ok(self) -> bool:
        return self.forward_fail == 0 and self.converse_fail == 0


def check_perturbation_equivalence(g: TruncSeries, h: Rhs, kappa: int,
                                   trials: int, rng=None) -> PerturbationReport:
    """Randomized check of both directions of input/output indistinguishability.

    Forward: perturbing g by any delta whose integral vanishes mod p^kappa
    leaves the solve unchanged mod (p^kappa, t^(n+1)). Converse: perturbing
    the output by any integral v = 0 mod p^kappa is realized by such a delta;
    the witness gbar = (y+v)'/h(y+v) satisfies integral(gbar - g) = 0 mod
    p^kappa. Requires prec >= kappa + floor_log(p, n) and kappa >= 1 (>= 2
    when p = 2).
    """
    ctx = g.ctx
    p = ctx.p
    n = g.order
    if kappa < 1 or (p == 2 and kappa < 2):
        raise KappaTooSmall(f"kappa={kappa} is too small for p={p}")
    if ctx.prec < kappa + (floor_log(p, n) if n >= 1 else 0):
        raise ValueError("prec too small for the claimed kappa")
    rng = rng or random.Random(0)
    pk = p ** kappa
    report = PerturbationReport()
    base = solve_separated(g, h, n)
    for _ in range(trials):
        body = [0] + [rng.randrange(ctx.modulus) for _ in range(n)]
        # the exact primitive of delta is p^kappa * body, a multiple of p^kappa
        delta = TruncSeries(ctx, body).scale(pk).derivative()
        out = solve_separated(g + delta, h, n)
        if out.congruent(base, kappa=kappa):
            report.forward_pass += 1
        else:
            report.forward_fail += 1
    span = ctx.modulus // pk
    for _ in range(trials):
        v = TruncSeries(ctx, [0] + [pk * rng.randrange(span) for _ in range(n)])
        y = base + v
        gbar = y.derivative() * h.compose(y).invert()
        drift = (gbar - g).antiderivative()
        if drift.congruent(TruncSeries.zero(ctx, drift.order), kappa=kappa):
            report.converse_pass += 1
        else:
            report.converse_fail += 1
    return report
