"""Power-series solutions of p-adic differential equations with separation
of variables, y' = g * h(y) and (y')^2 = g * h(y), by Newton iteration over
Z/p^prec at the smallest working precision that still guarantees the
requested output digits; with power-sum recovery of polynomials, composed
products over F_p, and a benchmark comparing precision budgets.
"""

from .errors import (BadConstantTerm, ContextMismatch, DivisionByZeroRep,
                     EvenPrime, InvalidInput, KappaTooSmall,
                     NonIntegralCoefficient, NonIntegralQuotient,
                     NonUnitConstantTerm, PadicError)
from .zpfixed import (INFINITY, PadicContext, ZpElt, factorial_valuation,
                      fixed_div_rep)
from .pseries import (KRONECKER_CUTOFF, OpaqueRhs, PolynomialRhs, RationalRhs,
                      Rhs, SqrtRationalRhs, TruncSeries, from_text, to_text)
from .solver import (PerturbationReport, SolvePlan, check_first_differential,
                     check_perturbation_equivalence, floor_log,
                     guaranteed_precision, naive_loss, newton_step, plan,
                     solve_separated)
from .apps import (BENCH_HEADER, BenchRow, MonicPoly, NewtonSeries,
                   bench_isogeny, composed_product, isogeny_instance,
                   newton_series, recover_from_newton_series,
                   recovery_guarantee, solve_separated_square)

__version__ = "0.1.0"

__all__ = [
    "BENCH_HEADER", "BadConstantTerm", "BenchRow", "ContextMismatch",
    "DivisionByZeroRep", "EvenPrime", "INFINITY", "InvalidInput",
    "KRONECKER_CUTOFF", "KappaTooSmall", "MonicPoly", "NewtonSeries",
    "NonIntegralCoefficient", "NonIntegralQuotient", "NonUnitConstantTerm",
    "OpaqueRhs", "PadicContext", "PadicError", "PerturbationReport",
    "PolynomialRhs", "RationalRhs", "Rhs", "SolvePlan", "SqrtRationalRhs",
    "TruncSeries", "ZpElt", "bench_isogeny", "check_first_differential",
    "check_perturbation_equivalence", "composed_product",
    "factorial_valuation", "fixed_div_rep", "floor_log", "from_text",
    "guaranteed_precision", "isogeny_instance", "naive_loss", "newton_series",
    "newton_step", "plan", "recover_from_newton_series", "recovery_guarantee",
    "solve_separated", "solve_separated_square", "to_text",
]
