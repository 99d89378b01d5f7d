"""Exception types shared across the library."""


class PadicError(Exception):
    """Base class for all library-specific errors."""


class ContextMismatch(PadicError):
    """Operands belong to different coefficient rings."""


class DivisionByZeroRep(PadicError):
    """Division by an element whose representative is 0 mod p^prec."""


class NonIntegralQuotient(PadicError):
    """The divisor has strictly larger valuation, so the quotient is not a
    p-adic integer."""


class NonIntegralCoefficient(PadicError):
    """Antidifferentiation hit a coefficient that is not divisible enough.

    ``degree`` is the t-degree at which the primitive fails to be p-integral.
    """

    def __init__(self, degree, message=None):
        self.degree = degree
        super().__init__(message or f"coefficient of t^{degree} is not p-integral")


class NonUnitConstantTerm(PadicError):
    """Series inversion requires a unit constant term."""


class BadConstantTerm(PadicError):
    """A constant-term normalization is violated (f(0) = 1 for square roots,
    h(0) = 1 for right-hand sides, g(0) = 1 for the squared equation)."""


class EvenPrime(PadicError):
    """The operation requires p != 2."""


class KappaTooSmall(PadicError):
    """Requested output precision below the minimum (>= 1, or >= 2 when p = 2)."""


class InvalidInput(PadicError):
    """Structurally invalid input, e.g. a non-monic coefficient list or a zero
    constant term where roots must be nonzero."""
