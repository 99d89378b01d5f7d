"""Exact arithmetic in Z/p^prec with canonical representatives.

This is the fixed-precision stand-in for p-adic integers: every element is
stored as its representative in [0, p^prec), valuations are read off the
representative, and division follows a three-case rule that either produces
the exact quotient (unit divisor), picks the canonical representative among
the finitely many consistent quotients (divisor valuation 0 < v <= v_p(a)),
or fails loudly (quotient not integral).
"""

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (ContextMismatch, DivisionByZeroRep, NonIntegralQuotient)
from .instrument import DIVISIONS, bump

SMALL_PRIME_BOUND = 1 << 20

# Deterministic Miller-Rabin witnesses for n < 3.3 * 10^24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_DETERMINISTIC_BOUND = 3_317_044_064_679_887_385_961_981


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d = n - 1
    r = (d & -d).bit_length() - 1
    d >>= r
    bases = _MR_BASES
    if n >= _MR_DETERMINISTIC_BOUND:
        rng = random.Random(n)
        bases = tuple(rng.randrange(2, n - 1) for _ in range(25))
    for a in bases:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class _PlusInfinity:
    """Valuation of the zero representative: compares above every integer.

    A distinguished value rather than an integer sentinel, so that min/max
    and comparisons involving it behave correctly by construction.
    """

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __repr__(self):
        return "INFINITY"


INFINITY = _PlusInfinity()


def _val(n: int, p: int) -> int:
    # n != 0
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class PadicContext:
    """The coefficient ring Z/p^prec: a prime p and a precision exponent.

    Primality is checked at construction; for p >= 2^20 the (still
    deterministic up to 3.3e24, probabilistic beyond) Miller-Rabin test can
    be skipped with ``trusted_prime=True``. Instances are immutable and safe
    to share between threads.
    """

    p: int
    prec: int
    trusted_prime: bool = field(default=False, compare=False, repr=False)
    modulus: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.prec < 1:
            raise ValueError(f"precision exponent must be >= 1, got {self.prec}")
        if self.p < 2:
            raise ValueError(f"p must be a prime >= 2, got {self.p}")
        if self.p < SMALL_PRIME_BOUND or not self.trusted_prime:
            if not _is_prime(self.p):
                raise ValueError(f"p = {self.p} is not prime")
        object.__setattr__(self, "modulus", self.p ** self.prec)

    def elt(self, value) -> "ZpElt":
        return ZpElt(self, value)

    def series(self, coeffs, order=None):
        from .pseries import TruncSeries

        return TruncSeries(self, coeffs, order=order)

    def reduce(self, value) -> int:
        """Canonical representative of an int or Fraction in [0, p^prec)."""
        if isinstance(value, Fraction):
            den = value.denominator
            if den % self.p == 0:
                raise NonIntegralQuotient(
                    f"{value} has a denominator divisible by p = {self.p}")
            return value.numerator * pow(den, -1, self.modulus) % self.modulus
        return value % self.modulus


def fixed_div_rep(a: int, b: int, ctx: PadicContext) -> int:
    """The smallest c >= 0 with b*c = a (mod p^prec), on raw representatives.

    Unit divisor: the exact quotient. Divisor of valuation 0 < v <= v_p(a):
    only prec - v digits of the quotient are determined, and the smallest
    consistent c (the one in [0, p^(prec-v))) is returned. v_p(a) < v_p(b):
    the quotient is not integral, NonIntegralQuotient is raised.
    """
    if b == 0:
        raise DivisionByZeroRep("divisor representative is 0")
    p = ctx.p
    v = _val(b, p)
    if v == 0:
        bump(DIVISIONS, "unit")
        return a * pow(b, -1, ctx.modulus) % ctx.modulus
    if a != 0 and _val(a, p) < v:
        raise NonIntegralQuotient(f"v_p({a}) < v_p({b}) = {v}")
    bump(DIVISIONS, "shifted")
    shifted_mod = p ** (ctx.prec - v)
    return (a // p ** v) * pow(b // p ** v, -1, shifted_mod) % shifted_mod


class ZpElt:
    """An element of Z/p^prec held as its canonical representative.

    Values are immutable; every operation returns a fresh canonical element.
    Ints mix freely (they are reduced into the ring); elements of a different
    context do not.
    """

    __slots__ = ("ctx", "rep")

    def __init__(self, ctx: PadicContext, value: int):
        self.ctx = ctx
        self.rep = value % ctx.modulus

    def _coerce(self, other):
        if isinstance(other, ZpElt):
            if other.ctx != self.ctx:
                raise ContextMismatch(f"{self.ctx} vs {other.ctx}")
            return other.rep
        if isinstance(other, int):
            return other % self.ctx.modulus
        return None

    def __add__(self, other):
        rep = self._coerce(other)
        if rep is None:
            return NotImplemented
        return ZpElt(self.ctx, self.rep + rep)

    __radd__ = __add__

    def __sub__(self, other):
        rep = self._coerce(other)
        if rep is None:
            return NotImplemented
        return ZpElt(self.ctx, self.rep - rep)

    def __rsub__(self, other):
        rep = self._coerce(other)
        if rep is None:
            return NotImplemented
        return ZpElt(self.ctx, rep - self.rep)

    def __mul__(self, other):
        rep = self._coerce(other)
        if rep is None:
            return NotImplemented
        return ZpElt(self.ctx, self.rep * rep)

    __rmul__ = __mul__

    def __neg__(self):
        return ZpElt(self.ctx, -self.rep)

    def __truediv__(self, other):
        rep = self._coerce(other)
        if rep is None:
            return NotImplemented
        return ZpElt(self.ctx, fixed_div_rep(self.rep, rep, self.ctx))

    def __eq__(self, other):
        if isinstance(other, ZpElt):
            return self.ctx == other.ctx and self.rep == other.rep
        if isinstance(other, int):
            return self.rep == other % self.ctx.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.ctx, self.rep))

    def valuation(self):
        """Largest v < prec with p^v dividing the representative; INFINITY
        for the zero representative (the true valuation is only known to be
        >= prec)."""
        if self.rep == 0:
            return INFINITY
        return _val(self.rep, self.ctx.p)

    def is_unit(self) -> bool:
        return self.rep % self.ctx.p != 0

    def __repr__(self):
        return f"ZpElt({self.rep} mod {self.ctx.p}^{self.ctx.prec})"


def factorial_valuation(k: int, p: int) -> int:
    """v_p(k!) as the sum of the floors k // p^i (bounded by k/(p-1))."""
    if k < 0:
        raise ValueError("k must be >= 0")
    total = 0
    q = p
    while q <= k:
        total += k // q
        q *= p
    return total
