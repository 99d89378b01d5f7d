"""Truncated power series over Z/p^prec, and the structured right-hand sides
the differential solver composes with.

A series of order n is an approximation modulo t^n: exactly n coefficients,
each canonical in [0, p^prec). Operations return the tightest order their
inputs justify; treating a truncation as a polynomial (exact zeros above the
known coefficients) is always explicit, via `zero_extend`.
"""

from fractions import Fraction

from .errors import (BadConstantTerm, ContextMismatch, EvenPrime,
                     NonIntegralCoefficient, NonIntegralQuotient,
                     NonUnitConstantTerm)
from .instrument import DIVISIONS, SERIES_OPS, bump
from .zpfixed import PadicContext, ZpElt, fixed_div_rep

# Below this order the quadratic schoolbook product beats packing the factors
# into big integers; crossover measured on CPython around order 6..8 for
# moduli between 5^3 and 5^29.
KRONECKER_CUTOFF = 8


def _mul_schoolbook(a, b, modulus, out_len):
    out = [0] * out_len
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        top = out_len - i
        if top <= 0:
            break
        for j in range(min(len(b), top)):
            out[i + j] += ai * b[j]
    return [c % modulus for c in out]


def _mul_kronecker(a, b, modulus, out_len):
    # Pack each factor into one integer, coefficients in fixed-width
    # little-endian byte slots, so the convolution is a single multiply.
    # Slot width fits any coefficient of the product: terms * (modulus-1)^2.
    terms = min(len(a), len(b))
    slot_bits = 2 * (modulus - 1).bit_length() + terms.bit_length()
    width = (slot_bits + 7) // 8
    packed_a = int.from_bytes(b"".join(x.to_bytes(width, "little") for x in a), "little")
    packed_b = int.from_bytes(b"".join(x.to_bytes(width, "little") for x in b), "little")
    raw = (packed_a * packed_b).to_bytes(width * (len(a) + len(b)), "little")
    n_out = min(out_len, len(a) + len(b) - 1)
    out = [
        int.from_bytes(raw[k * width:(k + 1) * width], "little") % modulus
        for k in range(n_out)
    ]
    if n_out < out_len:
        out.extend([0] * (out_len - n_out))
    return out


def _mul_coeffs(a, b, modulus, out_len):
    if out_len == 0 or not a or not b:
        return [0] * out_len
    a = a[:out_len]
    b = b[:out_len]
    if out_len < KRONECKER_CUTOFF:
        return _mul_schoolbook(a, b, modulus, out_len)
    return _mul_kronecker(a, b, modulus, out_len)


class TruncSeries:
    """A power series known modulo (p^prec, t^order).

    Pure value semantics: coefficients are stored as a tuple of canonical
    representatives and never mutated, so instances can be shared freely.
    """

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx, coeffs, order=None):
        """Build from ints, Fractions or ZpElt values; with `order` given the
        coefficient list is zero-extended or truncated to that length."""
        vals = []
        for c in coeffs:
            if isinstance(c, ZpElt):
                if c.ctx != ctx:
                    raise ContextMismatch("coefficient from a different context")
                vals.append(c.rep)
            else:
                vals.append(ctx.reduce(c))
        if order is not None:
            if order < 0:
                raise ValueError("order must be >= 0")
            if len(vals) < order:
                vals.extend([0] * (order - len(vals)))
            else:
                del vals[order:]
        self.ctx = ctx
        self.coeffs = tuple(vals)

    @classmethod
    def _raw(cls, ctx, coeffs):
        # Internal: coefficients already canonical.
        s = object.__new__(cls)
        s.ctx = ctx
        s.coeffs = tuple(coeffs)
        return s

    @classmethod
    def zero(cls, ctx, order):
        return cls._raw(ctx, (0,) * order)

    @classmethod
    def constant(cls, ctx, value, order):
        if order == 0:
            return cls._raw(ctx, ())
        return cls._raw(ctx, (ctx.reduce(value),) + (0,) * (order - 1))

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, i) -> int:
        return self.coeffs[i]

    def __iter__(self):
        return iter(self.coeffs)

    def coeff(self, i) -> ZpElt:
        return ZpElt(self.ctx, self.coeffs[i])

    def _check_ctx(self, other):
        if self.ctx != other.ctx:
            raise ContextMismatch(f"{self.ctx} vs {other.ctx}")

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.ctx == other.ctx and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ctx, self.coeffs))

    def __repr__(self):
        return f"TruncSeries({self.ctx.p}^{self.ctx.prec}, {list(self.coeffs)})"

    def __add__(self, other):
        m = self.ctx.modulus
        if isinstance(other, TruncSeries):
            self._check_ctx(other)
            n = min(self.order, other.order)
            return TruncSeries._raw(
                self.ctx,
                [(x + y) % m for x, y in zip(self.coeffs[:n], other.coeffs[:n])])
        if isinstance(other, (int, Fraction)):
            if self.order == 0:
                return self
            vals = list(self.coeffs)
            vals[0] = (vals[0] + self.ctx.reduce(other)) % m
            return TruncSeries._raw(self.ctx, vals)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, TruncSeries):
            return self + (-other)
        if isinstance(other, (int, Fraction)):
            return self + (-other)
        return NotImplemented

    def __neg__(self):
        m = self.ctx.modulus
        return TruncSeries._raw(self.ctx, [(-x) % m for x in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, TruncSeries):
            self._check_ctx(other)
            bump(SERIES_OPS, "mul")
            n = min(self.order, other.order)
            return TruncSeries._raw(
                self.ctx, _mul_coeffs(self.coeffs, other.coeffs, self.ctx.modulus, n))
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def scale(self, value):
        c = self.ctx.reduce(value)
        m = self.ctx.modulus
        return TruncSeries._raw(self.ctx, [x * c % m for x in self.coeffs])

    def hadamard(self, other):
        """Coefficient-wise product."""
        self._check_ctx(other)
        bump(SERIES_OPS, "hadamard")
        m = self.ctx.modulus
        n = min(self.order, other.order)
        return TruncSeries._raw(
            self.ctx, [x * y % m for x, y in zip(self.coeffs[:n], other.coeffs[:n])])

    def truncate(self, order):
        if order > self.order:
            raise ValueError(f"cannot truncate order {self.order} to {order}")
        return TruncSeries._raw(self.ctx, self.coeffs[:order])

    def zero_extend(self, order):
        """View the truncation as a polynomial of the given order: the added
        coefficients are exact zeros of that polynomial, not knowledge about
        the underlying series."""
        if order < self.order:
            raise ValueError(f"cannot zero-extend order {self.order} down to {order}")
        return TruncSeries._raw(self.ctx, self.coeffs + (0,) * (order - self.order))

    def derivative(self):
        if self.order < 1:
            raise ValueError("derivative needs order >= 1")
        bump(SERIES_OPS, "derivative")
        m = self.ctx.modulus
        return TruncSeries._raw(
            self.ctx, [i * self.coeffs[i] % m for i in range(1, self.order)])

    def antiderivative(self):
        """The primitive with zero constant term, one order higher.

        Coefficient i is the fixed-precision quotient of coefficient i-1 by i,
        so dividing back by derivative() recovers the input exactly. When the
        input coefficient is not divisible enough the primitive is not
        p-integral there, and NonIntegralCoefficient carries that t-degree.
        """
        bump(SERIES_OPS, "antiderivative")
        ctx = self.ctx
        m = ctx.modulus
        out = [0] * (self.order + 1)
        for i in range(1, self.order + 1):
            a = self.coeffs[i - 1]
            if a == 0:
                continue
            b = i % m
            if b == 0:
                # i vanishes in the ring: no digit of a/i is determined, but
                # a itself must vanish for the quotient to be integral.
                raise NonIntegralCoefficient(i)
            bump(DIVISIONS, "site_antiderivative")
            try:
                out[i] = fixed_div_rep(a, b, ctx)
            except NonIntegralQuotient:
                raise NonIntegralCoefficient(i) from None
        return TruncSeries._raw(ctx, out)

    def invert(self):
        """Multiplicative inverse mod (p^prec, t^order), by quadratic lifting
        g <- g*(2 - f*g) from the inverse of the (unit) constant term."""
        ctx = self.ctx
        if self.order == 0:
            return self
        c0 = self.coeffs[0]
        if c0 % ctx.p == 0:
            raise NonUnitConstantTerm(f"constant term {c0} is not a unit")
        bump(SERIES_OPS, "invert")
        bump(DIVISIONS, "unit")
        bump(DIVISIONS, "site_invert")
        m = ctx.modulus
        n = self.order
        g = [pow(c0, -1, m)]
        k = 1
        while k < n:
            k = min(2 * k, n)
            fg = _mul_coeffs(self.coeffs[:k], g, m, k)
            corr = [(-x) % m for x in fg]
            corr[0] = (corr[0] + 2) % m
            g = _mul_coeffs(g, corr, m, k)
        return TruncSeries._raw(ctx, g)

    def sqrt_unit(self):
        """The square root with constant term 1, for p != 2.

        Newton's rule s <- (s + f/s)/2, run as a coupled iteration that lifts
        the reciprocal of s alongside s so each doubling costs a few products.
        Division by 2 is a unit scaling, so no precision is lost.
        """
        ctx = self.ctx
        if ctx.p == 2:
            raise EvenPrime("series square root requires p != 2")
        if self.order == 0:
            return self
        if self.coeffs[0] != 1:
            raise BadConstantTerm(f"sqrt requires constant term 1, got {self.coeffs[0]}")
        bump(SERIES_OPS, "sqrt")
        bump(DIVISIONS, "unit")
        bump(DIVISIONS, "site_sqrt")
        m = ctx.modulus
        n = self.order
        inv2 = pow(2, -1, m)
        s = [1]
        r = [1]  # r = 1/s at half the current order, lifted before each use
        k = 1
        while k < n:
            k2 = min(2 * k, n)
            sr = _mul_coeffs(s, r, m, k)
            corr = [(-x) % m for x in sr]
            corr[0] = (corr[0] + 2) % m
            r = _mul_coeffs(r, corr, m, k)
            s_sq = _mul_coeffs(s, s, m, k2)
            s_sq.extend([0] * (k2 - len(s_sq)))
            e = [(f - q) % m for f, q in zip(self.coeffs[:k2], s_sq)]
            half_corr = _mul_coeffs(e, r, m, k2)
            s.extend([0] * (k2 - len(s)))
            s = [(x + y * inv2) % m for x, y in zip(s, half_corr)]
            k = k2
        return TruncSeries._raw(ctx, s)

    def congruent(self, other, kappa=None, order=None) -> bool:
        """Agreement coefficient-wise mod p^kappa up to the given order.

        Defaults compare at the smaller of the two precisions over the smaller
        of the two orders; the operands may live at different precisions of
        the same p, which is how outputs of differently planned solves are
        compared.
        """
        if not isinstance(other, TruncSeries):
            raise TypeError("can only compare against another TruncSeries")
        if self.ctx.p != other.ctx.p:
            raise ContextMismatch("different primes")
        max_kappa = min(self.ctx.prec, other.ctx.prec)
        if kappa is None:
            kappa = max_kappa
        elif kappa > max_kappa:
            raise ValueError(f"kappa={kappa} exceeds the stored precision {max_kappa}")
        max_order = min(self.order, other.order)
        if order is None:
            order = max_order
        elif order > max_order:
            raise ValueError(f"order={order} exceeds the stored orders")
        q = self.ctx.p ** kappa
        return all((x - y) % q == 0
                   for x, y in zip(self.coeffs[:order], other.coeffs[:order]))

    def reduce_precision(self, kappa):
        """The same series viewed in Z/p^kappa, kappa <= prec."""
        if kappa > self.ctx.prec:
            raise ValueError("cannot increase precision")
        ctx = PadicContext(self.ctx.p, kappa, trusted_prime=self.ctx.trusted_prime)
        return TruncSeries._raw(ctx, [c % ctx.modulus for c in self.coeffs])


def to_text(series: TruncSeries) -> str:
    """Two-line text form: "p prec order", then the canonical coefficients
    space-separated, little-endian by degree. Round-trips bit-exactly."""
    head = f"{series.ctx.p} {series.ctx.prec} {series.order}"
    body = " ".join(str(c) for c in series.coeffs)
    return head + "\n" + body + "\n"


def from_text(text: str, trusted_prime: bool = False) -> TruncSeries:
    """Parse the two-line text form; trailing lines are ignored so printed
    output with an appended status line still parses."""
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty series text")
    head = lines[0].split()
    if len(head) != 3:
        raise ValueError(f"header must be 'p prec order', got {lines[0]!r}")
    try:
        p, prec, order = (int(x) for x in head)
    except ValueError:
        raise ValueError(f"non-integer header field in {lines[0]!r}") from None
    if order < 0:
        raise ValueError("order must be >= 0")
    body = lines[1].split() if len(lines) > 1 else []
    if order == 0:
        vals = []
    else:
        try:
            vals = [int(x) for x in body[:order]]
        except ValueError:
            raise ValueError("non-integer coefficient") from None
        if len(vals) != order:
            raise ValueError(f"expected {order} coefficients, got {len(vals)}")
    ctx = PadicContext(p, prec, trusted_prime=trusted_prime)
    return TruncSeries(ctx, vals)


def _poly_compose(coeffs, f: TruncSeries) -> TruncSeries:
    # Horner on truncations; `coeffs` are exact ints/Fractions, reduced here.
    ctx, n = f.ctx, f.order
    vals = [ctx.reduce(c) for c in coeffs]
    if n == 0:
        return TruncSeries._raw(ctx, ())
    if not vals:
        return TruncSeries.zero(ctx, n)
    acc = TruncSeries.constant(ctx, vals[-1], n)
    for c in reversed(vals[:-1]):
        acc = acc * f + c
    return acc


class Rhs:
    """A right-hand-side factor h for y' = g * h(y), with h(0) = 1.

    Coefficients are exact (ints or Fractions with denominator prime to p)
    and are reduced into the target ring at composition time, so one instance
    serves any working precision of the same p.
    """

    def compose(self, f: TruncSeries) -> TruncSeries:
        """h(f) modulo (p^prec, t^f.order); requires f(0) = 0, which keeps the
        composition meaningful for arbitrary h."""
        if f.order > 0 and f.coeffs[0] != 0:
            raise ValueError("composition requires f(0) = 0")
        bump(SERIES_OPS, "compose")
        out = self._compose(f)
        if out.order > 0 and out.coeffs[0] != 1:
            raise BadConstantTerm(f"h(0) = {out.coeffs[0]}, must be 1")
        return out

    def _compose(self, f: TruncSeries) -> TruncSeries:
        raise NotImplementedError


class PolynomialRhs(Rhs):
    """h(u) = c0 + c1*u + ... evaluated by Horner; one product per degree."""

    def __init__(self, coeffs):
        self.coeffs = tuple(coeffs)
        if not self.coeffs:
            raise ValueError("empty coefficient list")

    def _compose(self, f):
        return _poly_compose(self.coeffs, f)

    def __repr__(self):
        return f"PolynomialRhs({list(self.coeffs)})"


class RationalRhs(Rhs):
    """h(u) = P(u)/Q(u) with Q(0) a unit (checked when the inverse is taken)."""

    def __init__(self, num, den):
        self.num = tuple(num)
        self.den = tuple(den)
        if not self.num or not self.den:
            raise ValueError("empty coefficient list")

    def _compose(self, f):
        return _poly_compose(self.num, f) * _poly_compose(self.den, f).invert()

    def __repr__(self):
        return f"RationalRhs({list(self.num)}, {list(self.den)})"


class SqrtRationalRhs(Rhs):
    """h(u) = sqrt(P(u)/Q(u)) with P(0) = Q(0) = 1; composition needs p != 2."""

    def __init__(self, num, den=(1,)):
        self.num = tuple(num)
        self.den = tuple(den)
        if not self.num or not self.den:
            raise ValueError("empty coefficient list")
        if self.num[0] != 1 or self.den[0] != 1:
            raise BadConstantTerm("sqrt of a rational needs P(0) = Q(0) = 1")

    def _compose(self, f):
        inner = _poly_compose(self.num, f) * _poly_compose(self.den, f).invert()
        return inner.sqrt_unit()

    def __repr__(self):
        return f"SqrtRationalRhs({list(self.num)}, {list(self.den)})"


class OpaqueRhs(Rhs):
    """h given as a black-box composer f -> h(f) at the same ctx and order.

    The composer must cost at least twice as much at order 2n as at order n;
    the solver's doubling steps then dominate its total cost. Built-in
    variants satisfy this; a custom composer that violates it only hurts its
    own complexity, not correctness.
    """

    def __init__(self, fn, description=""):
        self.fn = fn
        self.description = description

    def _compose(self, f):
        out = self.fn(f)
        if not isinstance(out, TruncSeries):
            raise TypeError("opaque composer must return a TruncSeries")
        if out.ctx != f.ctx:
            raise ContextMismatch("opaque composer changed the context")
        if out.order != f.order:
            raise ValueError(
                f"opaque composer returned order {out.order}, expected {f.order}")
        return out

    def __repr__(self):
        return f"OpaqueRhs({self.description or self.fn!r})"
