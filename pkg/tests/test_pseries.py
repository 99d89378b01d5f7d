import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import padode.pseries as pseries
from padode import (BadConstantTerm, ContextMismatch, EvenPrime,
                    NonIntegralCoefficient, NonUnitConstantTerm, OpaqueRhs,
                    PadicContext, PolynomialRhs, RationalRhs, SqrtRationalRhs,
                    TruncSeries, from_text, to_text)
from padode.instrument import SERIES_OPS, tracking
from padode.pseries import KRONECKER_CUTOFF, _mul_kronecker, _mul_schoolbook

from oracles import rational_eval, reduce_mod

C52 = PadicContext(5, 2)
C71 = PadicContext(7, 1)


# ------------------------------------------------------------------- mul

def test_mul_example_geometric():
    f = C52.series([1, 1], order=3)
    g = C52.series([1, -1], order=3)
    assert (f * g).coeffs == (1, 0, 24)


def test_mul_by_zero():
    f = C52.series([3, 1, 4], order=3)
    assert (f * TruncSeries.zero(C52, 3)).coeffs == (0, 0, 0)


def test_mul_example_schoolbook_frozen():
    # (1+2t+3t^2)(4+5t) = 4 + 13t + 22t^2 + ..., reduced mod 7
    f = C71.series([1, 2, 3], order=3)
    g = C71.series([4, 5], order=3)
    assert (f * g).coeffs == (4, 6, 1)


def test_mul_order_is_min():
    f = C52.series([1, 1, 1, 1], order=4)
    g = C52.series([1, 1], order=2)
    assert (f * g).order == 2


def test_mul_paths_agree_across_contexts():
    rng = random.Random(42)
    for p in (2, 3, 5, 7):
        for prec in (1, 2, 8):
            m = p ** prec
            for _ in range(500):
                n = rng.randint(1, 64)
                a = [rng.randrange(m) for _ in range(n)]
                b = [rng.randrange(m) for _ in range(n)]
                assert _mul_schoolbook(a, b, m, n) == _mul_kronecker(a, b, m, n)


def test_mul_dispatches_to_packed_path_above_cutoff(monkeypatch):
    calls = []
    real = _mul_kronecker

    def spy(a, b, m, out_len):
        calls.append(out_len)
        return real(a, b, m, out_len)

    monkeypatch.setattr(pseries, "_mul_kronecker", spy)
    big = C52.series(list(range(1, KRONECKER_CUTOFF + 2)))
    small = C52.series([1, 2, 3], order=3)
    _ = big * big
    _ = small * small
    assert calls == [KRONECKER_CUTOFF + 1]


# ----------------------------------------------------- derivative/integral

def test_derivative_examples():
    assert C52.series([0, 1], order=2).derivative().coeffs == (1,)
    assert C52.series([1, 1, 1], order=3).derivative().coeffs == (1, 2)
    # 5*t^4 survives at prec 2 since 5 != 0 mod 25
    f = C52.series([0, 0, 0, 0, 0, 1], order=6)
    assert f.derivative().coeffs == (0, 0, 0, 0, 5)


def test_derivative_needs_order():
    with pytest.raises(ValueError):
        TruncSeries.zero(C52, 0).derivative()


def test_antiderivative_examples():
    assert C52.series([1], order=1).antiderivative().coeffs == (0, 1)
    f = C52.series([0, 0, 0, 0, 5], order=5)
    assert f.antiderivative().coeffs == (0, 0, 0, 0, 0, 1)
    with pytest.raises(NonIntegralCoefficient) as err:
        C52.series([0, 0, 0, 0, 4], order=5).antiderivative()
    assert err.value.degree == 5


def test_antiderivative_when_index_vanishes_in_ring():
    c21 = PadicContext(2, 1)
    # i = 2 reduces to 0; the coefficient below it must vanish too
    assert c21.series([1, 0, 1], order=3).antiderivative().coeffs == (0, 1, 0, 1)
    with pytest.raises(NonIntegralCoefficient) as err:
        c21.series([1, 1], order=2).antiderivative()
    assert err.value.degree == 2


def test_antiderivative_no_error_when_divisible_enough():
    rng = random.Random(3)
    for p, prec in ((2, 4), (5, 3)):
        ctx = PadicContext(p, prec)
        m = ctx.modulus
        n = 30
        coeffs = []
        for i in range(1, n + 1):
            v = 0
            k = i
            while k % p == 0:
                k //= p
                v += 1
            coeffs.append(p ** min(v, prec) * rng.randrange(m // p ** min(v, prec)))
        f = ctx.series(coeffs, order=n)
        F = f.antiderivative()
        assert F.coeffs[0] == 0
        assert F.derivative().coeffs == f.coeffs  # division contract: b*c = a


def test_derivative_antiderivative_roundtrip_random():
    rng = random.Random(11)
    ctx = PadicContext(3, 4)
    for _ in range(50):
        n = rng.randint(1, 40)
        f = ctx.series([rng.randrange(ctx.modulus) for _ in range(n)])
        try:
            F = f.antiderivative()
        except NonIntegralCoefficient:
            continue
        assert F.derivative().coeffs == f.coeffs


# ---------------------------------------------------------------- inverse

def test_invert_geometric():
    f = C52.series([1, -1], order=4)
    assert f.invert().coeffs == (1, 1, 1, 1)


def test_invert_one():
    assert C52.series([1], order=1).invert().coeffs == (1,)


def test_invert_frozen_example():
    assert C71.series([1, 2], order=3).invert().coeffs == (1, 5, 4)


def test_invert_requires_unit():
    with pytest.raises(NonUnitConstantTerm):
        C52.series([5, 1], order=2).invert()


@given(p_prec=st.sampled_from([(2, 3), (3, 2), (5, 2), (7, 1)]),
       data=st.data())
@settings(max_examples=60)
def test_invert_property(p_prec, data):
    p, prec = p_prec
    ctx = PadicContext(p, prec)
    n = data.draw(st.integers(1, 30))
    c0 = data.draw(st.integers(1, ctx.modulus - 1).filter(lambda c: c % p != 0))
    rest = data.draw(st.lists(st.integers(0, ctx.modulus - 1),
                              min_size=n - 1, max_size=n - 1))
    f = ctx.series([c0, *rest])
    one = TruncSeries.constant(ctx, 1, n)
    assert (f * f.invert()).coeffs == one.coeffs


# ------------------------------------------------------------------- sqrt

def test_sqrt_one():
    assert C52.series([1], order=1).sqrt_unit().coeffs == (1,)


def test_sqrt_frozen_example():
    root = C52.series([1, 1], order=3).sqrt_unit()
    assert root.coeffs == (1, 13, 3)  # 13 = 1/2, 3 = -1/8 mod 25
    assert (root * root).coeffs == (1, 1, 0)


def test_sqrt_of_perfect_square():
    s = C52.series([1, 1], order=3)
    assert (s * s).sqrt_unit().coeffs == (1, 1, 0)


def test_sqrt_rejects_p2():
    with pytest.raises(EvenPrime):
        PadicContext(2, 3).series([1, 1], order=2).sqrt_unit()


def test_sqrt_rejects_bad_constant():
    with pytest.raises(BadConstantTerm):
        C52.series([2, 1], order=2).sqrt_unit()


@given(p_prec=st.sampled_from([(3, 3), (5, 2), (7, 2), (11, 1)]),
       data=st.data())
@settings(max_examples=60)
def test_sqrt_property(p_prec, data):
    p, prec = p_prec
    ctx = PadicContext(p, prec)
    n = data.draw(st.integers(1, 24))
    f = ctx.series([1] + data.draw(
        st.lists(st.integers(0, ctx.modulus - 1), min_size=n - 1, max_size=n - 1)))
    root = f.sqrt_unit()
    assert (root * root).coeffs == f.coeffs
    # uniqueness of the root with constant term 1
    assert (root * root).sqrt_unit().coeffs == root.coeffs


# ------------------------------------------------------------ composition

def test_compose_poly_square():
    out = PolynomialRhs([1, 2, 1]).compose(C71.series([0, 1], order=3))
    assert out.coeffs == (1, 2, 1)


def test_compose_constant_one():
    out = PolynomialRhs([1]).compose(C71.series([0, 3, 5], order=3))
    assert out.coeffs == (1, 0, 0)


def test_compose_rational_frozen():
    # oracle: full rational composition, reduced mod 7
    expected = [reduce_mod(c, 7, 1)
                for c in rational_eval([1], [1, -1], [0, 1, 1], 4)]
    out = RationalRhs([1], [1, -1]).compose(C71.series([0, 1, 1], order=4))
    assert list(out.coeffs) == expected == [1, 1, 2, 3]


def test_compose_requires_zero_constant():
    with pytest.raises(ValueError):
        PolynomialRhs([1, 1]).compose(C71.series([1, 1], order=2))


def test_compose_checks_h0():
    with pytest.raises(BadConstantTerm):
        PolynomialRhs([2, 1]).compose(C71.series([0, 1], order=2))
    # 8 = 1 mod 7, so this h(0) passes in the ring
    out = PolynomialRhs([8, 1]).compose(C71.series([0, 1], order=2))
    assert out.coeffs == (1, 1)


def test_compose_fraction_coefficients():
    out = PolynomialRhs([1, Fraction(1, 2)]).compose(C52.series([0, 2], order=2))
    assert out.coeffs == (1, 1)


def test_rational_equals_poly_times_inverse():
    rng = random.Random(5)
    for _ in range(30):
        ctx = PadicContext(rng.choice([3, 5, 7]), rng.randint(1, 3))
        n = rng.randint(1, 12)
        f = ctx.series([0] + [rng.randrange(ctx.modulus) for _ in range(n - 1)],
                       order=n)
        num = [1] + [rng.randrange(ctx.modulus) for _ in range(2)]
        den = [1] + [rng.randrange(ctx.modulus) for _ in range(2)]
        combined = RationalRhs(num, den).compose(f)
        split = (PolynomialRhs(num).compose(f)
                 * PolynomialRhs(den).compose(f).invert())
        assert combined.coeffs == split.coeffs


def test_sqrt_rational_squares_back():
    ctx = PadicContext(5, 3)
    f = ctx.series([0, 1, 2], order=5)
    h = SqrtRationalRhs([1, 0, 3], [1, 1])
    out = h.compose(f)
    target = RationalRhs([1, 0, 3], [1, 1]).compose(f)
    assert (out * out).coeffs == target.coeffs


def test_sqrt_rational_constructor_checks():
    with pytest.raises(BadConstantTerm):
        SqrtRationalRhs([2, 1], [1])
    with pytest.raises(EvenPrime):
        SqrtRationalRhs([1, 1], [1]).compose(PadicContext(2, 2).series([0, 1], order=2))


def test_opaque_delegation_and_validation():
    h = OpaqueRhs(lambda f: PolynomialRhs([1, 1]).compose(f), description="1+u")
    out = h.compose(C71.series([0, 2], order=2))
    assert out.coeffs == (1, 2)
    bad_order = OpaqueRhs(lambda f: f.truncate(f.order - 1))
    with pytest.raises(ValueError):
        bad_order.compose(C71.series([0, 1], order=3))
    bad_h0 = OpaqueRhs(lambda f: f)
    with pytest.raises(BadConstantTerm):
        bad_h0.compose(C71.series([0, 1], order=2))


# ----------------------------------------------------------- value plumbing

def test_series_canonicalizes_and_orders():
    f = TruncSeries(C52, [26, -1, Fraction(1, 2)], order=5)
    assert f.coeffs == (1, 24, 13, 0, 0)
    assert f.order == 5
    assert TruncSeries(C52, [1, 2, 3], order=2).coeffs == (1, 2)


def test_series_coeff_view():
    f = C52.series([7])
    assert f.coeff(0).rep == 7 and f.coeff(0).ctx == C52
    assert f[0] == 7


def test_truncate_and_zero_extend_rules():
    f = C52.series([1, 2], order=2)
    assert f.zero_extend(4).coeffs == (1, 2, 0, 0)
    with pytest.raises(ValueError):
        f.zero_extend(1)
    with pytest.raises(ValueError):
        f.truncate(3)


def test_add_orders_and_scalars():
    f = C52.series([1, 2, 3], order=3)
    g = C52.series([1, 1], order=2)
    assert (f + g).coeffs == (2, 3)
    assert (f - g).coeffs == (0, 1)
    assert (f + 1).coeffs == (2, 2, 3)
    assert (1 + f).coeffs == (2, 2, 3)
    assert (-f).coeffs == (24, 23, 22)


def test_hadamard():
    f = C52.series([2, 3, 4], order=3)
    g = C52.series([5, 6], order=2)
    assert f.hadamard(g).coeffs == (10, 18)


def test_congruent_semantics():
    a = PadicContext(5, 3).series([1, 6], order=2)
    b = PadicContext(5, 2).series([1, 1], order=2)
    assert a.congruent(b, kappa=1)
    assert not a.congruent(b, kappa=2)
    with pytest.raises(ValueError):
        a.congruent(b, kappa=3)
    with pytest.raises(ContextMismatch):
        a.congruent(C71.series([1], order=1))


def test_reduce_precision():
    a = PadicContext(5, 3).series([1, 26, 124], order=3)
    r = a.reduce_precision(1)
    assert r.ctx == PadicContext(5, 1)
    assert r.coeffs == (1, 1, 4)
    with pytest.raises(ValueError):
        r.reduce_precision(2)


def test_series_op_tracking():
    f = C52.series([1, 1], order=4)
    with tracking(SERIES_OPS) as tally:
        _ = f * f
        _ = f.invert()
    assert tally["mul"] == 1 and tally["invert"] == 1
    with tracking(SERIES_OPS) as tally:
        pass
    assert sum(tally.values()) == 0


# -------------------------------------------------------------- text format

def test_text_round_trip():
    f = PadicContext(5, 3).series([0, 1, 124, 26], order=4)
    assert from_text(to_text(f)) == f


def test_text_round_trip_empty_order():
    f = TruncSeries.zero(PadicContext(7, 2), 0)
    assert from_text(to_text(f)) == f


def test_text_exact_format():
    f = PadicContext(5, 1).series([0, 1, 0], order=3)
    assert to_text(f) == "5 1 3\n0 1 0\n"


def test_text_ignores_trailing_lines():
    parsed = from_text("5 1 2\n3 4\nguaranteed_precision: 5^1\n")
    assert parsed.coeffs == (3, 4)


def test_text_rejects_malformed():
    for bad in ("", "5 1\n", "5 1 2\n3\n", "5 1 two\n1 1\n", "4 1 1\n0\n",
                "5 1 -1\n\n"):
        with pytest.raises(ValueError):
            from_text(bad)
