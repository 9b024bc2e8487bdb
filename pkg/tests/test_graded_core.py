from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings

from ckpfaffian.graded_core import (BETA, AlgebraContext, BetaPolynomial, ContextMismatchError,
                                    NotInvertibleError, beta_scalar, invert_unit, specialize_beta)

from .strategies import CTX, beta_polys, elements, units


def bp(*coeffs):
    return BetaPolynomial(dict(enumerate(coeffs)))


def x_ctx(D, n=2):
    return AlgebraContext([(f"x{i}", 1) for i in range(1, n + 1)], D)


class TestBetaPolynomial:
    def test_difference_of_squares(self):
        assert bp(1, 1) * bp(1, -1) == bp(1, 0, -1)

    def test_additive_identity(self):
        assert bp(0, 0, 1) + BetaPolynomial() == bp(0, 0, 1)

    def test_sign_rule(self):
        half = BetaPolynomial({1: Fraction(-1, 2)})
        assert half * half == BetaPolynomial({2: Fraction(1, 4)})

    def test_no_stored_zeros(self):
        p = bp(1, 2) - bp(1, 2)
        assert p.coeffs == {} and not p

    def test_grading(self):
        assert BETA.is_homogeneous(-1)
        assert (BETA ** 3).is_homogeneous(-3)
        assert not bp(1, 1).is_homogeneous(0)

    @given(beta_polys(), beta_polys(), beta_polys())
    def test_ring_axioms(self, a, b, c):
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c

    @given(beta_polys(), beta_polys())
    def test_evaluate_is_a_homomorphism(self, a, b):
        for v in (0, -1, Fraction(1, 3)):
            assert (a * b).evaluate(v) == a.evaluate(v) * b.evaluate(v)

    def test_rejects_negative_exponent(self):
        with pytest.raises(ValueError):
            BetaPolynomial({-1: 1})


class TestAlgebra:
    def test_product_kept_below_truncation(self):
        ctx = x_ctx(2)
        x1, x2 = ctx.gen("x1"), ctx.gen("x2")
        assert (x1 * x2).terms == {(1, 1): BetaPolynomial.const(1)}

    def test_product_truncated(self):
        ctx = x_ctx(1)
        assert ctx.gen("x1") * ctx.gen("x2") == 0

    def test_geometric_inverse_times_unit(self):
        ctx = x_ctx(3)
        x = ctx.gen("x1")
        a = 1 + x * BETA
        b = 1 - x * BETA + x * x * BETA ** 2 - x ** 3 * BETA ** 3
        assert a * b == 1

    def test_context_mismatch(self):
        with pytest.raises(ContextMismatchError):
            x_ctx(2).gen(0) + x_ctx(3).gen(0)

    def test_homogeneity_flag_propagates(self):
        ctx = x_ctx(4)
        x = ctx.gen("x1")
        y = x * x * BETA
        assert y.hdeg == 1 and y.check_homogeneous() and y.is_homogeneous(1)
        assert (y + x).hdeg == 1
        assert (y + 1).hdeg is None

    @given(elements(), elements(), elements())
    def test_ring_axioms(self, a, b, c):
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c
        assert a - a == 0

    @given(elements(), elements())
    def test_flag_soundness(self, a, b):
        for value in (a, b, a * b, a + b):
            assert value.check_homogeneous()
        x = CTX.gen("x1") * BETA
        y = CTX.gen("y") * BETA ** 2
        assert (x * y).check_homogeneous() and (x * y).hdeg == -3 + 3


class TestInverse:
    def test_one(self):
        assert invert_unit(x_ctx(3).one()) == 1

    def test_two(self):
        assert invert_unit(x_ctx(3).scalar(2)) == Fraction(1, 2)

    def test_geometric_series(self):
        ctx = x_ctx(3)
        x = ctx.gen("x1")
        assert invert_unit(1 - x) == 1 + x + x ** 2 + x ** 3

    def test_beta_constant_is_not_a_unit(self):
        ctx = x_ctx(3)
        with pytest.raises(NotInvertibleError):
            invert_unit(ctx.scalar(BETA))
        with pytest.raises(NotInvertibleError):
            invert_unit(ctx.gen("x1"))

    @settings(max_examples=200)
    @given(units())
    def test_two_sided_inverse(self, a):
        inv = invert_unit(a)
        assert a * inv == 1 and inv * a == 1


class TestSpecialize:
    def test_examples(self):
        ctx = x_ctx(3)
        x = ctx.gen("x1")
        assert specialize_beta(1 + x * BETA, 0) == 1
        assert specialize_beta(1 + x * BETA, -1) == 1 - x

    def test_expand_then_substitute(self):
        # x/(2 + beta x) at D=3, oracle: substitute beta=0 first, then expand
        ctx = x_ctx(3, 1)
        x = ctx.gen("x1")
        expanded = x * invert_unit(x * BETA + 2)
        assert specialize_beta(expanded, 0) == x * Fraction(1, 2)
        xs, b = sp.symbols("x b")
        oracle = sp.series((xs / (2 + b * xs)).subs(b, -1), xs, 0, 4).removeO()
        ours = specialize_beta(expanded, -1)
        assert ours == ctx.from_terms({(k,): Fraction(str(oracle.coeff(xs, k))) for k in range(1, 4)})

    @given(elements(), elements())
    def test_is_ring_homomorphism(self, a, b):
        for v in (0, -1):
            assert specialize_beta(a * b, v) == specialize_beta(a, v) * specialize_beta(b, v)
            assert specialize_beta(a + b, v) == specialize_beta(a, v) + specialize_beta(b, v)

    @given(elements())
    def test_only_beta_exponent_zero_remains(self, a):
        assert all(k == 0 for _, k, _ in specialize_beta(a, -1).iter_terms())


def test_beta_scalar_modes():
    assert beta_scalar() == BETA
    assert beta_scalar(0) == BetaPolynomial()
    assert beta_scalar(-1) == BetaPolynomial.const(-1)
