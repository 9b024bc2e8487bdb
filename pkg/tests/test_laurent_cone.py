from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from ckpfaffian.graded_core import BETA, BetaPolynomial, beta_scalar
from ckpfaffian.laurent_cone import (INF, ConeError, ConeLaurentSeries, Window, WindowError,
                                     doubled_cap, expand_inv_two_plus_beta_t,
                                     expand_pair_product_factor, expand_pfaffian_entry_factor,
                                     partial_sums, window_stability_check)

from .oracles import b, cone_coefficients, pair_expr, tbar, to_sympy

T = sp.symbols("t1:5")


def mono(s, c=1):
    return ConeLaurentSeries.monomial(s, c)


def assert_matches_oracle(series, expr, positions, order):
    """Compare the compact (i, j) part of ``series`` with a sympy expansion in t1, t2."""
    oracle = cone_coefficients(expr, T[:len(positions)], order)
    ours = {}
    for s, c in series.terms.items():
        key = tuple(s[p - 1] for p in positions)
        if all(v < order for v in partial_sums(key)):
            ours[key] = sp.expand(to_sympy(c))
    assert ours == oracle


class TestArithmetic:
    def test_monomial_cancellation(self):
        a = mono((1, 0))
        inv = ConeLaurentSeries({(-1, 0): BetaPolynomial.const(1)}, (-1, -1), (INF, INF))
        assert (a * inv).terms == {(0, 0): BetaPolynomial.const(1)}

    def test_unit(self):
        a = expand_pair_product_factor(1, 2, (3, 3))
        assert (a * 1).terms == a.terms

    def test_cauchy_product_on_diagonal(self):
        cap = (4, 0)
        alt = ConeLaurentSeries({(k, -k): BetaPolynomial.const((-1) ** k) for k in range(5)}, (0, 0), cap)
        ones = ConeLaurentSeries({(k, -k): BetaPolynomial.const(1) for k in range(5)}, (0, 0), cap)
        prod = alt * ones
        assert [prod.coefficient((k, -k)) for k in range(5)] == [BetaPolynomial.const(v) for v in (1, 0, 1, 0, 1)]

    def test_cone_violation_rejected(self):
        with pytest.raises(ConeError):
            ConeLaurentSeries({(-1, 0): BetaPolynomial.const(1)}, (0, 0), (3, 3))

    def test_outside_window_is_an_error(self):
        s = expand_inv_two_plus_beta_t(1, (2,))
        with pytest.raises(WindowError):
            s.coefficient((3,))

    def test_inverse_needs_finite_cap(self):
        with pytest.raises(WindowError):
            (mono((1,)) + 1).inverse()

    def test_product_shift_adds(self):
        a = mono((2, -1))
        c = mono((0, 1))
        assert (a * c).lower == tuple(x + y for x, y in zip(a.lower, c.lower))

    def test_window_points(self):
        w = Window((0, 0), (1, 1))
        pts = set(w.points())
        assert pts == {(0, 0), (0, 1), (1, -1), (1, 0)}
        assert all(w.contains(p) for p in pts)


class TestInvTwoPlusBetaT:
    def test_coefficients(self):
        s = expand_inv_two_plus_beta_t(1, (3,))
        assert s.coefficient((0,)) == BetaPolynomial.const(Fraction(1, 2))
        assert s.coefficient((1,)) == BetaPolynomial({1: Fraction(-1, 4)})
        assert s.coefficient((3,)) == BetaPolynomial({3: Fraction(-1, 16)})

    def test_inverse_check(self):
        cap = (5, 5)
        s = expand_inv_two_plus_beta_t(2, cap)
        t2 = ConeLaurentSeries.variable(2, 2)
        assert (s * (t2 * BETA + 2)).truncate(cap).terms == {(0, 0): BetaPolynomial.const(1)}

    def test_stable(self):
        assert window_stability_check(lambda c: expand_inv_two_plus_beta_t(1, c), (3, 5))


class TestPairFactor:
    def test_constant_term(self):
        assert expand_pair_product_factor(1, 2, (2, 2)).coefficient((0, 0)) == BetaPolynomial.const(1)

    def test_first_order(self):
        assert expand_pair_product_factor(1, 2, (2, 2)).coefficient((1, -1)) == BetaPolynomial.const(-2)

    def test_beta_zero_is_classical(self):
        # (1 - u)/(1 + u) = 1 + 2 sum_{k>=1} (-u)^k with u = t_i/t_j
        s = expand_pair_product_factor(1, 2, (6, 6), beta_scalar(0))
        expected = {(0, 0): 1}
        expected.update({(k, -k): 2 * (-1) ** k for k in range(1, 7)})
        assert {k: v.constant_term() for k, v in s.terms.items()} == expected

    def test_matches_sympy(self):
        s = expand_pair_product_factor(1, 2, (4, 4))
        assert_matches_oracle(s, pair_expr(T[0], T[1]), (1, 2), 5)

    def test_matches_sympy_embedded(self):
        s = expand_pair_product_factor(2, 4, (3, 3, 3, 3))
        assert_matches_oracle(s, pair_expr(T[0], T[1]), (2, 4), 4)
        assert all(k[0] == 0 and k[2] == 0 for k in s.terms)

    def test_reciprocal_identity(self):
        # 1/tbar = -1/t - beta
        t = T[0]
        assert sp.simplify(1 / tbar(t) - (-1 / t - b)) == 0

    def test_cone_and_grading(self):
        s = expand_pair_product_factor(1, 3, (5, 5, 5))
        assert s.check_cone() and s.check_homogeneous(0)
        assert all(s_[0] >= 0 and s_[0] + s_[2] >= 0 for s_ in s.terms)

    def test_index_order(self):
        with pytest.raises(ValueError):
            expand_pair_product_factor(2, 2, (3, 3))
        with pytest.raises(ValueError):
            expand_pair_product_factor(2, 1, (3, 3))

    def test_window_4_vs_8(self):
        assert window_stability_check(lambda c: expand_pair_product_factor(1, 2, c), (4, 4))


def entry_expr(i, j, m, ti, tj):
    return (1 + b * tbar(ti)) ** (2 * m - i - 1) * (1 + b * tbar(tj)) ** (2 * m - j) * pair_expr(ti, tj)


class TestEntryFactor:
    def test_lowest_terms(self):
        s = expand_pfaffian_entry_factor(1, 2, 1, (2, 2))
        assert s.coefficient((0, 0)) == BetaPolynomial.const(1)
        assert s.coefficient((1, -1)) == BetaPolynomial.const(-2)

    @pytest.mark.parametrize("i,j,m", [(1, 2, 1), (1, 2, 2), (1, 4, 2), (2, 3, 2), (3, 4, 2), (2, 5, 3)])
    def test_matches_sympy(self, i, j, m):
        cap = (4,) * (2 * m)
        s = expand_pfaffian_entry_factor(i, j, m, cap)
        assert_matches_oracle(s, entry_expr(i, j, m, T[0], T[1]), (i, j), 5)

    def test_half_size_one_is_the_pair_factor(self):
        # both prefactor exponents 2m-i-1 and 2m-j vanish
        cap = (5, 5)
        s = expand_pfaffian_entry_factor(1, 2, 1, cap)
        pair = expand_pair_product_factor(1, 2, cap)
        assert s.agrees_with(pair, cap)

    @pytest.mark.parametrize("m", [1, 2, 3, 4])
    def test_last_column_has_no_positive_powers(self, m):
        cap = (6,) * (2 * m)
        for i in range(1, 2 * m):
            s = expand_pfaffian_entry_factor(i, 2 * m, m, cap)
            assert all(k[2 * m - 1] <= 0 for k in s.terms)

    def test_index_violation(self):
        with pytest.raises(ValueError):
            expand_pfaffian_entry_factor(1, 3, 1, (3, 3, 3))

    def test_integral_coefficients(self):
        s = expand_pfaffian_entry_factor(1, 3, 2, (6,) * 4)
        assert all(c.has_integer_coefficients() for c in s.terms.values())
        assert s.check_homogeneous(0)


class TestStability:
    def test_doubled_cap(self):
        assert doubled_cap((4, 0, -1)) == (8, 1, 0)

    def test_mis_windowed_builder_fails(self):
        def sloppy(cap):
            # truncates one step early, so the cap is claimed but not honoured
            s = expand_inv_two_plus_beta_t(1, cap)
            return ConeLaurentSeries({k: v for k, v in s.terms.items() if k[0] < cap[0]}, s.lower, s.upper)
        assert not window_stability_check(sloppy, (3,))

    @given(st.integers(1, 4), st.integers(0, 6))
    def test_pair_factor_stable(self, j, w):
        cap = (w,) * 5
        assert window_stability_check(lambda c: expand_pair_product_factor(1, j + 1, c), cap)


@given(st.lists(st.integers(-2, 3), min_size=2, max_size=2), st.lists(st.integers(-2, 3), min_size=2, max_size=2))
def test_product_exact_inside_declared_window(s1, s2):
    # multiply two truncated factors and compare with a product built from doubled caps
    cap = (3, 3)
    a = expand_pair_product_factor(1, 2, cap).times_monomial(s1)
    c = expand_inv_two_plus_beta_t(1, cap).times_monomial(s2)
    big = doubled_cap(cap)
    a2 = expand_pair_product_factor(1, 2, big).times_monomial(s1)
    c2 = expand_inv_two_plus_beta_t(1, big).times_monomial(s2)
    small, large = a * c, a2 * c2
    assert small.agrees_with(large)
    assert small.check_cone()
