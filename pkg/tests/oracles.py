"""Independent reference computations (sympy and brute force)."""
from fractions import Fraction
from itertools import permutations

import sympy as sp

from ckpfaffian.graded_core import BetaPolynomial

b = sp.Symbol("b")


def to_sympy(p: BetaPolynomial):
    return sum((sp.Rational(q.numerator, q.denominator) * b ** k for k, q in p.items()), sp.Integer(0))


def from_sympy(expr) -> BetaPolynomial:
    poly = sp.Poly(sp.expand(expr), b)
    return BetaPolynomial({k[0]: Fraction(str(c)) for k, c in poly.terms()})


def cone_coefficients(expr, tvars, order):
    """Coefficients of a cone-supported expansion with partial sums < ``order``.

    Substituting t_k = q_k q_{k+1} ... q_r turns t^s into prod q_l^{P_l(s)},
    so the cone expansion becomes an ordinary Taylor expansion in q.
    """
    r = len(tvars)
    qs = sp.symbols(f"q1:{r + 1}")
    sub = {t: sp.Mul(*qs[k:]) for k, t in enumerate(tvars)}
    f = sp.together(expr.subs(sub))
    out = {}

    def walk(g, k, prefix):
        if k == r:
            val = sp.simplify(g)
            if val != 0:
                ps = prefix
                s = tuple(p - q for p, q in zip(ps, (0,) + ps[:-1]))
                out[s] = sp.expand(val)
            return
        ser = sp.series(g, qs[k], 0, order).removeO()
        for e in range(order):
            c = ser.coeff(qs[k], e)
            if c != 0:
                walk(c, k + 1, prefix + (e,))

    walk(f, 0, ())
    return out


def tbar(t):
    return -t / (1 + b * t)


def pair_expr(ti, tj):
    return (1 - tbar(ti) / tbar(tj)) / (1 - ti / tbar(tj))


def pfaffian_by_matchings(size, entry, zero, one):
    """Signed sum over perfect matchings of 1..size."""
    def matchings(idx):
        if not idx:
            yield [], 1
            return
        first, rest = idx[0], idx[1:]
        for k, other in enumerate(rest):
            for m, sign in matchings(rest[:k] + rest[k + 1:]):
                yield [(first, other)] + m, sign * (-1) ** k
    total = zero
    for m, sign in matchings(tuple(range(1, size + 1))):
        term = one
        for i, j in m:
            term = term * entry(i, j)
        total = total + term if sign > 0 else total - term
    return total


def det_leibniz(size, entry, zero, one):
    total = zero
    for perm in permutations(range(1, size + 1)):
        inversions = sum(1 for a in range(size) for c in range(a + 1, size) if perm[a] > perm[c])
        term = one
        for i, p in enumerate(perm, start=1):
            term = term * entry(i, p)
        total = total - term if inversions % 2 else total + term
    return total
