"""Laurent series in t_1..t_r supported in a shifted cone.

The cone is ``s_1 >= 0, s_1+s_2 >= 0, ..., s_1+...+s_r >= 0``.  Everything
here is phrased in partial-sum coordinates ``P_k(s) = s_1 + ... + s_k``:

* ``lower[k]`` bounds the support from below (``m + supp`` lies in the cone
  for the shift ``m`` with ``P(m) = -lower``);
* ``upper[k]`` is the exactness cap: every coefficient with
  ``P(s) <= upper`` componentwise is correct, everything above it is dropped.

With these two vectors the exact region of a product is
``min(upper_a + lower_b, upper_b + lower_a)``, and inverting a unit
``c0 + x`` with ``x`` supported in the cone minus the origin terminates
inside any finite cap.

Variable indices in the public builders are 1-based, as in t_1..t_r.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate, product
from typing import Callable, Iterable, Sequence

from .formal_group import fgl_inverse
from .graded_core import BETA, BetaPolynomial, NotInvertibleError

INF = math.inf

_ZERO = BetaPolynomial()


class ConeError(ValueError):
    """A term lies below the declared cone shift."""


class WindowError(ValueError):
    """A series is not exact on the region a computation needs."""


def partial_sums(s: Sequence[int]) -> tuple[int, ...]:
    return tuple(accumulate(s))


@dataclass(frozen=True)
class Window:
    """A box ``lower <= P(s) <= upper`` in partial-sum coordinates.

    A window with some ``upper[k] < lower[k]`` is empty; that happens when a
    truncation bound sits below the support of a shifted series.
    """

    lower: tuple
    upper: tuple

    def __post_init__(self):
        if len(self.lower) != len(self.upper):
            raise ValueError("lower and upper must have the same length")

    @property
    def r(self) -> int:
        return len(self.lower)

    @property
    def bounded(self) -> bool:
        return all(u != INF for u in self.upper)

    def is_empty(self) -> bool:
        return any(u < lo for lo, u in zip(self.lower, self.upper))

    def contains(self, s: Sequence[int]) -> bool:
        return all(lo <= p <= u for lo, p, u in zip(self.lower, partial_sums(s), self.upper))

    def points(self) -> Iterable[tuple[int, ...]]:
        """All exponent vectors in the window (upper must be finite)."""
        if not self.bounded:
            raise WindowError("cannot enumerate an unbounded window")
        if self.is_empty():
            return
        ranges = [range(lo, int(u) + 1) for lo, u in zip(self.lower, self.upper)]
        for ps in product(*ranges):
            yield tuple(b - a for a, b in zip((0,) + ps[:-1], ps))

    def intersect(self, other: "Window") -> "Window":
        return Window(tuple(map(max, self.lower, other.lower)),
                      tuple(map(min, self.upper, other.upper)))


def doubled_cap(cap: Sequence[int]) -> tuple[int, ...]:
    return tuple(c + max(c, 1) for c in cap)


def _add_coef(d: dict, s, c):
    if s in d:
        v = d[s] + c
        if v:
            d[s] = v
        else:
            del d[s]
    elif c:
        d[s] = c


class ConeLaurentSeries:
    """Cone-supported Laurent series with an explicit exactness cap.

    Coefficients are usually :class:`BetaPolynomial`; any commutative ring
    element works for construction, addition and scaling.  ``degree`` is an
    optional homogeneity flag (``deg t_i = 1``, ``deg beta = -1``).
    """

    __slots__ = ("lower", "upper", "terms", "degree")

    def __init__(self, terms: dict, lower: Sequence[int], upper: Sequence, degree: int | None = None):
        lower = tuple(lower)
        upper = tuple(upper)
        if len(lower) != len(upper):
            raise ValueError("lower and upper must have the same length")
        kept = {}
        for s, c in terms.items():
            if not c:
                continue
            if len(s) != len(lower):
                raise ValueError(f"exponent {s} has wrong length")
            p = partial_sums(s) if s else ()
            if any(pk < lo for pk, lo in zip(p, lower)):
                raise ConeError(f"term {s} lies outside the cone shifted by {lower}")
            if any(pk > u for pk, u in zip(p, upper)):
                continue
            kept[tuple(s)] = c
        self.lower = lower
        self.upper = upper
        self.terms = kept
        self.degree = degree

    # constructors -------------------------------------------------------
    @classmethod
    def monomial(cls, s: Sequence[int], coef=1, degree: int | None = None) -> "ConeLaurentSeries":
        s = tuple(s)
        coef = coef if isinstance(coef, BetaPolynomial) else BetaPolynomial.const(coef)
        if degree is None and len(coef._c) == 1:
            degree = sum(s) - coef.max_exponent()
        return cls({s: coef}, partial_sums(s) if s else (), (INF,) * len(s), degree)

    @classmethod
    def constant(cls, c, r: int) -> "ConeLaurentSeries":
        return cls.monomial((0,) * r, c)

    @classmethod
    def variable(cls, i: int, r: int) -> "ConeLaurentSeries":
        s = [0] * r
        s[i - 1] = 1
        return cls.monomial(s)

    # basic properties ---------------------------------------------------
    @property
    def r(self) -> int:
        return len(self.lower)

    @property
    def window(self) -> Window:
        return Window(self.lower, self.upper)

    @property
    def shift(self) -> tuple[int, ...]:
        """The vector m with m + supp inside the cone."""
        neg = [-lo for lo in self.lower]
        return tuple(b - a for a, b in zip([0] + neg[:-1], neg))

    def coefficient(self, s: Sequence[int]):
        s = tuple(s)
        p = partial_sums(s) if s else ()
        if any(pk > u for pk, u in zip(p, self.upper)):
            raise WindowError(f"coefficient of {s} is outside the exact window {self.upper}")
        return self.terms.get(s, _ZERO)

    def has_zero_constant_term(self) -> bool:
        return (0,) * self.r not in self.terms and all(lo >= 0 for lo in self.lower)

    def is_exact_zero(self) -> bool:
        return not self.terms and all(u == INF for u in self.upper)

    def __len__(self):
        return len(self.terms)

    def items(self):
        return sorted(self.terms.items())

    def check_cone(self) -> bool:
        return all(all(p >= lo for p, lo in zip(partial_sums(s), self.lower)) for s in self.terms)

    def check_homogeneous(self, degree: int | None = None) -> bool:
        """Coefficient of t^s must be homogeneous of degree ``d - |s|``."""
        d = self.degree if degree is None else degree
        if d is None:
            return True
        return all(c.is_homogeneous(d - sum(s)) for s, c in self.terms.items())

    # arithmetic ---------------------------------------------------------
    def _like(self, other) -> "ConeLaurentSeries":
        if isinstance(other, ConeLaurentSeries):
            if other.r != self.r:
                raise ValueError(f"series in {self.r} and {other.r} variables")
            return other
        if isinstance(other, (int, Fraction, BetaPolynomial)):
            return ConeLaurentSeries.constant(other, self.r)
        return NotImplemented

    def __add__(self, other):
        other = self._like(other)
        if other is NotImplemented:
            return NotImplemented
        # an exact zero carries no support, so it must not lower the cone shift
        if other.is_exact_zero():
            return self
        if self.is_exact_zero():
            return other
        terms = dict(self.terms)
        for s, c in other.terms.items():
            _add_coef(terms, s, c)
        degree = self.degree if self.degree == other.degree else None
        return ConeLaurentSeries(terms, map(min, self.lower, other.lower),
                                 map(min, self.upper, other.upper), degree)

    __radd__ = __add__

    def __neg__(self):
        return ConeLaurentSeries({s: -c for s, c in self.terms.items()},
                                 self.lower, self.upper, self.degree)

    def __sub__(self, other):
        other = self._like(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, BetaPolynomial)):
            return self._scale(other)
        other = self._like(other)
        if other is NotImplemented:
            return NotImplemented
        lower = tuple(a + b for a, b in zip(self.lower, other.lower))
        upper = tuple(min(ua + lb, ub + la) for ua, ub, la, lb
                      in zip(self.upper, other.upper, self.lower, other.lower))
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        bs = [(s, partial_sums(s), c) for s, c in b.items()]
        out: dict = {}
        for sa, ca in a.items():
            room = [u - p for u, p in zip(upper, partial_sums(sa))]
            for sb, pb, cb in bs:
                if all(p <= q for p, q in zip(pb, room)):
                    _add_coef(out, tuple(x + y for x, y in zip(sa, sb)), ca * cb)
        degree = None
        if self.degree is not None and other.degree is not None:
            degree = self.degree + other.degree
        return ConeLaurentSeries(out, lower, upper, degree)

    __rmul__ = __mul__

    def _scale(self, c) -> "ConeLaurentSeries":
        degree = None
        if self.degree is not None:
            if isinstance(c, BetaPolynomial):
                if len(c._c) == 1:
                    degree = self.degree - c.max_exponent()
            else:
                degree = self.degree
        return ConeLaurentSeries({s: v * c for s, v in self.terms.items()},
                                 self.lower, self.upper, degree)

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power; use inverse()")
        out = ConeLaurentSeries.constant(1, self.r)
        for _ in range(e):
            out = out * self
        return out

    def truncate(self, cap: Sequence) -> "ConeLaurentSeries":
        upper = tuple(map(min, self.upper, cap))
        return ConeLaurentSeries(self.terms, self.lower, upper, self.degree)

    def times_monomial(self, s: Sequence[int]) -> "ConeLaurentSeries":
        p = partial_sums(s)
        terms = {tuple(x + y for x, y in zip(k, s)): c for k, c in self.terms.items()}
        degree = None if self.degree is None else self.degree + sum(s)
        return ConeLaurentSeries(terms, tuple(a + b for a, b in zip(self.lower, p)),
                                 tuple(a + b for a, b in zip(self.upper, p)), degree)

    def inverse(self, cap: Sequence | None = None) -> "ConeLaurentSeries":
        """Inverse of a unit ``c0 + x`` with x supported in the cone minus 0."""
        zero = (0,) * self.r
        c0 = self.terms.get(zero)
        if c0 is None:
            raise NotInvertibleError("constant coefficient is zero")
        if isinstance(c0, BetaPolynomial):
            if not c0.is_constant():
                raise NotInvertibleError(f"constant coefficient {c0!r} is not a unit of Q[beta]")
            c0 = c0.constant_term()
        if any(lo < 0 for lo in self.lower):
            raise NotInvertibleError("series has support below the cone; shift it first")
        upper = self.upper if cap is None else tuple(map(min, self.upper, cap))
        if any(u == INF for u in upper):
            raise WindowError("inverse needs a finite exactness cap")
        inv_c0 = Fraction(1) / Fraction(c0)
        y = (self - c0).truncate(upper)._scale(inv_c0)
        total = ConeLaurentSeries.constant(1, self.r).truncate(upper)
        term = total
        while True:
            term = -(term * y)
            if not term.terms:
                break
            total = total + term
        degree = None if self.degree is None else -self.degree
        return ConeLaurentSeries(total._scale(inv_c0).terms, total.lower, upper, degree)

    # comparison ---------------------------------------------------------
    def mismatches(self, other: "ConeLaurentSeries", cap: Sequence | None = None) -> list:
        """Exponents where the two series differ inside their common exact window."""
        upper = tuple(map(min, self.upper, other.upper))
        if cap is not None:
            upper = tuple(map(min, upper, cap))
        bad = []
        for s in set(self.terms) | set(other.terms):
            if any(p > u for p, u in zip(partial_sums(s), upper)):
                continue
            if self.terms.get(s, _ZERO) != other.terms.get(s, _ZERO):
                bad.append(s)
        return sorted(bad)

    def agrees_with(self, other: "ConeLaurentSeries", cap: Sequence | None = None) -> bool:
        return not self.mismatches(other, cap)

    def __repr__(self):
        body = ", ".join(f"{s}: {c!r}" for s, c in self.items()[:8])
        more = "" if len(self.terms) <= 8 else f", ... ({len(self.terms)} terms)"
        return f"ConeLaurentSeries({{{body}{more}}}, lower={self.lower}, upper={self.upper})"


def embed(series: ConeLaurentSeries, positions: Sequence[int], r: int) -> ConeLaurentSeries:
    """Place a k-variable series into r variables at increasing 1-based positions."""
    positions = tuple(positions)
    if len(positions) != series.r or list(positions) != sorted(set(positions)):
        raise ValueError("positions must be strictly increasing, one per variable")
    if positions and positions[-1] > r:
        raise ValueError("position out of range")
    terms = {}
    for s, c in series.terms.items():
        full = [0] * r
        for p, e in zip(positions, s):
            full[p - 1] = e
        terms[tuple(full)] = c
    lower, upper = [], []
    seen = 0
    for k in range(1, r + 1):
        while seen < len(positions) and positions[seen] <= k:
            seen += 1
        lower.append(series.lower[seen - 1] if seen else 0)
        upper.append(series.upper[seen - 1] if seen else INF)
    return ConeLaurentSeries(terms, lower, upper, series.degree)


def _embed_capped(series: ConeLaurentSeries, positions: Sequence[int], cap: tuple) -> ConeLaurentSeries:
    """Embed a series built with ``_compact_cap(cap, positions)``.

    P_k is constant between consecutive positions, so being exact up to the
    minimum of ``cap`` over such a range is the same as being exact up to
    ``cap`` itself there.  Recording the full cap keeps later products from
    losing exactness.
    """
    if any(u < c for u, c in zip(series.upper, _compact_cap(cap, positions))):
        raise WindowError("compact series is not exact on its requested cap")
    out = embed(series, positions, len(cap))
    upper = tuple(INF if k + 1 < positions[0] else c for k, c in enumerate(cap))
    return ConeLaurentSeries(out.terms, out.lower, upper, out.degree)


def _compact_cap(cap: Sequence, positions: Sequence[int]) -> tuple:
    bounds = list(positions[1:]) + [len(cap) + 1]
    return tuple(min(cap[p - 1:q - 1]) for p, q in zip(positions, bounds))


def _padded(cap: Sequence, pad: int = 1) -> tuple:
    return tuple(c + pad for c in cap)


# compact (1- and 2-variable) expansions ----------------------------------------
def _empty_window(cap: tuple) -> ConeLaurentSeries | None:
    """Every factor below is supported in the unshifted cone; a negative cap leaves nothing."""
    if min(cap) < 0:
        return ConeLaurentSeries({}, (0,) * len(cap), cap)
    return None


def _inv_two_plus_beta_t(cap1: tuple, beta: BetaPolynomial) -> ConeLaurentSeries:
    empty = _empty_window(cap1)
    if empty is not None:
        return empty
    t = ConeLaurentSeries.variable(1, 1)
    return (t * beta + 2).inverse(cap1)


def _formal_inverse_var(i: int, r: int, cap: tuple, beta: BetaPolynomial) -> ConeLaurentSeries:
    t = ConeLaurentSeries.variable(i, r).truncate(cap)
    return fgl_inverse(t, beta)


def _reciprocal_bar(j: int, r: int, beta: BetaPolynomial) -> ConeLaurentSeries:
    """1/tbar_j = -(1 + beta*t_j)/t_j = -t_j^{-1} - beta, a Laurent polynomial."""
    s = [0] * r
    s[j - 1] = -1
    return ConeLaurentSeries.monomial(s, -1) - beta


def _pair_factor(cap2: tuple, beta: BetaPolynomial) -> ConeLaurentSeries:
    empty = _empty_window(cap2)
    if empty is not None:
        return empty
    # (1 - tbar_1/tbar_2) / (1 - t_1/tbar_2) in variables (t_1, t_2)
    inv_bar2 = _reciprocal_bar(2, 2, beta)
    tbar1 = _formal_inverse_var(1, 2, _padded(cap2), beta)
    t1 = ConeLaurentSeries.variable(1, 2)
    num = 1 - tbar1 * inv_bar2
    den = 1 - t1 * inv_bar2
    return (num * den.inverse(cap2)).truncate(cap2)


def _entry_factor(cap2: tuple, e1: int, e2: int, beta: BetaPolynomial) -> ConeLaurentSeries:
    empty = _empty_window(cap2)
    if empty is not None:
        return empty
    # (1 + beta*tbar_1)^e1 (1 + beta*tbar_2)^e2 * pair factor
    pad = _padded(cap2)
    g1 = 1 + _formal_inverse_var(1, 2, pad, beta) * beta
    g2 = 1 + _formal_inverse_var(2, 2, pad, beta) * beta
    return (g1**e1 * g2**e2 * _pair_factor(cap2, beta)).truncate(cap2)


# public builders ---------------------------------------------------------------
def expand_inv_two_plus_beta_t(i: int, cap: Sequence[int], beta: BetaPolynomial = BETA) -> ConeLaurentSeries:
    """1/(2 + beta*t_i) = sum_k (1/2)(-beta/2)^k t_i^k, exact for P(s) <= cap."""
    cap = tuple(cap)
    if not 1 <= i <= len(cap):
        raise ValueError(f"variable index {i} out of range")
    series = _inv_two_plus_beta_t(_compact_cap(cap, [i]), beta)
    return _embed_capped(series, [i], cap)


def expand_pair_product_factor(i: int, j: int, cap: Sequence[int], beta: BetaPolynomial = BETA) -> ConeLaurentSeries:
    """(1 - tbar_i/tbar_j)/(1 - t_i/tbar_j) for i < j, expanded in the cone.

    Negative exponents only occur in t_j.  At beta = 0 this is
    (1 - t_i/t_j)/(1 + t_i/t_j).
    """
    cap = tuple(cap)
    if not 1 <= i < j <= len(cap):
        raise ValueError(f"need 1 <= i < j <= r, got i={i}, j={j}")
    series = _pair_factor(_compact_cap(cap, [i, j]), beta)
    return _embed_capped(series, [i, j], cap)


def expand_pfaffian_entry_factor(i: int, j: int, m: int, cap: Sequence[int],
                                 beta: BetaPolynomial = BETA) -> ConeLaurentSeries:
    """(1+beta*tbar_i)^(2m-i-1) (1+beta*tbar_j)^(2m-j) times the pair factor."""
    cap = tuple(cap)
    if not 1 <= i < j <= 2 * m or j > len(cap):
        raise ValueError(f"need 1 <= i < j <= 2m <= r, got i={i}, j={j}, m={m}, r={len(cap)}")
    series = _entry_factor(_compact_cap(cap, [i, j]), 2 * m - i - 1, 2 * m - j, beta)
    return _embed_capped(series, [i, j], cap)


def window_stability_check(builder: Callable[[tuple], ConeLaurentSeries], cap: Sequence[int]) -> bool:
    """Rebuild with a doubled cap; True iff nothing inside ``cap`` changes."""
    cap = tuple(cap)
    small = builder(cap)
    big = builder(doubled_cap(cap))
    if any(u < c for u, c in zip(small.upper, cap)):
        return False
    return small.agrees_with(big, cap)
