"""Degeneracy-locus classes by the product formula and by the Pfaffian formula.

Product side::

    [X_lambda] = phi( prod_i t_i^{lambda_i}/(2 + beta t_i)
                      prod_{i<j} (1 - tbar_i/tbar_j)/(1 - t_i/tbar_j) )

where phi sends t_1^{s_1}...t_r^{s_r} to S^{(1)}_{s_1}...S^{(r)}_{s_r}.

Pfaffian side: pad lambda with a zero part when r is odd (2m parts), expand

    (1+beta tbar_i)^{2m-i-1} (1+beta tbar_j)^{2m-j} (1 - tbar_i/tbar_j)/(1 - t_i/tbar_j)
        = sum gamma^{ij}_{ab} t_i^a t_j^b,

and take Pf( sum_{a,b} gamma^{ij}_{ab} P^{(i)}_{lambda_i+a} P^{(j)}_{lambda_j+b} ),
with the padded slot using P^{(0)}_m = (-beta)^{-m}.

Exactness: a nonzero term of phi(t^s) has generator degree
sum_j max(s_j, 0) >= P_k(s) for every partial sum, so every series only needs
to be exact for P(s) <= D.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .graded_core import BETA, AlgebraElement, BetaPolynomial
from .laurent_cone import (ConeLaurentSeries, WindowError, doubled_cap, expand_inv_two_plus_beta_t,
                           expand_pair_product_factor, expand_pfaffian_entry_factor, partial_sums)
from .segre import PClassTable, SegreProvider


class PartitionError(ValueError):
    pass


@dataclass(frozen=True)
class StrictPartition:
    """Strictly decreasing positive parts, largest part at most n."""

    parts: tuple
    n: int

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        object.__setattr__(self, "parts", parts)
        if self.n < 1:
            raise PartitionError("n must be >= 1")
        if any(p <= 0 for p in parts):
            raise PartitionError(f"parts must be positive: {parts}")
        if any(a <= b for a, b in zip(parts, parts[1:])):
            raise PartitionError(f"parts must be strictly decreasing: {parts}")
        if parts and parts[0] > self.n:
            raise PartitionError(f"largest part {parts[0]} exceeds n={self.n}")

    @classmethod
    def parse(cls, text: str, n: int) -> "StrictPartition":
        text = text.strip()
        if text in ("", "0", "()", "empty"):
            return cls((), n)
        try:
            parts = tuple(int(p) for p in text.replace(" ", "").split(","))
        except ValueError as exc:
            raise PartitionError(f"cannot parse partition {text!r}") from exc
        return cls(parts, n)

    @classmethod
    def coerce(cls, obj, n: int) -> "StrictPartition":
        if isinstance(obj, StrictPartition):
            if obj.n != n:
                return cls(obj.parts, n)
            return obj
        if isinstance(obj, str):
            return cls.parse(obj, n)
        return cls(tuple(obj), n)

    @property
    def r(self) -> int:
        return len(self.parts)

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def half_size(self) -> int:
        return (self.r + 1) // 2

    def padded(self) -> tuple:
        return self.parts + (0,) * (self.r % 2)

    def __str__(self):
        return ",".join(map(str, self.parts)) or "empty"


def strict_partitions(n: int) -> list[StrictPartition]:
    """All of SP(n), ordered by size then reverse-lexicographically."""
    out = []
    for mask in range(1 << n):
        parts = tuple(p for p in range(n, 0, -1) if mask >> (p - 1) & 1)
        out.append(StrictPartition(parts, n))
    out.sort(key=lambda lam: (lam.size, [-p for p in lam.parts]))
    return out


# gamma tables ---------------------------------------------------------------
@dataclass(frozen=True)
class GammaTable:
    """gamma^{ij}_{ab} for 1 <= i < j <= 2m, exact for a <= window, a+b <= window."""

    half_size: int
    window: int
    beta: BetaPolynomial
    entries: dict

    def coefficient(self, i: int, j: int, a: int, b: int) -> BetaPolynomial:
        return self.entries[(i, j)].get((a, b), BetaPolynomial())

    def support_violations(self) -> list:
        """Keys breaking a >= 0, a+b >= 0, integrality, or b <= 0 when j = 2m."""
        bad = []
        for (i, j), coefs in self.entries.items():
            for (a, b), c in coefs.items():
                if a < 0 or a + b < 0 or not c.has_integer_coefficients():
                    bad.append((i, j, a, b))
                elif j == 2 * self.half_size and b > 0:
                    bad.append((i, j, a, b))
        return bad

    def check_support(self) -> bool:
        return not self.support_violations()


def _pick(s: tuple, i: int, j: int) -> tuple:
    return s[i - 1], s[j - 1]


@lru_cache(maxsize=64)
def gamma_table(m: int, window: int, beta: BetaPolynomial = BETA) -> GammaTable:
    if m < 1:
        raise ValueError("half size must be >= 1")
    cap = (window,) * (2 * m)
    entries = {}
    for i in range(1, 2 * m + 1):
        for j in range(i + 1, 2 * m + 1):
            series = expand_pfaffian_entry_factor(i, j, m, cap, beta)
            entries[(i, j)] = {_pick(s, i, j): c for s, c in series.terms.items()}
    return GammaTable(m, window, beta, entries)


# Pfaffians ------------------------------------------------------------------
class SkewMatrix:
    """Skew-symmetric matrix given by its strict upper triangle (1-based)."""

    def __init__(self, size: int, upper: dict, one, zero=None):
        if size < 0:
            raise ValueError("size must be >= 0")
        self.size = size
        self.upper = dict(upper)
        self.one = one
        self.zero = one - one if zero is None else zero
        for (i, j) in self.upper:
            if not 1 <= i < j <= size:
                raise ValueError(f"entry ({i},{j}) is not strictly upper triangular")

    def __getitem__(self, ij):
        i, j = ij
        if i == j:
            return self.zero
        if i < j:
            return self.upper.get((i, j), self.zero)
        return -self.upper.get((j, i), self.zero)


def pfaffian(A: SkewMatrix):
    """Expansion along the first row, memoized on the remaining index set."""
    if A.size % 2:
        raise ValueError("Pfaffian of an odd-size matrix")
    memo = {}

    def pf(idx: tuple):
        if not idx:
            return A.one
        got = memo.get(idx)
        if got is not None:
            return got
        first, rest = idx[0], idx[1:]
        total = A.zero
        for k, other in enumerate(rest):
            a = A[first, other]
            if not a and not isinstance(a, ConeLaurentSeries):
                continue
            term = a * pf(rest[:k] + rest[k + 1:])
            total = total - term if k % 2 else total + term
        memo[idx] = total
        return total

    return pf(tuple(range(1, A.size + 1)))


# phi ------------------------------------------------------------------------
def _require_exact(series: ConeLaurentSeries, D: int):
    if any(u < D for u in series.upper):
        raise WindowError(f"series is exact only up to {series.upper}, need {D} in every partial sum")


def _phi_group(terms: dict, slot: int, provider: SegreProvider, last_first: bool) -> AlgebraElement:
    ctx = provider.context
    if not next(iter(terms)):
        c = next(iter(terms.values()))
        return ctx.scalar(c)
    groups: dict[int, dict] = {}
    for s, c in terms.items():
        if last_first:
            groups.setdefault(s[-1], {})[s[:-1]] = c
        else:
            groups.setdefault(s[0], {})[s[1:]] = c
    total = ctx.zero()
    D = provider.D
    for e, sub in sorted(groups.items()):
        if e > D:
            continue
        seg = provider.lookup(slot, e)
        if not seg:
            continue
        inner = _phi_group(sub, slot - 1 if last_first else slot + 1, provider, last_first)
        total = total + seg * inner
    return total


def phi_apply(series: ConeLaurentSeries, provider: SegreProvider) -> AlgebraElement:
    """Substitute t^s -> prod_j S^{(j)}_{s_j}, grouping terms by leading exponent."""
    _require_exact(series, provider.D)
    if not series.terms:
        return provider.context.zero()
    return _phi_group(series.terms, 1, provider, last_first=False)


def phi_stagewise(series: ConeLaurentSeries, provider: SegreProvider) -> AlgebraElement:
    """Same substitution, eliminating t_r first and t_1 last."""
    _require_exact(series, provider.D)
    if not series.terms:
        return provider.context.zero()
    return _phi_group(series.terms, series.r, provider, last_first=True)


def _flag(value: AlgebraElement, provider: SegreProvider, degree: int) -> AlgebraElement:
    if provider.symbolic:
        value.hdeg = degree
    return value


# product pipeline -------------------------------------------------------------
def product_series(lam: StrictPartition, cap: Sequence, beta: BetaPolynomial = BETA) -> ConeLaurentSeries:
    """prod_i 1/(2+beta t_i) prod_{i<j} pair(i, j), exact for P(s) <= cap."""
    r = lam.r
    cap = tuple(cap)
    out = ConeLaurentSeries.constant(1, r)
    for i in range(1, r + 1):
        out = out * expand_inv_two_plus_beta_t(i, cap, beta)
    for i in range(1, r + 1):
        for j in range(i + 1, r + 1):
            out = out * expand_pair_product_factor(i, j, cap, beta)
    return out.truncate(cap)


def default_product_cap(lam: StrictPartition, D: int) -> tuple:
    return tuple(D - p for p in partial_sums(lam.parts)) if lam.parts else ()


def class_via_product(lam, provider: SegreProvider, cap: Sequence | None = None) -> AlgebraElement:
    lam = _as_partition(lam, provider)
    if lam.r == 0:
        return _flag(provider.context.one(), provider, 0)
    if cap is None:
        cap = default_product_cap(lam, provider.D)
    series = product_series(lam, cap, provider.beta).times_monomial(lam.parts)
    return _flag(phi_apply(series, provider), provider, lam.size)


# Pfaffian pipeline -------------------------------------------------------------
def pfaffian_matrix(lam, provider: SegreProvider, window: int | None = None,
                    table: PClassTable | None = None) -> SkewMatrix:
    lam = _as_partition(lam, provider)
    ctx = provider.context
    D = provider.D
    window = D if window is None else window
    if window < D:
        raise WindowError(f"gamma window {window} is below the truncation degree {D}")
    parts = lam.padded()
    m = len(parts) // 2
    gamma = gamma_table(m, window, provider.beta)
    table = PClassTable(provider) if table is None else table
    slots = [i + 1 if p > 0 else 0 for i, p in enumerate(parts)]
    upper = {}
    for i in range(1, 2 * m + 1):
        li, si = parts[i - 1], slots[i - 1]
        for j in range(i + 1, 2 * m + 1):
            lj, sj = parts[j - 1], slots[j - 1]
            by_a: dict[int, AlgebraElement] = {}
            for (a, b), c in gamma.entries[(i, j)].items():
                if li + a > D or lj + b > D:
                    continue
                inner = by_a.get(a, ctx.zero())
                by_a[a] = inner + table.p(sj, lj + b) * c
            entry = ctx.zero()
            for a, inner in sorted(by_a.items()):
                entry = entry + table.p(si, li + a) * inner
            upper[(i, j)] = entry
    return SkewMatrix(2 * m, upper, ctx.one(), ctx.zero())


def class_via_pfaffian(lam, provider: SegreProvider, window: int | None = None) -> AlgebraElement:
    lam = _as_partition(lam, provider)
    if lam.r == 0:
        return _flag(provider.context.one(), provider, 0)
    value = pfaffian(pfaffian_matrix(lam, provider, window))
    return _flag(value, provider, lam.size)


def _as_partition(lam, provider: SegreProvider) -> StrictPartition:
    n = getattr(provider, "n", None)
    if isinstance(lam, StrictPartition):
        if n is not None and lam.n != n:
            return StrictPartition(lam.parts, n)
        return lam
    if n is None:
        parts = tuple(lam)
        n = max(parts, default=1)
        return StrictPartition(parts, n)
    return StrictPartition.coerce(lam, n)


def class_window_stable(lam, provider: SegreProvider, pipeline: str = "product") -> bool:
    """Recompute with every window doubled and compare."""
    lam = _as_partition(lam, provider)
    if lam.r == 0:
        return True
    D = provider.D
    if pipeline == "product":
        cap = default_product_cap(lam, D)
        return class_via_product(lam, provider, cap) == class_via_product(lam, provider, doubled_cap(cap))
    if pipeline == "pfaffian":
        return class_via_pfaffian(lam, provider, D) == class_via_pfaffian(lam, provider, doubled_cap((D,))[0])
    raise ValueError(f"unknown pipeline {pipeline!r}")


# Schur-Pfaffian identity ------------------------------------------------------
def _inv_bracket_two(i: int, cap: tuple, r: int, beta: BetaPolynomial) -> ConeLaurentSeries:
    """1/[2]_i: 1/(2 + beta t_i) on real slots, 1 on the padding slot."""
    if i > r:
        return ConeLaurentSeries.constant(1, len(cap))
    return expand_inv_two_plus_beta_t(i, cap, beta)


def schur_pfaffian_sides(lam, window: int, beta: BetaPolynomial = BETA,
                         perturb: tuple | None = None) -> tuple:
    """Both sides of the Schur-Pfaffian identity as series in 2m variables.

    ``perturb = (i, j, (a, b))`` flips the sign of one gamma coefficient.
    Returns ``(lhs, rhs, cap)`` where ``cap`` is the region being compared.
    """
    if not isinstance(lam, StrictPartition):
        lam = StrictPartition(tuple(lam), max(tuple(lam), default=1))
    r = lam.r
    parts = lam.padded()
    size = len(parts)
    m = size // 2
    base = (window,) * size
    cap = tuple(p + window for p in partial_sums(parts))

    lhs = ConeLaurentSeries.constant(1, size)
    for i in range(1, size + 1):
        lhs = lhs * _inv_bracket_two(i, base, r, beta)
    for i in range(1, size + 1):
        for j in range(i + 1, size + 1):
            lhs = lhs * expand_pair_product_factor(i, j, base, beta)
    lhs = lhs.truncate(base).times_monomial(parts)

    upper = {}
    for i in range(1, size + 1):
        for j in range(i + 1, size + 1):
            factor = expand_pfaffian_entry_factor(i, j, m, base, beta)
            if perturb is not None and perturb[:2] == (i, j):
                a, b = perturb[2]
                s = [0] * size
                s[i - 1], s[j - 1] = a, b
                s = tuple(s)
                terms = dict(factor.terms)
                if s in terms:
                    terms[s] = -terms[s]
                else:
                    terms[s] = BetaPolynomial.const(1)
                factor = ConeLaurentSeries(terms, factor.lower, factor.upper)
            entry = factor * _inv_bracket_two(i, base, r, beta) * _inv_bracket_two(j, base, r, beta)
            shift = [0] * size
            shift[i - 1], shift[j - 1] = parts[i - 1], parts[j - 1]
            upper[(i, j)] = entry.times_monomial(shift)
    one = ConeLaurentSeries.constant(1, size)
    rhs = pfaffian(SkewMatrix(size, upper, one))
    return lhs, rhs, cap


def verify_schur_pfaffian_identity(lam, window: int, beta: BetaPolynomial = BETA,
                                   perturb: tuple | None = None) -> bool:
    if not isinstance(lam, StrictPartition):
        lam = StrictPartition(tuple(lam), max(tuple(lam), default=1))
    if lam.r == 0:
        return True
    lhs, rhs, cap = schur_pfaffian_sides(lam, window, beta, perturb)
    for side in (lhs, rhs):
        if any(u < c for u, c in zip(side.upper, cap)):
            return False
    return lhs.agrees_with(rhs, cap)


def generic_partition(r: int) -> StrictPartition:
    """(r, r-1, ..., 1), the smallest strict partition with r parts."""
    return StrictPartition(tuple(range(r, 0, -1)), max(r, 1))


def dyadic(value: AlgebraElement) -> bool:
    return value.has_dyadic_coefficients()
