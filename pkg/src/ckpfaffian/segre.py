"""Segre classes of virtual bundles and the P-classes built from them.

The generating function is

    S(E - F; u) = 1/(1 + beta/u) * c(E - F; beta) / c(E - F; -u),

with ``c(E - F; u) = c(E; u)/c(F; u)``.  Writing ``g(u)`` for the power
series ``c(E-F; beta)/c(E-F; -u)``, the coefficient of ``u^m`` is
``sum_{k >= max(0, -m)} (-beta)^k g_{m+k}``.  The coefficient of ``u^j`` in
``g`` has generator degree >= j, so ``g`` is a polynomial modulo truncation.

Two coefficient models are provided:

* point model -- the base is a point, so only the Chern roots x_1..x_n of
  U^dual survive and every slot j sees the same classes;
* free model -- the positive Segre classes of each slot are independent
  generators ``s{j}_{m}`` of degree m.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .graded_core import (BETA, AlgebraContext, AlgebraElement, BetaPolynomial,
                          is_symbolic)


@dataclass(frozen=True)
class ChernSeries:
    """c(E; u) = sum_i c_i(E) u^i as a tuple of algebra elements, c_0 = 1."""

    coefficients: tuple
    rank: int | None = None

    def __post_init__(self):
        if not self.coefficients or self.coefficients[0] != 1:
            raise ValueError("a Chern series must have constant term 1")
        if any(not c.has_zero_constant_term() for c in self.coefficients[1:]):
            raise ValueError("higher Chern classes must have zero constant term")
        if self.rank is not None and len(self.coefficients) > self.rank + 1:
            raise ValueError("more Chern classes than the rank allows")

    @property
    def ctx(self) -> AlgebraContext:
        return self.coefficients[0].ctx

    @classmethod
    def trivial(cls, ctx: AlgebraContext, rank: int | None = 0) -> "ChernSeries":
        return cls((ctx.one(),), rank)

    @classmethod
    def from_roots(cls, roots: Sequence[AlgebraElement]) -> "ChernSeries":
        """prod_i (1 + x_i u)."""
        if not roots:
            raise ValueError("use ChernSeries.trivial for a rank-0 bundle")
        ctx = roots[0].ctx
        coeffs = [ctx.one()]
        for x in roots:
            nxt = coeffs + [ctx.zero()]
            for i in range(len(coeffs)):
                nxt[i + 1] = nxt[i + 1] + coeffs[i] * x
            coeffs = nxt
        return cls(tuple(coeffs), len(roots))

    def evaluate(self, value: BetaPolynomial) -> AlgebraElement:
        total = self.ctx.zero()
        for i, c in enumerate(self.coefficients):
            total = total + c * value**i
        return total


def _series_mul(a: list, b: list, order: int) -> list:
    out = [a[0].ctx.zero() for _ in range(order + 1)]
    for i, x in enumerate(a[:order + 1]):
        if not x:
            continue
        for j, y in enumerate(b[:order + 1 - i]):
            if y:
                out[i + j] = out[i + j] + x * y
    return out


def _series_inverse(a: list, order: int) -> list:
    """Inverse of a power series in u with constant term 1."""
    ctx = a[0].ctx
    inv = [ctx.one()]
    for n in range(1, order + 1):
        acc = ctx.zero()
        for i in range(1, min(n, len(a) - 1) + 1):
            if a[i]:
                acc = acc + a[i] * inv[n - i]
        inv.append(-acc)
    return inv


def segre_g_series(E: ChernSeries, F: ChernSeries, beta: BetaPolynomial = BETA) -> list[AlgebraElement]:
    """Coefficients g_0..g_D of c(E-F; beta)/c(E-F; -u)."""
    ctx = E.ctx
    if F.ctx != ctx:
        raise ValueError("E and F live in different contexts")
    D = ctx.D
    ratio_at_beta = E.evaluate(beta) * F.evaluate(beta).inverse()
    f_minus = [c * (-1) ** i for i, c in enumerate(F.coefficients)]
    e_minus = [c * (-1) ** i for i, c in enumerate(E.coefficients)]
    quotient = _series_mul(f_minus, _series_inverse(e_minus, D), D)
    return [ratio_at_beta * q for q in quotient]


def segre_from_g(g: Sequence[AlgebraElement], m: int, beta: BetaPolynomial = BETA) -> AlgebraElement:
    ctx = g[0].ctx
    total = ctx.zero()
    for k in range(max(0, -m), len(g) - m):
        total = total + g[m + k] * (-beta) ** k
    return total


def segre_coeff(E: ChernSeries, F: ChernSeries, m: int, beta: BetaPolynomial = BETA) -> AlgebraElement:
    """Coefficient of u^m in the Segre generating function of E - F."""
    return segre_from_g(segre_g_series(E, F, beta), m, beta)


class SegreProvider:
    """Lookup ``(slot j, m) -> S_m`` for the virtual bundle attached to slot j.

    Slot j corresponds to the variable t_j and the flag member F^{lambda_j}.
    """

    model = "abstract"

    def __init__(self, context: AlgebraContext, beta: BetaPolynomial = BETA, flag_length: int | None = None):
        self.context = context
        self.beta = beta
        self.flag_length = flag_length
        self._cache: dict[tuple[int, int], AlgebraElement] = {}

    @property
    def D(self) -> int:
        return self.context.D

    @property
    def symbolic(self) -> bool:
        return is_symbolic(self.beta)

    def lookup(self, j: int, m: int) -> AlgebraElement:
        if j < 1 or (self.flag_length is not None and j > self.flag_length):
            raise ValueError(f"slot {j} out of range")
        key = (self._slot_key(j), m)
        val = self._cache.get(key)
        if val is None:
            val = self._compute(j, m)
            if self.symbolic:
                val.hdeg = m
            self._cache[key] = val
        return val

    def _slot_key(self, j: int) -> int:
        return j

    def _compute(self, j: int, m: int) -> AlgebraElement:
        raise NotImplementedError


class PointModelProvider(SegreProvider):
    """Segre classes of (U^perp - E/F^l)^dual over a point.

    c(E) and c(F^l) are trivial and U^perp/U has vanishing first Chern class
    once 2 is inverted, so the total Chern class is prod(1 + x_i u) for the
    roots of U^dual and the result does not depend on the slot.
    """

    model = "point"

    def __init__(self, n: int, D: int, beta: BetaPolynomial = BETA):
        if n < 1:
            raise ValueError("n must be >= 1")
        ctx = AlgebraContext([(f"x{i}", 1) for i in range(1, n + 1)], D)
        super().__init__(ctx, beta)
        self.n = n
        roots = [ctx.gen(i) for i in range(n)]
        self.bundle = ChernSeries.from_roots(roots)
        self._g = segre_g_series(self.bundle, ChernSeries.trivial(ctx), beta)

    def _slot_key(self, j: int) -> int:
        return 0

    def _compute(self, j: int, m: int) -> AlgebraElement:
        if m > self.D:
            return self.context.zero()
        return segre_from_g(self._g, m, self.beta)


class FreeModelProvider(SegreProvider):
    """Independent symbols s{j}_{m} (degree m) for the positive Segre classes.

    S_0 = 1 and S_{-k} = (-beta)^k hold for every virtual bundle, so they are
    not given generators of their own.
    """

    model = "free"

    def __init__(self, r: int, D: int, beta: BetaPolynomial = BETA):
        if r < 1:
            raise ValueError("flag length must be >= 1")
        gens = [(f"s{j}_{m}", m) for j in range(1, r + 1) for m in range(1, D + 1)]
        super().__init__(AlgebraContext(gens, D), beta, flag_length=r)

    def _compute(self, j: int, m: int) -> AlgebraElement:
        if m > self.D:
            return self.context.zero()
        if m > 0:
            return self.context.gen(f"s{j}_{m}")
        return self.context.scalar((-self.beta) ** (-m))


@dataclass(frozen=True)
class PointModelConfig:
    n: int
    D: int = 8

    def __post_init__(self):
        if self.n < 1 or self.D < 0:
            raise ValueError("need n >= 1 and D >= 0")


def point_model_provider(config: PointModelConfig, lam=None, beta: BetaPolynomial = BETA) -> PointModelProvider:
    if lam is not None:
        from .loci import StrictPartition
        StrictPartition.coerce(lam, config.n)
    return PointModelProvider(config.n, config.D, beta)


def free_model_provider(r: int, D: int, beta: BetaPolynomial = BETA) -> FreeModelProvider:
    return FreeModelProvider(r, D, beta)


class PClassError(ValueError):
    pass


class PClassTable:
    """P_m^{(l)} = (1/2) sum_{s >= 0} (-beta/2)^s S_{s+m}, per slot.

    Slot 0 is the boundary column of a padded partition, where
    P_m^{(0)} = (-beta)^{-m} for m <= 0 and anything else is an error.
    """

    def __init__(self, provider: SegreProvider):
        self.provider = provider
        self._values: dict[tuple[int, int], AlgebraElement] = {}

    def p(self, j: int, m: int) -> AlgebraElement:
        key = (self.provider._slot_key(j) if j else None, m)
        val = self._values.get(key)
        if val is None:
            val = self._compute(j, m)
            self._values[key] = val
        return val

    __call__ = p

    def _compute(self, j: int, m: int) -> AlgebraElement:
        prov = self.provider
        ctx = prov.context
        beta = prov.beta
        if j == 0:
            if m > 0:
                raise PClassError(f"P_{m}^(0) is undefined for m > 0")
            val = ctx.scalar((-beta) ** (-m))
        else:
            val = ctx.zero()
            step = -beta * Fraction(1, 2)
            for s in range(max(0, prov.D - m + 1)):
                seg = prov.lookup(j, s + m)
                if seg:
                    val = val + seg * step**s
            val = val * Fraction(1, 2)
        if prov.symbolic:
            val.hdeg = m
        return val


def p_class(table: PClassTable, j: int, m: int) -> AlgebraElement:
    return table.p(j, m)


def special_class(k: int, provider: SegreProvider) -> AlgebraElement:
    """P_k^{(k)}, the class of the locus for the one-part partition (k)."""
    n = getattr(provider, "n", provider.D)
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range 1..{n}")
    return PClassTable(provider).p(1, k)


def random_chern_data(rng, D: int, rank_e: int = 3, rank_f: int = 2, terms: int = 3):
    """Random (E, F) over generators e1.., f1.. (degree i for e_i, f_i).

    c_i is a random combination of monomials of generator degree between i
    and D, each with a random power of beta, so the classes need not be
    homogeneous.  Generator degree >= i is what a Chern class of a bundle
    always has (beta only lowers the degree).
    """
    gens = [(f"e{i}", i) for i in range(1, rank_e + 1)] + [(f"f{i}", i) for i in range(1, rank_f + 1)]
    ctx = AlgebraContext(gens, D)
    degs = [g for _, g in gens]

    def monomial(low: int) -> tuple:
        exps = [0] * len(gens)
        deg = 0
        while deg < low:
            k = rng.randrange(len(gens))
            exps[k] += 1
            deg += degs[k]
        return tuple(exps)

    def chern(rank: int) -> ChernSeries:
        coeffs = [ctx.one()]
        for i in range(1, rank + 1):
            c = ctx.zero()
            for _ in range(terms):
                q = Fraction(rng.randint(-5, 5), rng.choice([1, 1, 2, 3]))
                c = c + ctx.from_terms({monomial(i): BetaPolynomial.monomial(rng.randrange(3), q)})
            coeffs.append(c)
        return ChernSeries(tuple(coeffs), rank)

    return chern(rank_e), chern(rank_f)
