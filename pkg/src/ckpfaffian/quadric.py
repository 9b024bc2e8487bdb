"""The connective K-theory ring of an odd quadric over a point.

E has rank 2n+1, h = c_1(S^dual) and f is the class of a maximal isotropic
projective subspace.  As a Q[beta]-module the ring is free on

    1, h, ..., h^{n-1}, f, hf, ..., h^{n-1} f,

and the products are determined by

    (2 + beta h) f = h^n            (rel1)
    f^2 = c_n f                     (rel2)

with c_n the coefficient of u^n in (1 + hu)^{n+1} / (1 + (h (+) h) u).

Normal form: h^a with a >= n is rewritten through rel1, f^b with b >= 2
through rel2.  Feeding rel2 back into rel1 gives h^n f = rho(h) h^n f with
rho = (2 + beta h) c_n / h^n.  Its constant term rho_0 is 0 or 2, so
h^a f (a >= n) can be traded for sum_{l>=1} rho_l/(1 - rho_0) h^{a+l} f.
Each rho_l is divisible by beta^l, so the rewriting stops once everything
falls below beta^{B+1}.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .formal_group import fgl_add
from .graded_core import BETA, AlgebraContext, BetaPolynomial

_ZERO = BetaPolynomial()


class QuadricError(ValueError):
    pass


def _hpoly(element) -> dict[int, BetaPolynomial]:
    """An element of Q[beta][h] as ``{h exponent: coefficient}``."""
    return {exps[0]: c for exps, c in element.terms.items()}


def quadric_chern_top(n: int, beta: BetaPolynomial = BETA) -> dict[int, BetaPolynomial]:
    """c_n of S^dual(x)E/U - S^dual(x)S^dual, as a polynomial in h."""
    ctx = AlgebraContext([("h", 1)], 2 * n)
    h = ctx.gen("h")
    w = fgl_add(h, h, beta)
    total = ctx.zero()
    for k in range(n + 1):
        binom = Fraction(_binom(n + 1, n - k))
        total = total + h ** (n - k) * (-w) ** k * binom
    return _hpoly(total)


def _binom(a: int, b: int) -> int:
    from math import comb
    return comb(a, b) if 0 <= b <= a else 0


@dataclass
class QuadricRing:
    """Structure constants on the basis h^0..h^{n-1}, f, ..., h^{n-1} f."""

    n: int
    beta_bound: int
    beta: BetaPolynomial = BETA
    table: dict = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise QuadricError("n must be >= 1")
        if self.beta_bound < 0:
            raise QuadricError("beta bound must be >= 0")
        n = self.n
        self.cn = quadric_chern_top(n, self.beta)
        if any(e < n for e in self.cn):
            raise QuadricError("c_n is not divisible by h^n")
        # rho(h) = (2 + beta h) c_n / h^n
        rho: dict[int, BetaPolynomial] = {}
        for e, c in self.cn.items():
            for de, f in ((0, BetaPolynomial.const(2)), (1, self.beta)):
                rho[e - n + de] = rho.get(e - n + de, _ZERO) + c * f
        rho0 = rho.pop(0, _ZERO)
        if not rho0.is_constant() or rho0.constant_term() == 1:
            raise QuadricError(f"fixed point is degenerate: rho_0 = {rho0!r}")
        self.rho0 = rho0.constant_term()
        self.rho_tail = {l: c / (1 - self.rho0) for l, c in rho.items() if c}
        if any(c.min_exponent() < l for l, c in self.rho_tail.items()):
            raise QuadricError("higher terms of rho must carry beta^l")
        self.specialized_to = None
        self.table = {(i, j): self._reduce(self._basis_monomial(i, j))
                      for i in range(self.rank) for j in range(self.rank)}
        self.h_coords = self._reduce({(1, 0): BetaPolynomial.const(1)})

    @property
    def rank(self) -> int:
        return 2 * self.n

    def labels(self) -> list[str]:
        hs = ["1", "h"] + [f"h^{a}" for a in range(2, self.n)]
        hs = hs[:self.n]
        fs = ["f"] + [f"{p}*f" for p in hs[1:]]
        return hs + fs

    def _split(self, i: int) -> tuple[int, int]:
        return (i, 0) if i < self.n else (i - self.n, 1)

    def _basis_monomial(self, i: int, j: int) -> dict:
        (a1, b1), (a2, b2) = self._split(i), self._split(j)
        return {(a1 + a2, b1 + b2): BetaPolynomial.const(1)}

    def _reduce(self, poly: dict) -> tuple:
        """Normal form of sum c * h^a f^b, truncated above beta^B."""
        if self.specialized_to is not None:
            raise QuadricError("a specialized ring only multiplies through its table")
        n, B = self.n, self.beta_bound
        out = [_ZERO] * self.rank
        work = dict(poly)

        def push(key, c):
            c = c.truncate(B)
            if c:
                v = work.get(key, _ZERO) + c
                if v:
                    work[key] = v
                else:
                    work.pop(key, None)

        # every rewrite lands on some h^a f with a larger a, so taking keys in
        # this order merges all contributions to a key before expanding it
        while work:
            key = min(work, key=lambda k: (k[1] == 1, k[0]))
            (a, b), c = key, work.pop(key)
            if not c:
                continue
            if b >= 2:
                for e, ce in self._cn_power(b - 1).items():
                    push((a + e, 1), c * ce)
            elif b == 0 and a < n:
                out[a] = out[a] + c
            elif b == 0:
                push((a - n, 1), c * 2)
                push((a - n + 1, 1), c * self.beta)
            elif a < n:
                out[n + a] = out[n + a] + c
            else:
                for l, rl in self.rho_tail.items():
                    push((a + l, 1), c * rl)
        return tuple(out)

    def _cn_power(self, k: int) -> dict:
        cache = self.__dict__.setdefault("_cn_powers", {1: self.cn})
        if k not in cache:
            prev = self._cn_power(k - 1)
            acc: dict[int, BetaPolynomial] = {}
            for e1, c1 in prev.items():
                for e2, c2 in self.cn.items():
                    acc[e1 + e2] = acc.get(e1 + e2, _ZERO) + c1 * c2
            cache[k] = {e: c for e, c in acc.items() if c}
        return cache[k]

    # elements ---------------------------------------------------------------
    def element(self, coords) -> "QuadricElement":
        coords = tuple(c if isinstance(c, BetaPolynomial) else BetaPolynomial.const(c) for c in coords)
        if len(coords) != self.rank:
            raise QuadricError(f"need {self.rank} coordinates")
        return QuadricElement(self, coords)

    def basis(self, i: int) -> "QuadricElement":
        coords = [_ZERO] * self.rank
        coords[i] = BetaPolynomial.const(1)
        return QuadricElement(self, tuple(coords))

    def from_monomials(self, poly: dict) -> "QuadricElement":
        """Reduce ``{(a, b): coefficient}`` meaning sum coefficient * h^a f^b."""
        poly = {k: (v if isinstance(v, BetaPolynomial) else BetaPolynomial.const(v)) for k, v in poly.items()}
        return QuadricElement(self, self._reduce(poly))

    def one(self) -> "QuadricElement":
        return self.basis(0)

    def h(self) -> "QuadricElement":
        return QuadricElement(self, self.h_coords)

    def f(self) -> "QuadricElement":
        return self.basis(self.n)

    def perturbed(self, i: int, j: int) -> "QuadricRing":
        """Copy with the products e_i e_j and e_j e_i negated."""
        other = QuadricRing.__new__(QuadricRing)
        other.__dict__.update(self.__dict__)
        other.table = dict(self.table)
        for key in {(i, j), (j, i)}:
            other.table[key] = tuple(-c for c in other.table[key])
        return other

    def specialize(self, value) -> "QuadricRing":
        """The table with beta replaced by a number."""
        other = QuadricRing.__new__(QuadricRing)
        other.__dict__.update(self.__dict__)
        other.specialized_to = value
        other.beta = BetaPolynomial.const(value)
        other.table = {k: tuple(c.specialize(value) for c in v) for k, v in self.table.items()}
        other.h_coords = tuple(c.specialize(value) for c in self.h_coords)
        other.cn = {e: c.specialize(value) for e, c in self.cn.items()}
        other.__dict__.pop("_cn_powers", None)
        return other

    def max_beta_exponent(self) -> int:
        return max((c.max_exponent() for v in self.table.values() for c in v), default=-1)


@dataclass(frozen=True)
class QuadricElement:
    ring: QuadricRing
    coords: tuple

    def _check(self, other: "QuadricElement"):
        if other.ring is not self.ring:
            raise QuadricError("elements of different rings")

    def __add__(self, other):
        if not isinstance(other, QuadricElement):
            other = self.ring.one() * other
        self._check(other)
        return QuadricElement(self.ring, tuple(a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        return QuadricElement(self.ring, tuple(-c for c in self.coords))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, QuadricElement):
            c = other if isinstance(other, BetaPolynomial) else BetaPolynomial.const(other)
            return QuadricElement(self.ring, tuple((x * c).truncate(self.ring.beta_bound) for x in self.coords))
        return quadric_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = self.ring.one()
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, QuadricElement):
            return self.ring is other.ring and self.coords == other.coords
        if isinstance(other, int) and other == 0:
            return not any(self.coords)
        return NotImplemented

    __hash__ = None

    def __bool__(self):
        return any(self.coords)

    def __repr__(self):
        parts = [f"({c!r})*{name}" for c, name in zip(self.coords, self.ring.labels()) if c]
        return " + ".join(parts) or "0"


def quadric_mul(a: QuadricElement, b: QuadricElement) -> QuadricElement:
    a._check(b)
    ring = a.ring
    out = [_ZERO] * ring.rank
    for i, x in enumerate(a.coords):
        if not x:
            continue
        for j, y in enumerate(b.coords):
            if not y:
                continue
            xy = x * y
            for k, c in enumerate(ring.table[(i, j)]):
                if c:
                    out[k] = out[k] + (xy * c).truncate(ring.beta_bound)
    return QuadricElement(ring, tuple(out))


def build_quadric_ring(n: int, beta_bound: int, beta: BetaPolynomial = BETA) -> QuadricRing:
    if beta_bound < 2 * n:
        raise QuadricError(f"beta bound {beta_bound} is below 2n = {2 * n}")
    return QuadricRing(n, beta_bound, beta)


@dataclass
class QuadricReport:
    n: int
    beta_bound: int
    rel1: bool
    rel2: bool
    associative: bool
    commutative: bool
    stable: bool | None
    dyadic: bool
    failures: list

    @property
    def ok(self) -> bool:
        return (self.rel1 and self.rel2 and self.associative and self.commutative
                and self.stable is not False and self.dyadic)


def _hpoly_value(ring: QuadricRing, poly: dict) -> QuadricElement:
    h = ring.h()
    total = ring.one() * 0
    for e, c in poly.items():
        total = total + (h ** e) * c
    return total


def verify_relations(ring: QuadricRing, check_stability: bool = True) -> QuadricReport:
    failures = []
    h, f = ring.h(), ring.f()
    two_plus_beta_h = ring.one() * 2 + h * ring.beta
    rel1 = h ** ring.n == two_plus_beta_h * f
    if not rel1:
        failures.append("rel1: h^n != (2 + beta h) f")
    rel2 = f * f == _hpoly_value(ring, ring.cn) * f
    if not rel2:
        failures.append("rel2: f^2 != c_n f")

    rank = range(ring.rank)
    commutative = True
    for i, j in product(rank, rank):
        if i < j and ring.table[(i, j)] != ring.table[(j, i)]:
            commutative = False
            failures.append(f"commutativity: e{i} e{j}")
    associative = True
    basis = [ring.basis(i) for i in rank]
    for i, j, k in product(rank, rank, rank):
        if (basis[i] * basis[j]) * basis[k] != basis[i] * (basis[j] * basis[k]):
            associative = False
            failures.append(f"associativity: (e{i} e{j}) e{k}")

    stable = None
    if check_stability and ring.specialized_to is None:
        stable = structure_constants_stable(ring)
        if not stable:
            failures.append("structure constants change when the beta bound doubles")
    dyadic = all(c.has_dyadic_coefficients() for v in ring.table.values() for c in v)
    if not dyadic:
        failures.append("non-dyadic structure constant")
    return QuadricReport(ring.n, ring.beta_bound, rel1, rel2, associative, commutative,
                         stable, dyadic, failures)


def structure_constants_stable(ring: QuadricRing) -> bool:
    """Rebuild with twice the beta bound; the table must not change."""
    bigger = QuadricRing(ring.n, 2 * ring.beta_bound, ring.beta)
    return bigger.table == ring.table and bigger.max_beta_exponent() < ring.beta_bound
