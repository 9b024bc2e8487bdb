"""Exact arithmetic over Q[beta] and truncated graded commutative algebras.

``beta`` has degree -1.  An :class:`AlgebraElement` lives in an
:class:`AlgebraContext` with named generators of positive degree; monomials
whose total generator degree exceeds the context's truncation bound ``D`` are
dropped.  Truncation is an ideal quotient, so every product is exact on the
retained monomials.

Internally a term of an algebra element is keyed by a single packed integer
holding the generator exponents (base ``D + 1`` digits) and the beta exponent
(the most significant digit).  Multiplying monomials is then integer
addition.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

Q = Fraction
Scalar = Union[int, Fraction, "BetaPolynomial"]


class NotInvertibleError(ArithmeticError):
    pass


class ContextMismatchError(ValueError):
    pass


def is_power_of_two(d: int) -> bool:
    return d > 0 and d & (d - 1) == 0


class BetaPolynomial:
    """A polynomial in beta with rational coefficients.

    Stored as ``{beta exponent: coefficient}`` with no zero entries, so two
    polynomials are equal iff their dictionaries are.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping[int, object] | None = None):
        c = {}
        if coeffs:
            for k, v in coeffs.items():
                if k < 0:
                    raise ValueError(f"negative beta exponent {k}")
                v = Q(v)
                if v:
                    c[int(k)] = v
        self._c = c

    @classmethod
    def _raw(cls, c: dict) -> "BetaPolynomial":
        obj = cls.__new__(cls)
        obj._c = c
        return obj

    @classmethod
    def const(cls, q) -> "BetaPolynomial":
        q = Q(q)
        return cls._raw({0: q} if q else {})

    @classmethod
    def monomial(cls, k: int, q=1) -> "BetaPolynomial":
        return cls({k: q})

    @property
    def coeffs(self) -> dict[int, Fraction]:
        return dict(self._c)

    def __getitem__(self, k: int) -> Fraction:
        return self._c.get(k, Q(0))

    def items(self):
        return sorted(self._c.items())

    def is_constant(self) -> bool:
        return all(k == 0 for k in self._c)

    def constant_term(self) -> Fraction:
        return self._c.get(0, Q(0))

    def max_exponent(self) -> int:
        return max(self._c, default=-1)

    def min_exponent(self) -> int:
        return min(self._c, default=-1)

    def is_homogeneous(self, degree: int) -> bool:
        """True if every term q*beta^k has degree -k == ``degree``."""
        return all(-k == degree for k in self._c)

    def has_integer_coefficients(self) -> bool:
        return all(v.denominator == 1 for v in self._c.values())

    def has_dyadic_coefficients(self) -> bool:
        return all(is_power_of_two(v.denominator) for v in self._c.values())

    def evaluate(self, value) -> Fraction:
        value = Q(value)
        return sum((v * value**k for k, v in self._c.items()), Q(0))

    def specialize(self, value) -> "BetaPolynomial":
        return BetaPolynomial.const(self.evaluate(value))

    def truncate(self, max_exp: int) -> "BetaPolynomial":
        return BetaPolynomial._raw({k: v for k, v in self._c.items() if k <= max_exp})

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        c = dict(self._c)
        for k, v in other._c.items():
            s = c.get(k, 0) + v
            if s:
                c[k] = s
            else:
                c.pop(k, None)
        return BetaPolynomial._raw(c)

    __radd__ = __add__

    def __neg__(self):
        return BetaPolynomial._raw({k: -v for k, v in self._c.items()})

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._c, other._c
        if not a or not b:
            return BetaPolynomial._raw({})
        if len(b) == 1:
            (kb, vb), = b.items()
            return BetaPolynomial._raw({k + kb: v * vb for k, v in a.items()})
        if len(a) == 1:
            (ka, va), = a.items()
            return BetaPolynomial._raw({k + ka: v * va for k, v in b.items()})
        c: dict[int, Fraction] = {}
        for ka, va in a.items():
            for kb, vb in b.items():
                k = ka + kb
                c[k] = c.get(k, 0) + va * vb
        return BetaPolynomial._raw({k: v for k, v in c.items() if v})

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        out = ONE_BETA
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __truediv__(self, q):
        q = Q(q)
        return BetaPolynomial._raw({k: v / q for k, v in self._c.items()})

    def __bool__(self):
        return bool(self._c)

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __repr__(self):
        if not self._c:
            return "0"
        parts = []
        for k, v in sorted(self._c.items()):
            mono = "" if k == 0 else ("β" if k == 1 else f"β^{k}")
            if not mono:
                parts.append(str(v))
            elif v == 1:
                parts.append(mono)
            elif v == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{v}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def _coerce(x) -> BetaPolynomial:
    if isinstance(x, BetaPolynomial):
        return x
    if isinstance(x, (int, Fraction)):
        return BetaPolynomial.const(x)
    return NotImplemented


ONE_BETA = BetaPolynomial._raw({0: Q(1)})
BETA = BetaPolynomial._raw({1: Q(1)})

BETA_MODES = {"symbolic": None, "zero": 0, "minus-one": -1}


def beta_scalar(value=None) -> BetaPolynomial:
    """The value substituted for beta throughout a computation.

    ``None`` keeps beta symbolic.  Building every formula from this scalar
    is the same as applying the substitution homomorphism to the inputs.
    """
    if value is None:
        return BETA
    return BetaPolynomial.const(value)


def is_symbolic(beta: BetaPolynomial) -> bool:
    return beta == BETA


@dataclass(frozen=True)
class GeneratorSpec:
    name: str
    degree: int

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError(f"generator {self.name!r} must have degree >= 1")


class AlgebraContext:
    """Generators with degrees plus a truncation bound on generator degree."""

    def __init__(self, generators: Iterable[GeneratorSpec | tuple[str, int]], truncation: int):
        gens = tuple(g if isinstance(g, GeneratorSpec) else GeneratorSpec(*g) for g in generators)
        names = [g.name for g in gens]
        if len(set(names)) != len(names):
            raise ValueError("generator names must be unique")
        if truncation < 0:
            raise ValueError("truncation degree must be >= 0")
        self.generators = gens
        self.D = truncation
        self._index = {g.name: i for i, g in enumerate(gens)}
        self._base = truncation + 1
        self._beta_unit = self._base ** len(gens)
        self._deg_cache: dict[int, int] = {}

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(g.name for g in self.generators)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(g.degree for g in self.generators)

    def __eq__(self, other):
        if not isinstance(other, AlgebraContext):
            return NotImplemented
        return self.generators == other.generators and self.D == other.D

    def __hash__(self):
        return hash((self.generators, self.D))

    def __repr__(self):
        gens = ", ".join(f"{g.name}:{g.degree}" for g in self.generators)
        return f"AlgebraContext([{gens}], D={self.D})"

    # packed keys --------------------------------------------------------
    def encode(self, exps: Sequence[int], k: int = 0) -> int:
        if len(exps) != len(self.generators):
            raise ValueError("exponent vector has wrong length")
        code = 0
        for e in reversed(exps):
            if not 0 <= e < self._base:
                raise ValueError(f"exponent {e} out of range for truncation {self.D}")
            code = code * self._base + e
        return code + k * self._beta_unit

    def decode(self, key: int) -> tuple[tuple[int, ...], int]:
        k, code = divmod(key, self._beta_unit)
        exps = []
        for _ in self.generators:
            code, e = divmod(code, self._base)
            exps.append(e)
        return tuple(exps), k

    def gdeg(self, key: int) -> int:
        code = key % self._beta_unit
        d = self._deg_cache.get(code)
        if d is None:
            exps, _ = self.decode(code)
            d = sum(e * g for e, g in zip(exps, self.degrees))
            self._deg_cache[code] = d
        return d

    # constructors -------------------------------------------------------
    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, {}, None)

    def one(self) -> "AlgebraElement":
        return AlgebraElement(self, {0: Q(1)}, 0)

    def scalar(self, c: Scalar) -> "AlgebraElement":
        c = _coerce(c)
        terms = {k * self._beta_unit: v for k, v in c._c.items()}
        hdeg = -c.max_exponent() if len(c._c) == 1 else None
        return AlgebraElement(self, terms, hdeg)

    def gen(self, name: str | int) -> "AlgebraElement":
        i = self._index[name] if isinstance(name, str) else name
        exps = [0] * len(self.generators)
        exps[i] = 1
        if self.generators[i].degree > self.D:
            return self.zero()
        return AlgebraElement(self, {self.encode(exps): Q(1)}, self.generators[i].degree)

    def from_terms(self, terms: Mapping[tuple[int, ...], Scalar]) -> "AlgebraElement":
        """Build from ``{exponent vector: coefficient}``; over-degree terms are dropped."""
        out: dict[int, Fraction] = {}
        for exps, c in terms.items():
            c = _coerce(c)
            deg = sum(e * g for e, g in zip(exps, self.degrees))
            if deg > self.D:
                continue
            base = self.encode(exps)
            for k, v in c._c.items():
                key = base + k * self._beta_unit
                out[key] = out.get(key, 0) + v
        return AlgebraElement(self, {k: v for k, v in out.items() if v}, None)


class AlgebraElement:
    """Element of a truncated graded algebra over Q[beta].

    ``hdeg`` is an optional homogeneity flag: when set, every term
    ``q * beta^k * x^e`` satisfies ``gdeg(e) - k == hdeg``.
    """

    __slots__ = ("ctx", "_t", "hdeg")

    def __init__(self, ctx: AlgebraContext, terms: dict[int, Fraction], hdeg: int | None = None):
        self.ctx = ctx
        self._t = terms
        self.hdeg = hdeg

    # views ------------------------------------------------------------------
    @property
    def terms(self) -> dict[tuple[int, ...], BetaPolynomial]:
        grouped: dict[tuple[int, ...], dict[int, Fraction]] = {}
        for key, v in self._t.items():
            exps, k = self.ctx.decode(key)
            grouped.setdefault(exps, {})[k] = v
        return {e: BetaPolynomial._raw(c) for e, c in grouped.items()}

    def iter_terms(self) -> Iterator[tuple[tuple[int, ...], int, Fraction]]:
        """Yield ``(exponents, beta exponent, coefficient)``."""
        for key, v in self._t.items():
            exps, k = self.ctx.decode(key)
            yield exps, k, v

    def sorted_terms(self) -> list[tuple[tuple[int, ...], int, Fraction]]:
        """Terms ordered by (generator degree, exponents, beta exponent)."""
        degs = self.ctx.degrees
        return sorted(self.iter_terms(),
                      key=lambda t: (sum(e * g for e, g in zip(t[0], degs)), t[0], t[1]))

    def __len__(self):
        return len(self._t)

    def constant_part(self) -> BetaPolynomial:
        """Generator-degree-0 part, as a polynomial in beta."""
        unit = self.ctx._beta_unit
        return BetaPolynomial._raw({key // unit: v for key, v in self._t.items()
                                    if key % unit == 0})

    def has_zero_constant_term(self) -> bool:
        return not self.constant_part()

    def min_gdeg(self) -> int:
        return min((self.ctx.gdeg(k) for k in self._t), default=self.ctx.D + 1)

    def is_homogeneous(self, d: int) -> bool:
        unit = self.ctx._beta_unit
        return all(self.ctx.gdeg(key) - key // unit == d for key in self._t)

    def homogeneous_degree(self) -> int | None:
        unit = self.ctx._beta_unit
        degs = {self.ctx.gdeg(key) - key // unit for key in self._t}
        return degs.pop() if len(degs) == 1 else None

    def check_homogeneous(self) -> bool:
        """Flag soundness: True unless flagged and some term violates the flag."""
        return self.hdeg is None or self.is_homogeneous(self.hdeg)

    def has_dyadic_coefficients(self) -> bool:
        return all(is_power_of_two(v.denominator) for v in self._t.values())

    # arithmetic -------------------------------------------------------------
    def _same(self, other: "AlgebraElement"):
        if other.ctx is not self.ctx and other.ctx != self.ctx:
            raise ContextMismatchError(f"{self.ctx!r} vs {other.ctx!r}")

    def _lift(self, other) -> "AlgebraElement":
        if isinstance(other, AlgebraElement):
            self._same(other)
            return other
        c = _coerce(other)
        if c is NotImplemented:
            return NotImplemented
        return self.ctx.scalar(c)

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        t = dict(self._t)
        for k, v in other._t.items():
            s = t.get(k, 0) + v
            if s:
                t[k] = s
            else:
                t.pop(k, None)
        if not other._t:
            hdeg = self.hdeg
        elif not self._t:
            hdeg = other.hdeg
        else:
            hdeg = self.hdeg if self.hdeg == other.hdeg else None
        return AlgebraElement(self.ctx, t, hdeg)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.ctx, {k: -v for k, v in self._t.items()}, self.hdeg)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, AlgebraElement):
            c = _coerce(other)
            if c is NotImplemented:
                return NotImplemented
            return self._scale(c)
        self._same(other)
        ctx = self.ctx
        D = ctx.D
        gdeg = ctx.gdeg
        a, b = self._t, other._t
        if len(a) < len(b):
            a, b = b, a
        bs = sorted(((gdeg(k), k, v) for k, v in b.items()), key=lambda x: x[0])
        out: dict[int, Fraction] = {}
        get = out.get
        for ka, va in a.items():
            room = D - gdeg(ka)
            for db, kb, vb in bs:
                if db > room:
                    break
                key = ka + kb
                out[key] = get(key, 0) + va * vb
        hdeg = None
        if self.hdeg is not None and other.hdeg is not None:
            hdeg = self.hdeg + other.hdeg
        return AlgebraElement(ctx, {k: v for k, v in out.items() if v}, hdeg)

    __rmul__ = __mul__

    def _scale(self, c: BetaPolynomial) -> "AlgebraElement":
        unit = self.ctx._beta_unit
        out: dict[int, Fraction] = {}
        for kc, vc in c._c.items():
            shift = kc * unit
            for k, v in self._t.items():
                key = k + shift
                out[key] = out.get(key, 0) + v * vc
        hdeg = None
        if self.hdeg is not None and len(c._c) == 1:
            hdeg = self.hdeg - c.max_exponent()
        return AlgebraElement(self.ctx, {k: v for k, v in out.items() if v}, hdeg)

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power; use invert_unit")
        out = self.ctx.one()
        for _ in range(e):
            out = out * self
        return out

    def __bool__(self):
        return bool(self._t)

    def __eq__(self, other):
        if isinstance(other, AlgebraElement):
            return self.ctx == other.ctx and self._t == other._t
        c = _coerce(other)
        if c is NotImplemented:
            return NotImplemented
        return self._t == self.ctx.scalar(c)._t

    __hash__ = None

    def __repr__(self):
        if not self._t:
            return "0"
        names = self.ctx.names
        parts = []
        for exps, k, v in self.sorted_terms():
            mono = "*".join((n if e == 1 else f"{n}^{e}") for n, e in zip(names, exps) if e)
            if k:
                mono = ("β" if k == 1 else f"β^{k}") + ("*" + mono if mono else "")
            if not mono:
                parts.append(str(v))
            elif v == 1:
                parts.append(mono)
            elif v == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{v}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def specialize_beta(self, value) -> "AlgebraElement":
        return specialize_beta(self, value)

    def inverse(self) -> "AlgebraElement":
        return invert_unit(self)


def invert_unit(a: AlgebraElement) -> AlgebraElement:
    """Inverse of ``a`` modulo the truncation ideal.

    The generator-degree-0 part of ``a`` must be a nonzero rational; the rest
    is nilpotent, so the geometric series terminates after ``D`` steps.
    """
    c0 = a.constant_part()
    if not c0 or not c0.is_constant():
        raise NotInvertibleError(f"constant term {c0!r} is not a nonzero rational")
    q0 = c0.constant_term()
    ctx = a.ctx
    x = a._scale(BetaPolynomial.const(1 / q0)) - ctx.one()
    # 1/(1+x) = 1 - x + x^2 - ...; x has generator degree >= 1
    inv = ctx.one()
    for _ in range(ctx.D):
        inv = ctx.one() - x * inv
    out = inv._scale(BetaPolynomial.const(1 / q0))
    out.hdeg = None if a.hdeg is None else -a.hdeg
    return out


def specialize_beta(a: AlgebraElement, value) -> AlgebraElement:
    """Substitute a rational number for beta."""
    value = Q(value)
    ctx = a.ctx
    unit = ctx._beta_unit
    out: dict[int, Fraction] = {}
    for key, v in a._t.items():
        k, code = divmod(key, unit)
        out[code] = out.get(code, 0) + v * value**k
    return AlgebraElement(ctx, {k: v for k, v in out.items() if v}, None)
