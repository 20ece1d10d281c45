"""
Truncated Novikov field arithmetic.

A ``NovikovNum`` is a finite sum ``a_1 T^{l_1} + ... + a_m T^{l_m}`` with exact
rational exponents and coefficients. Every result drops the terms whose
exponent reaches the energy cutoff of the shared ``TruncationContext``, so two
values are equal when all their surviving terms agree.

Scalars are elements of sympy's ``QQ`` domain throughout the package; the
helpers ``parse_rational`` and ``format_rational`` convert them to and from the
``"p/q"`` strings used by every JSON format.
"""

import math
from dataclasses import dataclass
from typing import Any, Iterable, Union

from sympy import QQ, Rational

from src.errors import DataError, DomainError

Scalar = Any
RationalLike = Union[int, str, Scalar]


def parse_rational(value: RationalLike) -> Scalar:
    """Converts ints, ``"p/q"`` strings and QQ elements to a QQ element."""
    if isinstance(value, str):
        try:
            return QQ.from_sympy(Rational(value.strip()))
        except (TypeError, ValueError) as e:
            raise DataError(f"not a rational number: {value!r}") from e
    if isinstance(value, bool):
        raise DataError(f"not a rational number: {value!r}")
    if isinstance(value, int):
        return QQ(value)
    try:
        return QQ(value.numerator, value.denominator)
    except AttributeError as e:
        raise DataError(f"not a rational number: {value!r}") from e


def format_rational(value: Scalar) -> str:
    value = parse_rational(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def factorial_inverse(n: int) -> Scalar:
    return QQ(1, math.factorial(n))


@dataclass(frozen=True)
class TruncationContext:
    """Energy cutoff E_max, length cutoff K_max and field/ring mode."""

    energy_cutoff: Scalar
    length_cutoff: int = 4
    field: bool = True

    def __post_init__(self):
        energy = parse_rational(self.energy_cutoff)
        object.__setattr__(self, "energy_cutoff", energy)
        if energy <= 0:
            raise DataError("energy cutoff must be positive")
        if self.length_cutoff < 1:
            raise DataError("length cutoff must be at least 1")

    def with_cutoffs(self, energy_cutoff=None, length_cutoff=None) -> "TruncationContext":
        return TruncationContext(
            self.energy_cutoff if energy_cutoff is None else energy_cutoff,
            self.length_cutoff if length_cutoff is None else length_cutoff,
            self.field,
        )

    def describe(self) -> dict:
        return {
            "energy_cutoff": format_rational(self.energy_cutoff),
            "length_cutoff": self.length_cutoff,
            "field": self.field,
        }


class NovikovNum:
    """Immutable truncated element of the Novikov field."""

    __slots__ = ("terms", "context")

    def __init__(self, context: TruncationContext, terms: Union[dict, Iterable] = ()):
        collected: dict = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for exponent, coef in items:
            exponent = parse_rational(exponent)
            coef = parse_rational(coef)
            if not coef or exponent >= context.energy_cutoff:
                continue
            collected[exponent] = collected.get(exponent, QQ.zero) + coef
        normalized = tuple(sorted((e, c) for e, c in collected.items() if c))
        if not context.field and normalized and normalized[0][0] < 0:
            raise DomainError("negative exponent in ring mode")
        object.__setattr__(self, "terms", normalized)
        object.__setattr__(self, "context", context)

    def __setattr__(self, name, value):
        raise AttributeError("NovikovNum is immutable")

    # Constructors

    @classmethod
    def zero(cls, context: TruncationContext) -> "NovikovNum":
        return cls(context)

    @classmethod
    def constant(cls, context: TruncationContext, value: RationalLike) -> "NovikovNum":
        return cls(context, [(QQ.zero, value)])

    @classmethod
    def one(cls, context: TruncationContext) -> "NovikovNum":
        return cls.constant(context, 1)

    @classmethod
    def monomial(cls, context: TruncationContext, exponent: RationalLike, coef: RationalLike = 1) -> "NovikovNum":
        """Returns ``coef * T^exponent``."""
        return cls(context, [(exponent, coef)])

    # Inspection

    def is_zero(self) -> bool:
        return not self.terms

    def valuation(self):
        """Smallest exponent of a nonzero term, ``math.inf`` for zero."""
        if not self.terms:
            return math.inf
        return self.terms[0][0]

    def leading_coefficient(self) -> Scalar:
        return self.terms[0][1] if self.terms else QQ.zero

    def coefficient(self, exponent: RationalLike) -> Scalar:
        exponent = parse_rational(exponent)
        for e, c in self.terms:
            if e == exponent:
                return c
        return QQ.zero

    def constant_term(self) -> Scalar:
        return self.coefficient(0)

    def in_ring(self) -> bool:
        """Membership in the valuation ring Λ_0."""
        return self.is_zero() or self.valuation() >= 0

    def in_ideal(self) -> bool:
        """Membership in the maximal ideal Λ_+."""
        return self.is_zero() or self.valuation() > 0

    def is_unit(self) -> bool:
        """Membership in U_Λ, the valuation-zero elements."""
        return not self.is_zero() and self.valuation() == 0

    # Arithmetic

    def _check(self, other: "NovikovNum"):
        if self.context.energy_cutoff != other.context.energy_cutoff:
            raise DomainError("values from different truncation contexts")

    def _coerce(self, other) -> "NovikovNum":
        if isinstance(other, NovikovNum):
            self._check(other)
            return other
        return NovikovNum.constant(self.context, other)

    def __add__(self, other) -> "NovikovNum":
        other = self._coerce(other)
        return NovikovNum(self.context, list(self.terms) + list(other.terms))

    __radd__ = __add__

    def __neg__(self) -> "NovikovNum":
        return NovikovNum(self.context, [(e, -c) for e, c in self.terms])

    def __sub__(self, other) -> "NovikovNum":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "NovikovNum":
        return self._coerce(other) - self

    def __mul__(self, other) -> "NovikovNum":
        if not isinstance(other, NovikovNum):
            scalar = parse_rational(other)
            return NovikovNum(self.context, [(e, c * scalar) for e, c in self.terms])
        self._check(other)
        cutoff = self.context.energy_cutoff
        products = []
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                if e1 + e2 < cutoff:
                    products.append((e1 + e2, c1 * c2))
        return NovikovNum(self.context, products)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "NovikovNum":
        if n < 0:
            return self.invert() ** (-n)
        result = NovikovNum.one(self.context)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, NovikovNum):
            return self.terms == other.terms
        try:
            return self == NovikovNum.constant(self.context, other)
        except DataError:
            return NotImplemented

    def __hash__(self):
        return hash(self.terms)

    def shift(self, exponent: RationalLike) -> "NovikovNum":
        """Multiplies by ``T^exponent``."""
        exponent = parse_rational(exponent)
        return NovikovNum(self.context, [(e + exponent, c) for e, c in self.terms])

    def truncate(self, energy_cutoff: RationalLike) -> "NovikovNum":
        """Re-truncates to a smaller cutoff."""
        energy_cutoff = parse_rational(energy_cutoff)
        if energy_cutoff > self.context.energy_cutoff:
            raise DomainError("cannot raise the energy cutoff of a truncated value")
        return NovikovNum(self.context.with_cutoffs(energy_cutoff=energy_cutoff), self.terms)

    def with_context(self, context: TruncationContext) -> "NovikovNum":
        return NovikovNum(context, self.terms)

    def invert(self) -> "NovikovNum":
        """
        Multiplicative inverse modulo the energy cutoff.

        Writes ``x = a T^v (1 + y)`` with ``val(y) > 0`` and expands the
        geometric series of ``1 + y`` up to exponent ``E_max + v``.

        Raises:
            ZeroDivisionError: for the zero series.
            DomainError: in ring mode when ``val(x) > 0``.
        """
        if self.is_zero():
            raise ZeroDivisionError("inverse of the zero Novikov number")
        v = self.valuation()
        if not self.context.field and v > 0:
            raise DomainError("inverse has negative valuation in ring mode")
        a = self.leading_coefficient()
        cutoff = self.context.energy_cutoff + v
        if cutoff <= 0:
            return NovikovNum.zero(self.context)
        wide = TruncationContext(cutoff, self.context.length_cutoff, True)
        y = NovikovNum(wide, [(e - v, c / a) for e, c in self.terms[1:]])
        series = NovikovNum.one(wide)
        power = NovikovNum.one(wide)
        while True:
            power = -(power * y)
            if power.is_zero():
                break
            series = series + power
        return NovikovNum(self.context, [(e - v, c / a) for e, c in series.terms])

    def __truediv__(self, other) -> "NovikovNum":
        if isinstance(other, NovikovNum):
            return self * other.invert()
        return self * (QQ.one / parse_rational(other))

    def exp_plus(self) -> "NovikovNum":
        """Exponential of an element of Λ_+, truncated; lies in 1 + Λ_+."""
        if not self.in_ideal():
            raise DomainError("exp_plus needs a positive-valuation argument in exact mode")
        result = NovikovNum.one(self.context)
        power = NovikovNum.one(self.context)
        n = 0
        while True:
            n += 1
            power = power * self
            if power.is_zero():
                return result
            result = result + power * factorial_inverse(n)

    def log_one_plus(self) -> "NovikovNum":
        """Logarithm of an element of 1 + Λ_+, truncated; lies in Λ_+."""
        y = self - 1
        if not y.in_ideal():
            raise DomainError("log_one_plus needs an argument in 1 + Λ_+ in exact mode")
        result = NovikovNum.zero(self.context)
        power = NovikovNum.one(self.context)
        n = 0
        while True:
            n += 1
            power = power * y
            if power.is_zero():
                return result
            sign = 1 if n % 2 else -1
            result = result + power * QQ(sign, n)

    # Serialization

    def to_json(self) -> list:
        return [{"e": format_rational(e), "c": format_rational(c)} for e, c in self.terms]

    @classmethod
    def from_json(cls, data: list, context: TruncationContext) -> "NovikovNum":
        try:
            return cls(context, [(item["e"], item["c"]) for item in data])
        except (KeyError, TypeError) as e:
            raise DataError(f"malformed Novikov number: {data!r}") from e

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            if e == 0:
                parts.append(format_rational(c))
            else:
                parts.append(f"{format_rational(c)}*T^({format_rational(e)})")
        return " + ".join(parts)


def valuation(x: NovikovNum):
    return x.valuation()


def exp_plus(x: NovikovNum) -> NovikovNum:
    return x.exp_plus()


def log_one_plus(y: NovikovNum) -> NovikovNum:
    return y.log_one_plus()


def invert(x: NovikovNum) -> NovikovNum:
    return x.invert()
