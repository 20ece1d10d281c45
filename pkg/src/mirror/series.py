"""
Truncated Laurent series ``sum a T^E Y^nu`` over the Novikov field.

Terms are filtered by the weight ``E + <nu, reference>``: the valuation of
the monomial at the point whose relative coordinates are ``reference``. A
series knows every term of weight below its ``precision``; ``None`` marks an
exact (finite) series. With the default zero reference the weight is the
energy itself.
"""

from typing import Optional, Sequence

from sympy import QQ

from src.errors import DataError, DomainError, ZeroCoordinate
from src.labels import pairing
from src.novikov import NovikovNum, factorial_inverse, format_rational, parse_rational

Term = tuple  # (energy, exponent vector)


def _shifted(precision, amount):
    return None if precision is None else precision + amount


def _lowest(*values):
    finite = [v for v in values if v is not None]
    return min(finite) if finite else None


class LaurentSeries:
    """Immutable truncated Laurent series in n variables."""

    __slots__ = ("dimension", "terms", "precision", "reference")

    def __init__(self, dimension: int, terms=(), precision=None, reference: Optional[Sequence] = None):
        reference = tuple(parse_rational(x) for x in (reference or (0,) * dimension))
        if len(reference) != dimension:
            raise DataError("reference point does not match the number of variables")
        precision = None if precision is None else parse_rational(precision)
        collected: dict = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for (energy, nu), coef in items:
            energy = parse_rational(energy)
            nu = tuple(int(x) for x in nu)
            if len(nu) != dimension:
                raise DataError(f"exponent {nu} does not have {dimension} entries")
            coef = parse_rational(coef)
            if not coef:
                continue
            if precision is not None and energy + pairing(nu, reference) >= precision:
                continue
            key = (energy, nu)
            value = collected.get(key, QQ.zero) + coef
            if value:
                collected[key] = value
            else:
                del collected[key]
        object.__setattr__(self, "dimension", dimension)
        object.__setattr__(self, "terms", collected)
        object.__setattr__(self, "precision", precision)
        object.__setattr__(self, "reference", reference)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentSeries is immutable")

    # Constructors

    @classmethod
    def zero(cls, dimension: int, precision=None, reference=None) -> "LaurentSeries":
        return cls(dimension, (), precision, reference)

    @classmethod
    def monomial(cls, dimension: int, energy=0, nu=None, coef=1, precision=None, reference=None) -> "LaurentSeries":
        nu = tuple(nu) if nu is not None else (0,) * dimension
        return cls(dimension, [((energy, nu), coef)], precision, reference)

    @classmethod
    def one(cls, dimension: int, precision=None, reference=None) -> "LaurentSeries":
        return cls.monomial(dimension, precision=precision, reference=reference)

    def like(self, terms=(), precision="same") -> "LaurentSeries":
        return LaurentSeries(
            self.dimension, terms, self.precision if precision == "same" else precision, self.reference
        )

    # Inspection

    def weight(self, energy, nu) -> object:
        return energy + pairing(nu, self.reference)

    def min_weight(self):
        if not self.terms:
            return None
        return min(self.weight(e, nu) for e, nu in self.terms)

    def floor(self):
        """A lower bound for the weight of every term of the untruncated series."""
        return _lowest(self.min_weight(), self.precision)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, energy, nu):
        return self.terms.get((parse_rational(energy), tuple(nu)), QQ.zero)

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda item: (self.weight(*item[0]), item[0]))

    def determined(self, energy, nu) -> bool:
        return self.precision is None or self.weight(energy, nu) < self.precision

    # Arithmetic

    def _require_compatible(self, other: "LaurentSeries"):
        if other.dimension != self.dimension:
            raise DataError("series in different numbers of variables")
        if other.reference != self.reference:
            raise DataError("series with different reference points")

    def _coerce(self, other) -> "LaurentSeries":
        if isinstance(other, LaurentSeries):
            self._require_compatible(other)
            return other
        return LaurentSeries.monomial(self.dimension, coef=other, reference=self.reference)

    def __add__(self, other) -> "LaurentSeries":
        other = self._coerce(other)
        terms = list(self.terms.items()) + list(other.terms.items())
        return self.like(terms, _lowest(self.precision, other.precision))

    __radd__ = __add__

    def __neg__(self) -> "LaurentSeries":
        return self.like({key: -c for key, c in self.terms.items()})

    def __sub__(self, other) -> "LaurentSeries":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "LaurentSeries":
        return self._coerce(other) - self

    def __mul__(self, other) -> "LaurentSeries":
        if not isinstance(other, LaurentSeries):
            scalar = parse_rational(other)
            return self.like({key: c * scalar for key, c in self.terms.items()})
        self._require_compatible(other)
        mine, theirs = self.floor(), other.floor()
        precision = _lowest(
            None if mine is None else _shifted(other.precision, mine),
            None if theirs is None else _shifted(self.precision, theirs),
        )
        if mine is None and theirs is None:
            precision = _lowest(self.precision, other.precision)
        products = []
        for (e1, n1), c1 in self.terms.items():
            for (e2, n2), c2 in other.terms.items():
                nu = tuple(a + b for a, b in zip(n1, n2))
                products.append(((e1 + e2, nu), c1 * c2))
        return self.like(products, precision)

    __rmul__ = __mul__

    def times_monomial(self, energy, nu, coef=1) -> "LaurentSeries":
        """Multiplies by the exact monomial ``coef T^energy Y^nu``."""
        coef = parse_rational(coef)
        energy = parse_rational(energy)
        shift = self.weight(energy, nu)
        return self.like(
            [((e + energy, tuple(a + b for a, b in zip(n, nu))), c * coef) for (e, n), c in self.terms.items()],
            _shifted(self.precision, shift),
        )

    def with_precision(self, precision) -> "LaurentSeries":
        return self.like(self.terms, _lowest(self.precision, parse_rational(precision)))

    def exp_plus(self, precision=None) -> "LaurentSeries":
        """
        exp of a series whose terms all have positive weight.

        Raises:
            DomainError: if some term has weight <= 0 or no precision is known.
        """
        target = _lowest(self.precision, None if precision is None else parse_rational(precision))
        if target is None:
            raise DomainError("exp of an exact series needs a target precision")
        low = self.min_weight()
        if low is not None and low <= 0:
            raise DomainError(f"exp needs positive weights, found a term of weight {format_rational(low)}")
        base = self.with_precision(target)
        result = LaurentSeries.one(self.dimension, target, self.reference)
        power = LaurentSeries.one(self.dimension, target, self.reference)
        n = 0
        while True:
            n += 1
            power = (power * base).with_precision(target)
            if power.is_zero():
                return result.with_precision(target)
            result = result + power * factorial_inverse(n)

    # Comparison

    def first_difference(self, other: "LaurentSeries"):
        """
        The lowest term determined in both series whose coefficients differ.

        Returns:
            (energy, nu, mine, theirs) or None
        """
        if other.dimension != self.dimension:
            raise DataError("series in different numbers of variables")
        keys = set(self.terms) | set(other.terms)
        ordered = sorted(keys, key=lambda key: (self.weight(*key), key))
        for key in ordered:
            if not (self.determined(*key) and other.determined(*key)):
                continue
            mine = self.terms.get(key, QQ.zero)
            theirs = other.terms.get(key, QQ.zero)
            if mine != theirs:
                return key[0], key[1], mine, theirs
        return None

    def agrees_with(self, other: "LaurentSeries") -> bool:
        return self.first_difference(other) is None

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return self.agrees_with(other)

    __hash__ = None

    # Serialization

    def to_json(self) -> dict:
        data = {
            "terms": [
                {"e": format_rational(e), "nu": list(nu), "c": format_rational(c)} for (e, nu), c in self.sorted_terms()
            ]
        }
        if self.precision is not None:
            data["precision"] = format_rational(self.precision)
        if any(self.reference):
            data["reference"] = [format_rational(x) for x in self.reference]
        return data

    @classmethod
    def from_json(cls, data: dict, dimension: int) -> "LaurentSeries":
        try:
            terms = [((item["e"], item["nu"]), item["c"]) for item in data.get("terms", [])]
        except (KeyError, TypeError) as e:
            raise DataError(f"malformed series: {data!r}") from e
        return cls(dimension, terms, data.get("precision"), data.get("reference"))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (e, nu), c in self.sorted_terms():
            monomial = "*".join(f"Y{i + 1}^{x}" if x != 1 else f"Y{i + 1}" for i, x in enumerate(nu) if x)
            factor = f"T^({format_rational(e)})" if e else ""
            parts.append("*".join(p for p in (format_rational(c), factor, monomial) if p))
        return " + ".join(parts)


VectorSeries = dict  # basis index -> LaurentSeries


def trop(point: Sequence[NovikovNum]) -> tuple:
    """Componentwise valuation; zero coordinates are outside the torus."""
    values = []
    for i, y in enumerate(point):
        if y.is_zero():
            raise ZeroCoordinate(f"coordinate {i + 1} is zero")
        values.append(y.valuation())
    return tuple(values)


def membership(point: Sequence[NovikovNum], polyhedron, basepoint: Optional[Sequence] = None) -> bool:
    """trop(point) + basepoint lies in the polyhedron."""
    position = trop(point)
    if basepoint is not None:
        position = tuple(v + parse_rational(q) for v, q in zip(position, basepoint))
    return polyhedron.contains(position)


def eval_series(series: LaurentSeries, point: Sequence[NovikovNum]) -> NovikovNum:
    """Substitutes Y_i = y_i and multiplies out in the points' truncation context."""
    if len(point) != series.dimension:
        raise DataError("evaluation point has the wrong number of coordinates")
    trop(point)
    context = point[0].context
    total = NovikovNum.zero(context)
    powers: dict = {}
    for (energy, nu), coef in series.sorted_terms():
        value = NovikovNum.monomial(context, energy, coef)
        for i, exponent in enumerate(nu):
            if not exponent:
                continue
            if (i, exponent) not in powers:
                powers[(i, exponent)] = point[i] ** exponent
            value = value * powers[(i, exponent)]
        total = total + value
    return total


def torus_point(context, valuations: Sequence, units: Optional[Sequence] = None) -> tuple:
    """(T^{v_1} u_1, ..., T^{v_n} u_n) with u_i = 1 unless given."""
    point = []
    for i, v in enumerate(valuations):
        base = NovikovNum.monomial(context, parse_rational(v))
        if units is not None:
            base = base * units[i]
        point.append(base)
    return tuple(point)
