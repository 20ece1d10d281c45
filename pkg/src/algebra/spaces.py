"""Graded spaces and the sparse multilinear plumbing shared by all operators."""

import itertools
from dataclasses import dataclass
from typing import Any, Iterable, Optional, Sequence

from sympy import QQ

from src.errors import DataError, SpaceMismatch
from src.novikov import parse_rational

# Multilinear map: input index tuple -> {output index: coefficient}
Entries = dict
# Pulled-back factor: output index -> [(input tuple, coefficient)]
Factor = dict


@dataclass(frozen=True)
class GradedSpace:
    """
    Finite graded basis with an optional unit and declared divisor inputs.

    Attributes:
        names: basis names, unique
        degrees: degree of each basis element
        one: index of the constant-one element, if any
        divisors: (basis index, cohomology class in Q^n) for the closed degree-one
            basis vectors used as divisor inputs
        differential: declared differential as (source, target, coefficient) triples
    """

    names: tuple
    degrees: tuple
    one: Optional[int] = None
    divisors: tuple = ()
    differential: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "degrees", tuple(int(d) for d in self.degrees))
        if len(set(self.names)) != len(self.names):
            raise DataError("basis names must be unique")
        if len(self.names) != len(self.degrees):
            raise DataError("one degree per basis element")
        if self.one is not None and self.degrees[self.one] != 0:
            raise DataError("the unit must have degree 0")
        divisors = tuple((int(i), tuple(parse_rational(x) for x in vec)) for i, vec in self.divisors)
        for i, _ in divisors:
            if self.degrees[i] != 1:
                raise DataError(f"divisor input {self.names[i]} must have degree 1")
        object.__setattr__(self, "divisors", divisors)
        if self.differential is not None:
            object.__setattr__(
                self,
                "differential",
                tuple((int(i), int(j), parse_rational(c)) for i, j, c in self.differential),
            )

    @property
    def dim(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError as e:
            raise DataError(f"unknown basis element {name!r}") from e

    def degree(self, i: int) -> int:
        return self.degrees[i]

    def sharp(self, i: int) -> int:
        """Sign of the twisted identity x -> (-1)^(deg x - 1) x."""
        return -1 if (self.degrees[i] - 1) % 2 else 1

    def degree_zero(self) -> list:
        return [i for i, d in enumerate(self.degrees) if d == 0]

    def divisor_class(self, i: int):
        for j, vec in self.divisors:
            if j == i:
                return vec
        return None

    def same_basis(self, other: "GradedSpace") -> bool:
        return self.names == other.names and self.degrees == other.degrees

    def require_same(self, other: "GradedSpace", what: str = "spaces"):
        if not self.same_basis(other):
            raise SpaceMismatch(f"{what} differ: {self.names} vs {other.names}")

    def declared_differential(self) -> Entries:
        if self.differential is None:
            return {}
        entries: Entries = {}
        for i, j, c in self.differential:
            if c:
                add_term(entries, (i,), j, c)
        return entries

    def with_divisors(self, divisors: Iterable) -> "GradedSpace":
        return GradedSpace(self.names, self.degrees, self.one, tuple(divisors), self.differential)

    def to_json(self) -> dict:
        from src.novikov import format_rational

        data: dict = {"basis": [{"name": n, "degree": d} for n, d in zip(self.names, self.degrees)]}
        if self.one is not None:
            data["one"] = self.names[self.one]
        if self.divisors:
            data["divisors"] = [
                {"basis": self.names[i], "class": [format_rational(x) for x in vec]} for i, vec in self.divisors
            ]
        if self.differential is not None:
            data["differential"] = [
                {"from": self.names[i], "to": self.names[j], "coef": format_rational(c)}
                for i, j, c in self.differential
            ]
        return data


def add_term(entries: Entries, inputs: tuple, output: int, coef: Any):
    """Accumulates ``coef`` at (inputs, output), removing cancelled terms."""
    if not coef:
        return
    row = entries.setdefault(inputs, {})
    value = row.get(output, 0) + coef
    if value:
        row[output] = value
    else:
        del row[output]
        if not row:
            del entries[inputs]


def add_entries(target: Entries, source: Entries, scale: Any = 1):
    for inputs, row in source.items():
        for output, coef in row.items():
            add_term(target, inputs, output, coef * scale)


def scale_entries(entries: Entries, scale: Any) -> Entries:
    result: Entries = {}
    add_entries(result, entries, scale)
    return result


def map_coefficients(entries: Entries, fn) -> Entries:
    result: Entries = {}
    for inputs, row in entries.items():
        for output, coef in row.items():
            add_term(result, inputs, output, fn(coef))
    return result


def entries_equal(a: Entries, b: Entries) -> bool:
    diff: Entries = {}
    add_entries(diff, a)
    add_entries(diff, b, -1)
    return not diff


def first_difference(a: Entries, b: Entries):
    """Returns (inputs, output, a-coefficient, b-coefficient) of the first mismatch."""
    diff: Entries = {}
    add_entries(diff, a)
    add_entries(diff, b, -1)
    if not diff:
        return None
    inputs = min(diff)
    output = min(diff[inputs])
    return inputs, output, a.get(inputs, {}).get(output, 0), b.get(inputs, {}).get(output, 0)


def pull_back(entries: Entries) -> Factor:
    """Indexes a component by output so it can be plugged into an outer slot."""
    factor: Factor = {}
    for inputs, row in entries.items():
        for output, coef in row.items():
            factor.setdefault(output, []).append((inputs, coef))
    return factor


def identity_factor(space: GradedSpace, twisted: bool = False, power: int = 1) -> Factor:
    """The identity, or the p-fold twisted identity when ``twisted``."""
    factor: Factor = {}
    for i in range(space.dim):
        sign = space.sharp(i) ** power if twisted else 1
        factor[i] = [((i,), sign)]
    return factor


def plug(outer: Entries, factors: Sequence[Factor], result: Optional[Entries] = None, scale: Any = 1) -> Entries:
    """
    Accumulates ``outer o (factor_1 x ... x factor_l)`` into ``result``.

    Tensor products act on consecutive input blocks with no extra signs; any
    sign convention is carried by twisted identity factors.
    """
    if result is None:
        result = {}
    for outs, row in outer.items():
        if len(outs) != len(factors):
            raise SpaceMismatch("arity mismatch while plugging operators")
        choices = []
        for slot, o in zip(factors, outs):
            options = slot.get(o)
            if not options:
                break
            choices.append(options)
        else:
            for combo in itertools.product(*choices):
                inputs = tuple(itertools.chain.from_iterable(c[0] for c in combo))
                coef = scale
                for _, c in combo:
                    coef = coef * c
                for output, c_out in row.items():
                    add_term(result, inputs, output, coef * c_out)
    return result


def apply_linear(linear: Entries, entries: Entries) -> Entries:
    """Post-composes a multilinear map with a linear map."""
    return plug(linear, [pull_back(entries)])


def evaluate(entries: Entries, vectors: Sequence[dict], zero: Any = QQ.zero) -> dict:
    """Evaluates a multilinear map on general vectors ``{index: coefficient}``."""
    result: dict = {}
    for inputs, row in entries.items():
        coef = None
        for slot, i in zip(vectors, inputs):
            c = slot.get(i)
            if not c:
                coef = None
                break
            coef = c if coef is None else coef * c
        if coef is None and inputs:
            continue
        for output, c_out in row.items():
            term = c_out if coef is None else coef * c_out
            result[output] = result.get(output, zero) + term
    return {i: c for i, c in result.items() if c}
