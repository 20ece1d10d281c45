"""Label groups (G, E, mu, boundary) and the finite supports below an energy cutoff."""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from sympy import QQ
from sympy.matrices import Matrix

from src.errors import DataError, DivergenceError, NegativeEnergy, NonUnimodular
from src.novikov import format_rational, parse_rational

logger = logging.getLogger(__name__)

LabelClass = tuple[int, ...]


def add_classes(a: LabelClass, b: LabelClass) -> LabelClass:
    return tuple(x + y for x, y in zip(a, b))


def sub_classes(a: LabelClass, b: LabelClass) -> LabelClass:
    return tuple(x - y for x, y in zip(a, b))


def pairing(vector: Sequence, covector: Sequence):
    """<v, w> with exact rational arithmetic."""
    total = QQ.zero
    for x, y in zip(vector, covector):
        total += parse_rational(x) * parse_rational(y)
    return total


def check_unimodular(matrix: Sequence[Sequence[int]]) -> Matrix:
    m = Matrix(matrix)
    if not m.is_square or m.det() not in (1, -1):
        raise NonUnimodular(f"matrix {list(matrix)} is not in GL(n, Z)")
    return m


@dataclass(frozen=True)
class LabelGroup:
    """
    A free abelian label group with its energy, Maslov and boundary maps.

    Attributes:
        energy: E(g_i) for each generator, rationals
        maslov: mu(g_i), even integers
        boundary: the boundary of each generator in Z^n
        support: classes (in generator coordinates) that may carry operators
    """

    energy: tuple
    maslov: tuple
    boundary: tuple
    support: tuple = ()
    gap: object = None

    def __post_init__(self):
        object.__setattr__(self, "energy", tuple(parse_rational(e) for e in self.energy))
        object.__setattr__(self, "maslov", tuple(int(m) for m in self.maslov))
        object.__setattr__(self, "boundary", tuple(tuple(int(x) for x in row) for row in self.boundary))
        object.__setattr__(self, "support", tuple(tuple(int(x) for x in g) for g in self.support))
        if not (len(self.energy) == len(self.maslov) == len(self.boundary)):
            raise DataError("energy, maslov and boundary must list one entry per generator")
        if any(m % 2 for m in self.maslov):
            raise DataError("Maslov indices must be even")
        if len({len(row) for row in self.boundary}) > 1:
            raise DataError("boundary vectors must share one dimension")
        for g in self.support:
            if len(g) != self.rank:
                raise DataError(f"support class {g} does not match rank {self.rank}")
        if self.gap is not None:
            object.__setattr__(self, "gap", parse_rational(self.gap))
            for g in self.nonzero_support():
                if self.classify(g)[0] < self.gap:
                    raise DataError(f"support class {g} lies below the declared gap")

    @property
    def rank(self) -> int:
        return len(self.energy)

    @property
    def dimension(self) -> int:
        """n, the rank of the boundary lattice."""
        if self.boundary:
            return len(self.boundary[0])
        return 0

    def zero(self) -> LabelClass:
        return (0,) * self.rank

    def nonzero_support(self) -> list:
        return [g for g in self.support if any(g)]

    def energy_of(self, beta: LabelClass):
        return sum((c * e for c, e in zip(beta, self.energy)), QQ.zero)

    def maslov_of(self, beta: LabelClass) -> int:
        return sum(c * m for c, m in zip(beta, self.maslov))

    def boundary_of(self, beta: LabelClass) -> tuple:
        n = self.dimension
        return tuple(sum(c * row[j] for c, row in zip(beta, self.boundary)) for j in range(n))

    def classify(self, beta: LabelClass) -> tuple:
        """Returns (energy, maslov, boundary) of a class."""
        return self.energy_of(beta), self.maslov_of(beta), self.boundary_of(beta)

    def cap(self, beta: LabelClass, cohomology_class: Sequence):
        """The cap product of the boundary of beta with a degree-one class."""
        return pairing(self.boundary_of(beta), cohomology_class)

    def min_energy(self):
        """Smallest energy of a nonzero support class (the gap)."""
        energies = [self.energy_of(g) for g in self.nonzero_support()]
        return min(energies) if energies else None

    def enumerate_support(self, energy_cutoff) -> list:
        return list(self.support_set(parse_rational(energy_cutoff)).classes)

    def support_set(self, energy_cutoff) -> "Support":
        return _support(self, parse_rational(energy_cutoff))

    def pushforward(self, f_star: Sequence[Sequence[int]], shift: Sequence) -> "LabelGroup":
        """
        Relabels the group under a Fukaya-trick identification.

        Generators keep their coordinates; boundaries become ``F_* dg`` and
        energies shift by ``<dg, shift>``.
        """
        matrix = check_unimodular(f_star)
        boundary = []
        energy = []
        for e, row in zip(self.energy, self.boundary):
            boundary.append(tuple(int(x) for x in matrix * Matrix(row)))
            energy.append(e + pairing(row, shift))
        group = LabelGroup(tuple(energy), self.maslov, tuple(boundary), self.support)
        for g in group.nonzero_support():
            if group.energy_of(g) <= 0:
                raise NegativeEnergy(f"support class {g} has energy {group.energy_of(g)} after the shift")
        return group

    def to_json(self) -> dict:
        data = {
            "rank": self.rank,
            "energy": [format_rational(e) for e in self.energy],
            "maslov": list(self.maslov),
            "boundary": [list(row) for row in self.boundary],
            "support": [list(g) for g in self.support],
        }
        if self.gap is not None:
            data["gap"] = format_rational(self.gap)
        return data


@dataclass
class Support:
    """All support-monoid classes below a cutoff, in (energy, lex) order."""

    group: LabelGroup
    energy_cutoff: object
    classes: tuple = ()
    members: frozenset = frozenset()
    _splits: dict = field(default_factory=dict)

    def energy(self, beta: LabelClass):
        return self.group.energy_of(beta)

    def splits(self, beta: LabelClass) -> list:
        """Ordered pairs (b1, b2) of support classes with b1 + b2 = beta."""
        if beta not in self._splits:
            pairs = []
            for b1 in self.classes:
                b2 = sub_classes(beta, b1)
                if b2 in self.members:
                    pairs.append((b1, b2))
            self._splits[beta] = pairs
        return self._splits[beta]

    def __contains__(self, beta) -> bool:
        return tuple(beta) in self.members

    def __iter__(self):
        return iter(self.classes)

    def __len__(self):
        return len(self.classes)


@lru_cache(maxsize=256)
def _support(group: LabelGroup, energy_cutoff) -> Support:
    generators = group.nonzero_support()
    for g in generators:
        if group.energy_of(g) <= 0:
            raise DivergenceError(f"support generator {g} has non-positive energy")
    found = {group.zero()}
    frontier = [group.zero()]
    while frontier:
        nxt = []
        for beta in frontier:
            for g in generators:
                candidate = add_classes(beta, g)
                if candidate in found or group.energy_of(candidate) >= energy_cutoff:
                    continue
                found.add(candidate)
                nxt.append(candidate)
        frontier = nxt
    classes = tuple(sorted(found, key=lambda b: (group.energy_of(b), b)))
    if energy_cutoff <= 0:
        classes = ()
    logger.debug(f"support below {energy_cutoff}: {len(classes)} classes")
    return Support(group, energy_cutoff, classes, frozenset(classes))


def classify(group: LabelGroup, beta: LabelClass) -> tuple:
    return group.classify(beta)


def enumerate_support(group: LabelGroup, energy_cutoff) -> list:
    return group.enumerate_support(energy_cutoff)
