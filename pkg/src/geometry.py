"""
Rational polyhedra in small dimension and rational polyhedral complexes.

A polyhedron is ``{x : b_i . x >= c_i}`` with integral normals ``b_i`` and
rational bounds ``c_i``. Everything is exact over QQ; vertices come from
intersecting hyperplanes, which is only practical for n <= 4.
"""

import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from sympy import QQ, Matrix

from src.algebra import linalg
from src.algebra.reports import VerificationReport
from src.errors import DataError, EmptyPolyhedron, Unbounded
from src.labels import check_unimodular
from src.novikov import format_rational, parse_rational

logger = logging.getLogger(__name__)

MAX_DIMENSION = 4

Point = tuple


def _fourier_motzkin_feasible(rows: list, n: int) -> bool:
    """Decides whether ``a . x >= c`` has a rational solution by eliminating variables."""
    current = [(tuple(a), c) for a, c in rows]
    for j in range(n):
        upper, lower, kept = [], [], []
        for a, c in current:
            if a[j] > 0:
                lower.append((a, c))
            elif a[j] < 0:
                upper.append((a, c))
            else:
                kept.append((a, c))
        combined = set(kept)
        for (ap, cp), (an, cn) in itertools.product(lower, upper):
            wp, wn = -an[j], ap[j]
            a = tuple(wp * x + wn * y for x, y in zip(ap, an))
            combined.add((_normalized(a), _scaled_bound(a, wp * cp + wn * cn)))
        current = list(combined)
    return all(c <= 0 for _, c in current)


def _normalized(a: tuple) -> tuple:
    scale = max((abs(x) for x in a), default=QQ.zero)
    if not scale:
        return a
    return tuple(x / scale for x in a)


def _scaled_bound(a: tuple, c):
    scale = max((abs(x) for x in a), default=QQ.zero)
    return c / scale if scale else c


@dataclass(frozen=True)
class RationalPolyhedron:
    """
    Bounded nonempty polyhedron given by integral inequalities.

    Args:
        dimension: ambient dimension n
        inequalities: pairs (b, c) meaning sum_j b_j x_j >= c
    """

    dimension: int
    inequalities: tuple = field(default=())

    def __post_init__(self):
        cleaned = []
        for normal, bound in self.inequalities:
            normal = tuple(int(b) for b in normal)
            if len(normal) != self.dimension:
                raise DataError(f"inequality {normal} does not live in dimension {self.dimension}")
            cleaned.append((normal, parse_rational(bound)))
        object.__setattr__(self, "inequalities", tuple(cleaned))

    @classmethod
    def box(cls, lower: Sequence, upper: Sequence) -> "RationalPolyhedron":
        n = len(lower)
        rows = []
        for j in range(n):
            e = [0] * n
            e[j] = 1
            rows.append((tuple(e), lower[j]))
            rows.append((tuple(-x for x in e), -parse_rational(upper[j])))
        return cls(n, tuple(rows))

    @classmethod
    def from_json(cls, data: dict) -> "RationalPolyhedron":
        ineqs = data.get("ineqs", [])
        if not ineqs:
            raise DataError("a polyhedron needs at least one inequality")
        dimension = len(ineqs[0]["b"])
        return cls(dimension, tuple((row["b"], row["c"]) for row in ineqs))

    def to_json(self) -> dict:
        return {"ineqs": [{"b": list(b), "c": format_rational(c)} for b, c in self.inequalities]}

    def _rows(self) -> list:
        return [(tuple(QQ(b) for b in normal), bound) for normal, bound in self.inequalities]

    def is_feasible(self) -> bool:
        return _fourier_motzkin_feasible(self._rows(), self.dimension)

    def is_bounded(self) -> bool:
        """True when the recession cone ``{d : b . d >= 0}`` is trivial."""
        n = self.dimension
        cone = [(normal, QQ.zero) for normal, _ in self._rows()]
        for j, sign in itertools.product(range(n), (1, -1)):
            direction = tuple(QQ(sign) if i == j else QQ.zero for i in range(n))
            if _fourier_motzkin_feasible(cone + [(direction, QQ.one)], n):
                return False
        return True

    def contains(self, point: Sequence) -> bool:
        point = [parse_rational(x) for x in point]
        return all(sum((b * x for b, x in zip(normal, point)), QQ.zero) >= c for normal, c in self.inequalities)

    def active(self, point: Sequence) -> frozenset:
        """Indices of the inequalities that hold with equality at ``point``."""
        return frozenset(
            i
            for i, (normal, c) in enumerate(self.inequalities)
            if sum((b * x for b, x in zip(normal, point)), QQ.zero) == c
        )

    @cached_property
    def vertex_list(self) -> list:
        n = self.dimension
        if n > MAX_DIMENSION:
            raise ValueError(f"vertex enumeration supports n <= {MAX_DIMENSION}, got {n}")
        if not self.is_feasible():
            raise EmptyPolyhedron(f"no point satisfies {len(self.inequalities)} inequalities")
        if not self.is_bounded():
            raise Unbounded("polyhedron has a nontrivial recession cone")
        if n == 0:
            return [()]
        found = set()
        for subset in itertools.combinations(range(len(self.inequalities)), n):
            rows = {r: {j: QQ(b) for j, b in enumerate(self.inequalities[i][0]) if b} for r, i in enumerate(subset)}
            if linalg.rank(rows, n, n) < n:
                continue
            rhs = [self.inequalities[i][1] for i in subset]
            solution = linalg.solve_linear(rows, rhs, n, n)
            point = tuple(solution.get(j, QQ.zero) for j in range(n))
            if self.contains(point):
                found.add(point)
        logger.debug(f"{len(found)} vertices from {len(self.inequalities)} inequalities")
        return sorted(found)

    def min_linear(self, nu: Sequence):
        """Minimum of ``nu . x`` over the polyhedron, attained at a vertex."""
        return min(sum((parse_rational(a) * x for a, x in zip(nu, v)), QQ.zero) for v in self.vertex_list)

    def faces(self) -> set:
        """Vertex sets of all nonempty faces, the polyhedron itself included."""
        points = self.vertex_list
        active = [self.active(v) for v in points]
        faces = set()
        tight = {frozenset(a) for a in active}
        # every face is cut out by the constraints tight on all of its vertices
        candidates = {frozenset()}
        for a in tight:
            for r in range(len(a) + 1):
                candidates.update(frozenset(c) for c in itertools.combinations(sorted(a), r))
        for subset in candidates:
            members = frozenset(v for v, a in zip(points, active) if subset <= a)
            if members:
                faces.add(members)
        return faces

    def intersection(self, other: "RationalPolyhedron") -> "RationalPolyhedron":
        if other.dimension != self.dimension:
            raise DataError("cannot intersect polyhedra of different dimensions")
        return RationalPolyhedron(self.dimension, self.inequalities + other.inequalities)


def vertices(polyhedron: RationalPolyhedron) -> list:
    """Exact vertices, deduplicated and sorted lexicographically."""
    return list(polyhedron.vertex_list)


def affine_transform(polyhedron: RationalPolyhedron, matrix: Sequence[Sequence[int]], shift: Sequence) -> RationalPolyhedron:
    """
    Image under x -> A x + f with A in GL(n, Z).

    b . x >= c becomes (A^{-T} b) . x' >= c + (A^{-T} b) . f.
    """
    a = check_unimodular(matrix)
    if a.shape[0] != polyhedron.dimension:
        raise DataError("transition matrix does not match the polyhedron dimension")
    inverse_transpose = a.inv().T
    shift = [parse_rational(x) for x in shift]
    rows = []
    for normal, bound in polyhedron.inequalities:
        image = inverse_transpose * Matrix(normal)
        new_normal = tuple(int(x) for x in image)
        rows.append((new_normal, bound + sum((QQ(b) * f for b, f in zip(new_normal, shift)), QQ.zero)))
    return RationalPolyhedron(polyhedron.dimension, tuple(rows))


@dataclass
class PolyhedralComplex:
    """Cells of a rational polyhedral complex; faces are part of the cell list."""

    cells: list

    @classmethod
    def from_json(cls, data: dict) -> "PolyhedralComplex":
        return cls([RationalPolyhedron.from_json(cell) for cell in data.get("cells", [])])

    def to_json(self) -> dict:
        return {"cells": [cell.to_json() for cell in self.cells]}


def validate_complex(complex_: PolyhedralComplex) -> VerificationReport:
    """
    Checks the complex axioms exactly.

    (i) every cell is a bounded nonempty rational polyhedron, (ii) every face
    of a cell is a cell, (iii) two cells meet in a common face.
    """
    report = VerificationReport(name="polyhedral complex", metadata={"cells": len(complex_.cells)})
    good = []
    for index, cell in enumerate(complex_.cells):
        report.checked += 1
        try:
            cell.vertex_list
        except (EmptyPolyhedron, Unbounded, ValueError) as e:
            report.fail("(i)", f"cell {index}: {e}")
            continue
        good.append((index, cell))
    known = {frozenset(cell.vertex_list): index for index, cell in good}
    for index, cell in good:
        report.checked += 1
        for face in sorted(cell.faces(), key=sorted):
            if face not in known:
                report.fail("(ii)", f"cell {index} has face {_points(face)} missing from the complex")
                break
    for (i, first), (j, second) in itertools.combinations(good, 2):
        report.checked += 1
        meet = first.intersection(second)
        if not meet.is_feasible():
            continue
        shared = frozenset(meet.vertex_list)
        if shared not in first.faces() or shared not in second.faces():
            report.fail("(iii)", f"cells {i} and {j} meet in {_points(shared)}, which is not a common face")
    return report


def _points(points) -> str:
    return "{" + ", ".join("(" + ",".join(format_rational(x) for x in p) + ")" for p in sorted(points)) + "}"
