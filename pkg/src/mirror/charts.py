"""Charts of the mirror: Maurer-Cartan series, certificates and Fukaya-trick pushforwards."""

import logging
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

from sympy import QQ, Matrix

from src.algebra.checks import check_ud_membership
from src.algebra.operators import OperatorSystem
from src.algebra.reports import VerificationReport
from src.algebra.spaces import Entries, GradedSpace, apply_linear, plug, pull_back
from src.errors import DataError, DegreeLeak
from src.geometry import RationalPolyhedron
from src.labels import check_unimodular, pairing
from src.mirror.series import LaurentSeries
from src.novikov import format_rational, parse_rational

logger = logging.getLogger(__name__)

TORUS_FACTOR = re.compile(r"t(\d+)")

DEFAULT_MARGIN = QQ(1, 2)


def _torus_indices(name: str) -> Optional[tuple]:
    """Positions of theta factors in a basis name such as ``t1t3``; None for other names."""
    if name == "1":
        return ()
    if not re.fullmatch(r"(t\d+)+", name):
        return None
    indices = tuple(int(i) - 1 for i in TORUS_FACTOR.findall(name))
    if list(indices) != sorted(set(indices)):
        raise DataError(f"exterior basis name {name!r} must list increasing factors")
    return indices


def _wedge_image(columns: list, indices: tuple) -> dict:
    """Expands (A e_{j1}) ^ ... ^ (A e_{jr}) in sorted monomials."""
    current = {(): QQ.one}
    for j in indices:
        column = columns[j]
        step: dict = {}
        for monomial, coef in current.items():
            for i, a in column.items():
                if i in monomial:
                    continue
                sign = -1 if sum(1 for x in monomial if x > i) % 2 else 1
                key = tuple(sorted(monomial + (i,)))
                value = step.get(key, QQ.zero) + coef * a * sign
                if value:
                    step[key] = value
                else:
                    step.pop(key, None)
        current = step
    return current


def exterior_basis_map(space: GradedSpace, matrix: Matrix) -> Entries:
    """
    The algebra map induced by ``matrix`` on degree-one theta classes.

    Basis elements whose names are not exterior monomials are fixed.
    """
    n = matrix.shape[0]
    columns = []
    for j in range(n):
        columns.append({i: QQ(int(matrix[i, j])) for i in range(n) if matrix[i, j]})
    lookup = {}
    parsed = {}
    for index, name in enumerate(space.names):
        indices = _torus_indices(name)
        parsed[index] = indices
        if indices is not None:
            lookup[indices] = index
    entries: Entries = {}
    for index in range(space.dim):
        indices = parsed[index]
        if indices is None:
            entries[(index,)] = {index: QQ.one}
            continue
        row = {}
        for monomial, coef in _wedge_image(columns, indices).items():
            if monomial not in lookup:
                raise DataError(f"exterior monomial {monomial} is missing from the basis")
            row[lookup[monomial]] = coef
        if row:
            entries[(index,)] = row
    return entries


def basis_maps(space: GradedSpace, f_star: Sequence[Sequence[int]]):
    """(Phi, Phi^{-1}) with Phi acting by F^{-T} on theta classes."""
    matrix = check_unimodular(f_star)
    forward = matrix.inv().T
    return exterior_basis_map(space, forward), exterior_basis_map(space, matrix.T)


def energy_shift(labels, beta, shift: Sequence):
    """<d beta, shift>, the energy change of a class under a basepoint move."""
    return pairing(labels.boundary_of(tuple(beta)), shift)


def pushforward_system(f_star: Sequence[Sequence[int]], shift: Sequence, system: OperatorSystem) -> OperatorSystem:
    """
    Conjugates a system through the Fukaya-trick identification.

    Labels are relabelled (boundaries through F, energies by ``<d beta, shift>``)
    and every component becomes Phi o t_{k,beta} o (Phi^{-1})^{x k}. Classes that
    enter the truncation window only after the shift stay unknown.
    """
    labels = system.labels.pushforward(f_star, shift)
    forward, backward = basis_maps(system.source, f_star)
    target_forward = forward
    if not system.target.same_basis(system.source):
        target_forward, _ = basis_maps(system.target, f_star)
    inverse_factor = pull_back(backward)
    components = {}
    for key, entries in system.components.items():
        outer = apply_linear(target_forward, entries)
        components[key] = plug(outer, [inverse_factor] * key[0])
    old_known = system.keys()
    result = OperatorSystem(
        system.source, system.target, labels, system.context, {}, system.base_degree, known=[]
    )
    known = [key for key in old_known if key[1] in result.support]
    logger.debug(f"pushforward keeps {len(known)} of {len(old_known)} known components")
    return result.with_components(components, known=known)


def pushforward_pairing(space: GradedSpace, f_star: Sequence[Sequence[int]], eta: int, vector: dict):
    """<F_* eta, v>: the eta-coefficient of Phi^{-1}(v)."""
    _, backward = basis_maps(space, f_star)
    total = QQ.zero
    for i, c in vector.items():
        total += backward.get((i,), {}).get(eta, QQ.zero) * c
    return total


@dataclass(frozen=True)
class ChartBundle:
    """
    One chart: a UD algebra on the cohomology model of the fiber over ``basepoint``.

    Args:
        name: chart label used in reports and transitions
        m: A-infinity algebra with its label group and truncation
        basepoint: q in the chart's affine coordinates
        polyhedron: the domain Delta, containing q
    """

    name: str
    m: OperatorSystem
    basepoint: tuple
    polyhedron: RationalPolyhedron

    def __post_init__(self):
        object.__setattr__(self, "basepoint", tuple(parse_rational(x) for x in self.basepoint))
        if len(self.basepoint) != self.dimension:
            raise DataError(f"chart {self.name}: basepoint has {len(self.basepoint)} coordinates, expected {self.dimension}")

    @property
    def labels(self):
        return self.m.labels

    @property
    def context(self):
        return self.m.context

    @property
    def dimension(self) -> int:
        return self.m.labels.dimension

    @property
    def space(self) -> GradedSpace:
        return self.m.source

    def certificate_terms(self) -> list:
        """(energy, boundary, class) for every class carrying a curvature term."""
        terms = []
        for beta in self.m.support:
            if any(beta) and self.m.get(0, beta):
                energy, _, boundary = self.labels.classify(beta)
                terms.append((energy, boundary, beta))
        return terms

    @cached_property
    def series(self) -> tuple:
        return mc_series(self)

    def verify(self, threads: int = 1) -> VerificationReport:
        report = VerificationReport(name=f"chart {self.name}", metadata=self.context.describe())
        report.merge(check_ud_membership(self.m, threads=threads))
        inside = VerificationReport(name="basepoint", checked=1)
        if not self.polyhedron.contains(self.basepoint):
            inside.fail("basepoint", f"q = {[format_rational(x) for x in self.basepoint]} is not in the domain")
        report.merge(inside)
        report.merge(convergence_certificate(self.certificate_terms(), self.polyhedron, self.basepoint))
        return report


def mc_series(chart: ChartBundle):
    """
    P = sum T^E(beta) Y^{d beta} m_{0,beta}, split as W * 1 + Q.

    Returns:
        (P, W, Q) with P and Q as {basis index: LaurentSeries}

    Raises:
        DegreeLeak: when a curvature term sits outside Maslov 0 and 2, or in the wrong degree.
    """
    m = chart.m
    n = chart.dimension
    precision = chart.context.energy_cutoff
    one = m.target.one
    collected: dict = {}
    for beta in m.support:
        entries = m.get(0, beta)
        if entries is None:
            raise DegreeLeak(f"curvature component {list(beta)} is unknown")
        if not entries:
            continue
        energy, mu, boundary = chart.labels.classify(beta)
        for output, coef in entries.get((), {}).items():
            degree = m.target.degree(output)
            if mu == 2 and output != one:
                raise DegreeLeak(f"Maslov-2 class {list(beta)} has a curvature term at {m.target.names[output]}")
            if mu == 0 and degree != 2:
                raise DegreeLeak(f"Maslov-0 class {list(beta)} has a curvature term in degree {degree}")
            if mu not in (0, 2):
                raise DegreeLeak(f"class {list(beta)} of Maslov index {mu} has a curvature term")
            collected.setdefault(output, []).append(((energy, boundary), coef))
    P = {i: LaurentSeries(n, terms, precision) for i, terms in collected.items()}
    zero = LaurentSeries.zero(n, precision)
    W = P.get(one, zero) if one is not None else zero
    Q = {i: series for i, series in P.items() if i != one}
    return P, W, Q


def ideal_generators(chart: ChartBundle) -> dict:
    """The weak Maurer-Cartan generators Q_pq keyed by basis name."""
    _, _, Q = chart.series
    return {chart.space.names[i]: series for i, series in Q.items() if not series.is_zero()}


def convergence_certificate(
    terms: Sequence, polyhedron: RationalPolyhedron, basepoint: Sequence, margin=DEFAULT_MARGIN
) -> VerificationReport:
    """
    E + <d beta, u - q> >= margin * E at every vertex u of the domain.

    Linear in u, so the vertices suffice. ``terms`` holds (energy, boundary)
    pairs, optionally followed by the class for reporting.
    """
    margin = parse_rational(margin)
    basepoint = [parse_rational(x) for x in basepoint]
    report = VerificationReport(name="convergence certificate", metadata={"margin": format_rational(margin)})
    vertices = polyhedron.vertex_list
    for term in terms:
        energy, boundary = parse_rational(term[0]), term[1]
        beta = term[2] if len(term) > 2 else None
        report.checked += 1
        if not any(boundary):
            continue
        worst = min(
            vertices,
            key=lambda u: pairing(boundary, [x - q for x, q in zip(u, basepoint)]),
        )
        value = energy + pairing(boundary, [x - q for x, q in zip(worst, basepoint)])
        if value < margin * energy:
            report.fail(
                "certificate",
                f"energy {format_rational(energy)}, boundary {list(boundary)}: "
                f"{format_rational(value)} < {format_rational(margin * energy)} at vertex "
                f"({', '.join(format_rational(x) for x in worst)})",
                beta=beta,
            )
    return report
