"""Transition data between charts and the gluing homomorphisms they induce."""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

from sympy import QQ, Matrix

from src.algebra.checks import check_ud_morphism
from src.algebra.operators import OperatorSystem, identity_system
from src.algebra.reports import VerificationReport
from src.errors import CertificateError, DataError, DegreeError, DomainError
from src.geometry import RationalPolyhedron
from src.labels import check_unimodular, pairing
from src.mirror.charts import ChartBundle, _torus_indices, convergence_certificate, pushforward_system
from src.mirror.series import LaurentSeries, eval_series, membership, torus_point, trop
from src.novikov import format_rational, parse_rational

logger = logging.getLogger(__name__)


@dataclass
class TransitionData:
    """
    Identification of chart ``source`` (k) inside chart ``target`` (j).

    ``C`` is a UD homomorphism from the target algebra to the source algebra
    pushed forward through (F, shift); both use the target chart's labels.
    ``overlap`` is given in the target chart's affine coordinates.
    """

    source: ChartBundle
    target: ChartBundle
    f_star: tuple
    shift: tuple
    C: OperatorSystem
    overlap: RationalPolyhedron

    def __post_init__(self):
        self.f_star = tuple(tuple(int(x) for x in row) for row in self.f_star)
        self.shift = tuple(parse_rational(x) for x in self.shift)
        check_unimodular(self.f_star)
        if len(self.shift) != self.target.dimension:
            raise DataError("shift does not match the chart dimension")

    @property
    def name(self) -> str:
        return f"{self.target.name}<-{self.source.name}"

    def pushed_source(self) -> OperatorSystem:
        return pushforward_system(self.f_star, self.shift, self.source.m)

    def correction_classes(self) -> list:
        """Classes beta with C_{0,beta} != 0."""
        return [beta for beta in self.C.support if any(beta) and self.C.get(0, beta)]

    def certificate(self) -> VerificationReport:
        labels = self.C.labels
        terms = []
        for beta in self.correction_classes():
            energy, _, boundary = labels.classify(beta)
            terms.append((energy, boundary, beta))
        report = convergence_certificate(terms, self.overlap, self.target.basepoint)
        report.name = f"certificate {self.name}"
        return report

    def verify(self, threads: int = 1) -> VerificationReport:
        """C is a UD homomorphism target -> pushed source, with Maslov-0 curvature corrections."""
        report = VerificationReport(name=f"transition {self.name}", metadata=self.C.context.describe())
        pushed = self.pushed_source()
        if pushed.labels != self.target.labels:
            report.fail("labels", "pushforward of the source labels differs from the target labels")
            return report
        report.merge(check_ud_morphism(self.C, self.target.m, pushed, threads))
        maslov = VerificationReport(name="C_0 Maslov")
        for beta in self.correction_classes():
            maslov.checked += 1
            if self.C.labels.maslov_of(beta) != 0:
                maslov.fail("C_0 Maslov", "curvature correction outside Maslov index 0", 0, beta)
        report.merge(maslov)
        report.merge(self.certificate())
        return report


def identity_transition(chart: ChartBundle) -> TransitionData:
    n = chart.dimension
    identity = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    C = identity_system(chart.space, chart.labels, chart.context)
    return TransitionData(chart, chart, identity, (0,) * n, C, chart.polyhedron)


class GluingMap:
    """
    Y^alpha -> T^{<alpha, shift>} Y^{F alpha} exp<F alpha, sum_beta C_{0,beta} T^E(beta) Y^{d beta}>.

    Extended linearly to truncated series; each monomial is expanded on its own
    so no precision is lost to negative shifts.
    """

    def __init__(self, transition: TransitionData):
        self.transition = transition
        self.matrix = Matrix(transition.f_star)
        self.dimension = transition.target.dimension
        self.default_precision = transition.C.context.energy_cutoff
        self.corrections = []
        space = transition.C.target
        labels = transition.C.labels
        for beta in transition.correction_classes():
            if labels.maslov_of(beta) != 0:
                raise DegreeError(f"C_0 at class {list(beta)} has Maslov index {labels.maslov_of(beta)}")
            vector = [QQ.zero] * self.dimension
            for output, coef in transition.C.get(0, beta).get((), {}).items():
                indices = _torus_indices(space.names[output])
                if indices is None or len(indices) != 1:
                    raise DegreeError(f"C_0 at class {list(beta)} has a component off the theta classes")
                vector[indices[0]] += coef
            energy, _, boundary = labels.classify(beta)
            self.corrections.append((energy, boundary, vector))

    def output_reference(self, reference: Sequence) -> tuple:
        moved = [parse_rational(r) - s for r, s in zip(reference, self.transition.shift)]
        inverse_transpose = self.matrix.inv().T
        n = self.dimension
        return tuple(sum((int(inverse_transpose[i, j]) * moved[j] for j in range(n)), QQ.zero) for i in range(n))

    def input_reference(self, reference: Sequence) -> tuple:
        """Inverse of ``output_reference``: F^T r + shift."""
        n = self.dimension
        out = [parse_rational(x) for x in reference]
        return tuple(
            sum((int(self.matrix[j, i]) * out[j] for j in range(n)), QQ.zero) + self.transition.shift[i]
            for i in range(n)
        )

    def push_exponent(self, alpha: Sequence) -> tuple:
        return tuple(int(x) for x in self.matrix * Matrix(list(alpha)))

    def exponent_series(self, alpha: Sequence, reference: Sequence) -> LaurentSeries:
        """sum_beta <F alpha, C_{0,beta}> T^E(beta) Y^{d beta}, exact."""
        pushed = self.push_exponent(alpha)
        terms = []
        for energy, boundary, vector in self.corrections:
            coef = pairing(pushed, vector)
            if coef:
                terms.append(((energy, boundary), coef))
        return LaurentSeries(self.dimension, terms, None, reference)

    def image_term(self, energy, alpha, coef, reference_in, precision) -> LaurentSeries:
        reference = self.output_reference(reference_in)
        out_energy = parse_rational(energy) + pairing(alpha, self.transition.shift)
        out_alpha = self.push_exponent(alpha)
        weight = out_energy + pairing(out_alpha, reference)
        exponent = self.exponent_series(alpha, reference)
        low = exponent.min_weight()
        if low is not None and low <= 0:
            raise CertificateError(
                f"{self.transition.name}: correction term of weight {format_rational(low)} at the reference point"
            )
        try:
            factor = exponent.exp_plus(precision - weight)
        except DomainError as e:
            raise CertificateError(str(e)) from e
        return factor.times_monomial(out_energy, out_alpha, coef)

    def image(self, alpha: Sequence, precision=None, reference=None, target_reference=None) -> LaurentSeries:
        """
        phi(Y^alpha), read at ``reference`` in the source chart.

        ``target_reference`` instead fixes the reference point of the result;
        Y^alpha is exact, so either choice loses nothing.
        """
        if target_reference is not None:
            reference = self.input_reference(target_reference)
        reference = reference or (0,) * len(alpha)
        precision = self.default_precision if precision is None else parse_rational(precision)
        return self.image_term(0, tuple(alpha), QQ.one, reference, precision)

    def __call__(self, series: LaurentSeries) -> LaurentSeries:
        precision = series.precision if series.precision is not None else self.default_precision
        reference = self.output_reference(series.reference)
        result = LaurentSeries.zero(self.dimension, precision, reference)
        for (energy, alpha), coef in series.sorted_terms():
            result = result + self.image_term(energy, alpha, coef, series.reference, precision)
        return result


def gluing_hom(transition: TransitionData, check_certificate: bool = True) -> GluingMap:
    """
    The ring homomorphism phi_{jk} of the transition.

    Raises:
        CertificateError: if the half-margin certificate fails on the overlap.
    """
    if check_certificate:
        report = transition.certificate()
        if not report.passed:
            raise CertificateError(f"{transition.name}: {report.first_failure.detail}")
    return GluingMap(transition)


def overlap_points(transition: TransitionData, context) -> list:
    """Torus points over the overlap vertices and their barycenter, in target coordinates."""
    vertices = transition.overlap.vertex_list
    q = transition.target.basepoint
    positions = [tuple(x - b for x, b in zip(u, q)) for u in vertices]
    if positions:
        count = len(positions)
        positions.append(tuple(sum((p[i] for p in positions), QQ.zero) / count for i in range(len(q))))
    return [torus_point(context, position) for position in positions]


def val_compatibility_check(
    transition: TransitionData, points: Optional[Sequence] = None, phi: Optional[GluingMap] = None
) -> VerificationReport:
    """val(phi(Y_r)(y)) = <e_r, shift> + <F e_r, trop y> on overlap points."""
    phi = phi or gluing_hom(transition)
    context = transition.target.context
    if points is None:
        points = overlap_points(transition, context)
    report = VerificationReport(name=f"valuation {transition.name}")
    n = phi.dimension
    for point in points:
        position = trop(point)
        if not membership(point, transition.overlap, transition.target.basepoint):
            report.fail("valuation", f"point at {[format_rational(x) for x in position]} is outside the overlap")
            continue
        for r in range(n):
            report.checked += 1
            alpha = tuple(1 if i == r else 0 for i in range(n))
            value = eval_series(phi.image(alpha), point)
            expected = pairing(alpha, transition.shift) + pairing(phi.push_exponent(alpha), position)
            if value.is_zero() or value.valuation() != expected:
                found = "zero" if value.is_zero() else format_rational(value.valuation())
                report.fail(
                    "valuation",
                    f"Y{r + 1} at {[format_rational(x) for x in position]}: valuation {found}, "
                    f"expected {format_rational(expected)}",
                )
    return report
