"""Cocycle and choice-independence checks for gluing maps."""

import logging
from typing import Optional

from src.algebra.operators import OperatorSystem
from src.algebra.reports import VerificationReport
from src.errors import DataError, DegreeError, MissingWitness
from src.mirror.charts import ideal_generators
from src.mirror.gluing import TransitionData, gluing_hom, identity_transition
from src.mirror.series import LaurentSeries
from src.novikov import format_rational

logger = logging.getLogger(__name__)


def _generators(n: int) -> list:
    return [tuple(1 if i == r else 0 for i in range(n)) for r in range(n)]


def _describe(mismatch) -> str:
    energy, nu, mine, theirs = mismatch
    return f"T^{format_rational(energy)} Y^{list(nu)}: {format_rational(mine)} != {format_rational(theirs)}"


def _error_factor(witness: dict, generators: dict, n: int, precision) -> LaurentSeries:
    """exp(sum_pq S_pq Q_pq) at the target chart's reference point."""
    total = LaurentSeries.zero(n, precision)
    for name, series in witness.items():
        if name not in generators:
            raise DataError(f"witness names unknown ideal generator {name!r}")
        total = total + series * generators[name]
    return total.exp_plus(precision)


def cocycle_verify(
    t_ij: TransitionData,
    t_jk: TransitionData,
    t_ik: TransitionData,
    witness: Optional[dict] = None,
) -> VerificationReport:
    """
    phi_ik = phi_ij o phi_jk on the generators Y_r.

    With nonzero weak Maurer-Cartan ideals on chart i, ``witness[r][pq]`` gives
    series S with phi_ij phi_jk(Y_r) = phi_ik(Y_r) exp(sum S_pq Q_pq).

    Raises:
        MissingWitness: if chart i has nonzero ideal generators and no witness is given.
    """
    if t_ij.source.name != t_jk.target.name or t_ik.source.name != t_jk.source.name or t_ik.target.name != t_ij.target.name:
        raise DataError("transitions do not form a triangle i <- j <- k")
    chart_i = t_ij.target
    n = chart_i.dimension
    precision = chart_i.context.energy_cutoff
    generators = ideal_generators(chart_i)
    if generators and witness is None:
        raise MissingWitness(f"chart {chart_i.name} has ideal generators {sorted(generators)}; a witness is required")
    phi_ij, phi_jk, phi_ik = gluing_hom(t_ij), gluing_hom(t_jk), gluing_hom(t_ik)
    name = f"cocycle {chart_i.name}<-{t_jk.target.name}<-{t_jk.source.name}"
    report = VerificationReport(name=name, metadata=chart_i.context.describe())
    origin = (0,) * n
    middle = phi_ij.input_reference(origin)
    for r, alpha in enumerate(_generators(n)):
        report.checked += 1
        composite = phi_ij(phi_jk.image(alpha, precision, target_reference=middle))
        direct = phi_ik.image(alpha, precision, target_reference=origin)
        if generators:
            factor = _error_factor(witness.get(r, witness.get(str(r), {})), generators, n, precision)
            direct = direct * factor
        mismatch = composite.first_difference(direct)
        if mismatch is not None:
            report.fail("cocycle", f"Y{r + 1}: " + _describe(mismatch))
    report.merge(identity_verify(chart_i))
    return report


def identity_verify(chart) -> VerificationReport:
    """phi_ii = id on the generators."""
    report = VerificationReport(name=f"identity {chart.name}")
    phi = gluing_hom(identity_transition(chart))
    n = chart.dimension
    for r, alpha in enumerate(_generators(n)):
        report.checked += 1
        image = phi.image(alpha)
        expected = LaurentSeries.monomial(n, 0, alpha, precision=chart.context.energy_cutoff)
        mismatch = image.first_difference(expected)
        if mismatch is not None:
            report.fail("identity", f"Y{r + 1}: " + _describe(mismatch))
    return report


def choice_independence_verify(
    t1: TransitionData,
    t2: TransitionData,
    witness: dict,
    homotopy: Optional[OperatorSystem] = None,
) -> VerificationReport:
    """
    Two transitions between the same charts glue compatibly modulo the ideal.

    ``witness[r][pq]`` are series S with phi_1(Y_r) = phi_2(Y_r) exp(sum S_pq Q_pq).
    A supplied homotopy between the two C's is degree-checked: its (k, beta)
    component has degree -k - mu(beta).
    """
    if t1.source.name != t2.source.name or t1.target.name != t2.target.name:
        raise DataError("choice independence compares transitions between the same charts")
    chart = t1.target
    n = chart.dimension
    precision = chart.context.energy_cutoff
    generators = ideal_generators(chart)
    report = VerificationReport(name=f"choice independence {t1.name}", metadata=chart.context.describe())
    if homotopy is not None:
        degrees = VerificationReport(name="homotopy degree", checked=1)
        try:
            homotopy.with_components(homotopy.components, known=homotopy.known, base_degree=0).check_degrees()
        except DegreeError as e:
            degrees.fail("homotopy degree", str(e))
        report.merge(degrees)
    phi_1, phi_2 = gluing_hom(t1), gluing_hom(t2)
    origin = (0,) * n
    for r, alpha in enumerate(_generators(n)):
        report.checked += 1
        first = phi_1.image(alpha, precision, target_reference=origin)
        second = phi_2.image(alpha, precision, target_reference=origin)
        entry = witness.get(r, witness.get(str(r), {}))
        if entry:
            second = second * _error_factor(entry, generators, n, precision)
        mismatch = first.first_difference(second)
        if mismatch is not None:
            report.fail("choice independence", f"Y{r + 1}: " + _describe(mismatch))
    return report
