"""Verification of the wall-crossing identity for one transition."""

import logging
from typing import Optional, Sequence

from src.algebra.reports import VerificationReport
from src.mirror.charts import basis_maps
from src.mirror.gluing import GluingMap, TransitionData, gluing_hom
from src.mirror.series import LaurentSeries
from src.novikov import format_rational

logger = logging.getLogger(__name__)


def _pairing_rows(space, f_star) -> dict:
    """eta -> {basis index v: <F_* eta, v>}."""
    _, backward = basis_maps(space, f_star)
    rows: dict = {}
    for (v,), row in backward.items():
        for eta, coef in row.items():
            rows.setdefault(eta, {})[v] = coef
    return rows


def correction_series(transition: TransitionData, eta_row: dict, theta: int) -> LaurentSeries:
    """
    R^eta_theta = sum_beta T^E(beta) Y^{d beta} <F_* eta, C_{1,beta}(theta)>.

    Terms of classes whose C_{1,beta} is unknown cap the precision.
    """
    C = transition.C
    labels = C.labels
    n = transition.target.dimension
    precision = C.context.energy_cutoff
    terms = []
    for beta in C.support:
        energy, _, boundary = labels.classify(beta)
        entries = C.get(1, beta)
        if entries is None:
            precision = min(precision, energy)
            continue
        image = entries.get((theta,), {})
        coef = sum((eta_row.get(v, 0) * c for v, c in image.items()), 0)
        if coef:
            terms.append(((energy, boundary), coef))
    return LaurentSeries(n, terms, precision)


def wall_crossing_verify(
    transition: TransitionData, etas: Optional[Sequence[int]] = None, phi: Optional[GluingMap] = None
) -> VerificationReport:
    """
    phi(<eta, P_k>) = <F_* eta, 1> W_j + sum_pq R^eta_pq Q_j,pq for every basis eta.

    Both sides are compared on the terms each of them determines.
    """
    phi = phi or gluing_hom(transition)
    source, target = transition.source, transition.target
    space = source.space
    P_k, _, _ = source.series
    _, W_j, Q_j = target.series
    rows = _pairing_rows(space, transition.f_star)
    one = space.one
    n = target.dimension
    report = VerificationReport(name=f"wall crossing {transition.name}", metadata=target.context.describe())
    for eta in etas if etas is not None else range(space.dim):
        report.checked += 1
        component = P_k.get(eta, LaurentSeries.zero(n, source.context.energy_cutoff))
        lhs = phi(component)
        row = rows.get(eta, {})
        rhs = W_j * row.get(one, 0)
        for theta, generator in Q_j.items():
            rhs = rhs + correction_series(transition, row, theta) * generator
        mismatch = lhs.first_difference(rhs)
        if mismatch is not None:
            energy, nu, mine, theirs = mismatch
            report.fail(
                "wall crossing",
                f"eta = {space.names[eta]}: coefficient of T^{format_rational(energy)} Y^{list(nu)} "
                f"is {format_rational(mine)} on the left and {format_rational(theirs)} on the right",
            )
    logger.info(f"Wall crossing {transition.name}: {report.summary()}")
    return report
