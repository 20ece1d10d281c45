"""Assembly of verified charts and transitions into one atlas."""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

from src.algebra.checks import run_per_key
from src.algebra.reports import VerificationReport
from src.errors import DataError, WRescueError
from src.geometry import PolyhedralComplex, validate_complex
from src.mirror.charts import ChartBundle
from src.mirror.cocycle import cocycle_verify, identity_verify
from src.mirror.gluing import TransitionData, gluing_hom, val_compatibility_check
from src.mirror.wallcross import wall_crossing_verify
from src.novikov import format_rational, parse_rational

logger = logging.getLogger(__name__)


@dataclass
class Atlas:
    """Charts glued along verified transitions, with the matched superpotentials."""

    charts: dict
    transitions: dict
    report: VerificationReport
    superpotentials: dict = field(default_factory=dict)

    def locate(self, position: Sequence) -> list:
        """Charts whose domain contains an absolute affine position (the fibration record)."""
        position = [parse_rational(x) for x in position]
        return [name for name, chart in self.charts.items() if chart.polyhedron.contains(position)]

    def to_json(self) -> dict:
        return {
            "charts": [
                {
                    "name": name,
                    "basepoint": [format_rational(x) for x in chart.basepoint],
                    "polyhedron": chart.polyhedron.to_json(),
                    "superpotential": self.superpotentials[name].to_json(),
                }
                for name, chart in self.charts.items()
            ],
            "transitions": [
                {
                    "target": t.target.name,
                    "source": t.source.name,
                    "F_star": [list(row) for row in t.f_star],
                    "shift": [format_rational(x) for x in t.shift],
                    "overlap": t.overlap.to_json(),
                }
                for t in self.transitions.values()
            ],
            "report": self.report.model_dump(),
        }


def glue_atlas(
    charts: Sequence[ChartBundle],
    transitions: Sequence[TransitionData],
    complex_: Optional[PolyhedralComplex] = None,
    witnesses: Optional[dict] = None,
    threads: int = 1,
) -> Atlas:
    """
    Verifies every chart and transition and glues them.

    Raises:
        WRescueError: if phi_jk(W_k) and W_j disagree modulo the ideal on some overlap.
    """
    by_name = {}
    for chart in charts:
        if chart.name in by_name:
            raise DataError(f"duplicate chart name {chart.name!r}")
        by_name[chart.name] = chart
    table = {}
    for t in transitions:
        if t.source.name not in by_name or t.target.name not in by_name:
            raise DataError(f"transition {t.name} refers to an unknown chart")
        table[(t.target.name, t.source.name)] = t
    report = VerificationReport(name="atlas", metadata={"charts": len(by_name), "transitions": len(table)})
    if complex_ is not None:
        report.merge(validate_complex(complex_))
    for chart in by_name.values():
        report.merge(chart.verify(threads))
        report.merge(identity_verify(chart))

    def overlap(key):
        t = table[key]
        sub = VerificationReport(name=f"overlap {t.name}")
        sub.merge(t.verify())
        phi = gluing_hom(t)
        sub.merge(val_compatibility_check(t, phi=phi))
        crossing = wall_crossing_verify(t, phi=phi)
        if not crossing.passed:
            raise WRescueError(f"{t.name}: {crossing.first_failure.detail}")
        sub.merge(crossing)
        return sub

    for sub in run_per_key(sorted(table), overlap, threads):
        report.merge(sub)
    witnesses = witnesses or {}
    for i, j, k in itertools.permutations(sorted(by_name), 3):
        if (i, j) in table and (j, k) in table and (i, k) in table:
            report.merge(cocycle_verify(table[(i, j)], table[(j, k)], table[(i, k)], witnesses.get((i, j, k))))
    superpotentials = {name: chart.series[1] for name, chart in by_name.items()}
    logger.info(f"Atlas: {report.summary()}")
    return Atlas(by_name, table, report, superpotentials)
