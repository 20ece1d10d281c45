"""Contractions (i, pi, G) between a complex and a smaller model."""

from dataclasses import dataclass

from sympy import QQ

from src.algebra.reports import VerificationReport
from src.algebra.spaces import (
    Entries,
    GradedSpace,
    add_entries,
    apply_linear,
    first_difference,
)
from src.errors import DegreeError


def compose_linear(outer: Entries, inner: Entries) -> Entries:
    return apply_linear(outer, inner)


def identity_map(space: GradedSpace) -> Entries:
    return {(i,): {i: QQ.one} for i in range(space.dim)}


def linear_combination(*terms) -> Entries:
    """Sum of (scale, entries) pairs."""
    result: Entries = {}
    for scale, entries in terms:
        add_entries(result, entries, scale)
    return result


def linear_degree(source: GradedSpace, target: GradedSpace, entries: Entries, expected: int, name: str):
    for (i,), row in entries.items():
        for j in row:
            if target.degree(j) - source.degree(i) != expected:
                raise DegreeError(
                    f"{name} maps {source.names[i]} to {target.names[j]}, expected degree {expected}"
                )


@dataclass(frozen=True)
class Contraction:
    """
    Transfer data between a model H and a complex C.

    Attributes:
        model, complex: the spaces H and C
        d_model: the differential delta on H
        d_complex: m_{1,0} on C
        i: H -> C of degree 0
        pi: C -> H of degree 0
        homotopy: G: C -> C of degree -1
        strong: whether the side conditions are claimed
    """

    model: GradedSpace
    complex: GradedSpace
    d_model: Entries
    d_complex: Entries
    i: Entries
    pi: Entries
    homotopy: Entries
    strong: bool = True

    def validate_degrees(self):
        linear_degree(self.model, self.complex, self.i, 0, "i")
        linear_degree(self.complex, self.model, self.pi, 0, "pi")
        linear_degree(self.complex, self.complex, self.homotopy, -1, "G")
        linear_degree(self.model, self.model, self.d_model, 1, "delta")
        linear_degree(self.complex, self.complex, self.d_complex, 1, "m_1,0")

    def to_json(self) -> dict:
        from src.fixtures.schemas import dump_linear

        return {
            "model": self.model.to_json(),
            "complex": self.complex.to_json(),
            "d_model": dump_linear(self.model, self.model, self.d_model),
            "d_complex": dump_linear(self.complex, self.complex, self.d_complex),
            "i": dump_linear(self.model, self.complex, self.i),
            "pi": dump_linear(self.complex, self.model, self.pi),
            "G": dump_linear(self.complex, self.complex, self.homotopy),
            "strong": self.strong,
        }


def identity_contraction(space: GradedSpace, differential: Entries) -> Contraction:
    ident = identity_map(space)
    return Contraction(space, space, differential, differential, ident, ident, {}, strong=True)


def _equation(report: VerificationReport, label: str, lhs: Entries, rhs: Entries, source, target):
    report.checked += 1
    mismatch = first_difference(lhs, rhs)
    if mismatch is not None:
        (i,), j, got, want = mismatch
        report.fail(label, f"{source.names[i]} -> {target.names[j]}: {got} != {want}")


def check_contraction(c: Contraction) -> VerificationReport:
    """Cochain-map and homotopy equations, plus the side conditions when strong."""
    report = VerificationReport(name="contraction", metadata={"strong": c.strong})
    try:
        c.validate_degrees()
    except DegreeError as e:
        return report.fail("degree", str(e))
    H, C = c.model, c.complex
    _equation(report, "cochain map i", compose_linear(c.d_complex, c.i), compose_linear(c.i, c.d_model), H, C)
    _equation(report, "cochain map pi", compose_linear(c.pi, c.d_complex), compose_linear(c.d_model, c.pi), C, H)
    lhs = linear_combination((1, compose_linear(c.i, c.pi)), (-1, identity_map(C)))
    rhs = linear_combination(
        (1, compose_linear(c.d_complex, c.homotopy)), (1, compose_linear(c.homotopy, c.d_complex))
    )
    _equation(report, "homotopy", lhs, rhs, C, C)
    if c.strong:
        _equation(report, "pi i = id", compose_linear(c.pi, c.i), identity_map(H), H, H)
        _equation(report, "G G = 0", compose_linear(c.homotopy, c.homotopy), {}, C, C)
        _equation(report, "G i = 0", compose_linear(c.homotopy, c.i), {}, H, C)
        _equation(report, "pi G = 0", compose_linear(c.pi, c.homotopy), {}, C, H)
    return report
