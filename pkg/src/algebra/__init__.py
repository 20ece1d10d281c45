"""Make algebra package importable."""

from .checks import (
    check_ainf,
    check_cyclic_unit,
    check_divisor_axiom,
    check_full_unit,
    check_hom,
    check_ud_membership,
    check_ud_morphism,
    check_ud_object,
    check_unit,
)
from .maurer_cartan import mc_eval, weak_mc_potential
from .operators import OperatorSystem, compose, identity_system, star
from .reports import Failure, VerificationReport
from .spaces import GradedSpace

__all__ = [
    "Failure",
    "GradedSpace",
    "OperatorSystem",
    "VerificationReport",
    "check_ainf",
    "check_cyclic_unit",
    "check_divisor_axiom",
    "check_full_unit",
    "check_hom",
    "check_ud_membership",
    "check_ud_morphism",
    "check_ud_object",
    "check_unit",
    "compose",
    "identity_system",
    "mc_eval",
    "star",
    "weak_mc_potential",
]
