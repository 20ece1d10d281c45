"""Make transfer package importable."""

from .canonical import canonical_model
from .contraction import Contraction, check_contraction, identity_contraction
from .harmonic import InnerProductComplex, harmonic_contraction
from .obstruction import (
    bar_differential,
    cyclic_corrector,
    obstruction_energy,
    obstruction_length,
    twisted_differential,
)
from .whitehead import check_homotopy, homotopy_defect, homotopy_inverse, solve_coboundary, whitehead_start

__all__ = [
    "Contraction",
    "InnerProductComplex",
    "bar_differential",
    "canonical_model",
    "check_contraction",
    "check_homotopy",
    "cyclic_corrector",
    "harmonic_contraction",
    "homotopy_defect",
    "homotopy_inverse",
    "identity_contraction",
    "obstruction_energy",
    "obstruction_length",
    "solve_coboundary",
    "twisted_differential",
    "whitehead_start",
]
