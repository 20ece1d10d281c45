"""Make mirror package importable."""

from .atlas import Atlas, glue_atlas
from .charts import (
    ChartBundle,
    convergence_certificate,
    energy_shift,
    ideal_generators,
    mc_series,
    pushforward_system,
)
from .cocycle import choice_independence_verify, cocycle_verify
from .gluing import GluingMap, TransitionData, gluing_hom, identity_transition, val_compatibility_check
from .series import LaurentSeries, eval_series, membership, torus_point, trop
from .wallcross import wall_crossing_verify

__all__ = [
    "Atlas",
    "ChartBundle",
    "GluingMap",
    "LaurentSeries",
    "TransitionData",
    "choice_independence_verify",
    "cocycle_verify",
    "convergence_certificate",
    "energy_shift",
    "eval_series",
    "glue_atlas",
    "gluing_hom",
    "identity_transition",
    "ideal_generators",
    "mc_series",
    "membership",
    "pushforward_system",
    "torus_point",
    "trop",
    "val_compatibility_check",
    "wall_crossing_verify",
]
