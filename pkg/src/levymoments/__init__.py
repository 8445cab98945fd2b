"""Moments, growth indices, moment bounds and shift-Harnack exponents for
Lévy processes and subordinators."""

from .bounds import GrowthWitness, TimeBound, WitnessError
from .harnack import (
    HarnackProfile,
    HypothesisError,
    SubordinateExponent,
    sde_harnack_profile,
    subordinate_log_harnack,
    subordinate_power_harnack,
)
from .indices import IndexReport, check_hypotheses, estimate_indices
from .moments import (
    MomentEstimate,
    classify_finiteness,
    levy_abs_moment_exact,
    levy_neg_moment_upper,
    sub_exp_neg_moment_exact,
    sub_neg_moment_exact,
    sub_pos_moment_exact,
)
from .processes import (
    BernsteinFunction,
    CharacteristicExponent,
    LevyMeasure,
    LevyTriplet,
    family_from_config,
)

__version__ = "0.1.0"

__all__ = [
    "BernsteinFunction",
    "CharacteristicExponent",
    "GrowthWitness",
    "HarnackProfile",
    "HypothesisError",
    "IndexReport",
    "LevyMeasure",
    "LevyTriplet",
    "MomentEstimate",
    "SubordinateExponent",
    "TimeBound",
    "WitnessError",
    "check_hypotheses",
    "classify_finiteness",
    "estimate_indices",
    "family_from_config",
    "levy_abs_moment_exact",
    "levy_neg_moment_upper",
    "sde_harnack_profile",
    "sub_exp_neg_moment_exact",
    "sub_neg_moment_exact",
    "sub_pos_moment_exact",
    "subordinate_log_harnack",
    "subordinate_power_harnack",
]
