"""Exact simulation of multiphoton interference and feed-forward filtering.

The package follows one photonic circuit: two field modes interfere on a
balanced splitter (or a weakly reflecting tap), a counter pair resolves
the reflected photons, and a programmable condition on the inferred
transmitted state drives a shutter.  All combinatorial cores run in
exact integer arithmetic; floating point enters only at the final
amplitude or probability assembly.
"""

from .condition import (
    ConditionDomainError,
    ConditionError,
    ConditionEvalError,
    ConditionSyntaxError,
    FilterCondition,
    evaluate,
    parse,
)
from .detectors import (
    DetectorModel,
    joint_response,
    noisy_filtered_state,
    purity,
    response,
)
from .filtering import (
    FCoefficients,
    FilterSettings,
    MeasurementOutcome,
    apply_kraus,
    condition_probability,
    conditional_distribution,
    conditional_state,
    f_coefficients,
    outcome_probability,
    shutter_probability,
)
from .fock import (
    MixedState,
    OutcomeDistribution,
    TwoModeState,
    from_sum_diff,
    inner_product,
    make_uniform_fixed_sum,
    make_uniform_range,
    marginal_sum_diff,
    state_from_json,
    state_to_json,
    to_sum_diff,
)
from .interference import (
    BsAmplitudeTable,
    bs_transform,
    hom_distribution,
    threshold_probability,
)
from .oracle import oracle_filter

__all__ = [
    "BsAmplitudeTable",
    "ConditionDomainError",
    "ConditionError",
    "ConditionEvalError",
    "ConditionSyntaxError",
    "DetectorModel",
    "FCoefficients",
    "FilterCondition",
    "FilterSettings",
    "MeasurementOutcome",
    "MixedState",
    "OutcomeDistribution",
    "TwoModeState",
    "apply_kraus",
    "bs_transform",
    "condition_probability",
    "conditional_distribution",
    "conditional_state",
    "evaluate",
    "f_coefficients",
    "from_sum_diff",
    "hom_distribution",
    "inner_product",
    "joint_response",
    "make_uniform_fixed_sum",
    "make_uniform_range",
    "marginal_sum_diff",
    "noisy_filtered_state",
    "oracle_filter",
    "outcome_probability",
    "parse",
    "purity",
    "response",
    "shutter_probability",
    "state_from_json",
    "state_to_json",
    "threshold_probability",
    "to_sum_diff",
]

__version__ = "0.1.0"
