"""Growth analysis for weight sequences and their moment mappings."""

from .conditions import (
    CheckPolicy,
    SeriesReport,
    Status,
    Verdict,
    check_condition,
    check_gamma_beta,
    classify_power_series,
)
from .errors import (
    EvaluationError,
    InternalInvariantError,
    QuadratureError,
    ValidationError,
)
from .indices import IndexEstimate, gamma_index, omega_index
from .moments import (
    Jet,
    LambdaFit,
    LaplaceSample,
    TestFunction,
    bump01_taylor,
    derivative_function,
    fit_growth_envelope,
    forward_binomial,
    inversion_coeffs,
    jet_reciprocal,
    lambda_fit,
    laplace_sample,
    make_bump01,
    make_exp_power,
    make_user,
    moment,
    moment_origin,
    phase_forward_binomial,
    phase_inversion_coeffs,
    taylor_bound_check,
)
from .sequences import (
    DerivedSpec,
    Example38Spec,
    ExplicitSpec,
    GevreySpec,
    QGevreySpec,
    WeightSequence,
    dc_minorant,
    derive,
    make_sequence,
    sequence_from_json,
    spec_from_json,
    spec_to_json,
)
from .special_functions import (
    associated_function,
    g_log_modulus,
    omega_evaluator,
    poisson_transform,
    verify_g_decay,
    verify_g_window_bound,
    verify_poisson_lower_bound,
)
from .verdicts import (
    MapStatus,
    MapVerdict,
    MomentMapReport,
    classify,
    default_admissible,
    injectivity_verdict,
    origin_verdicts,
    surjectivity_verdict,
)
from .verification import SUITES, CheckResult, SuiteReport, run_suite

__version__ = "0.1.0"

__all__ = [
    "CheckPolicy",
    "CheckResult",
    "DerivedSpec",
    "EvaluationError",
    "Example38Spec",
    "ExplicitSpec",
    "GevreySpec",
    "IndexEstimate",
    "InternalInvariantError",
    "Jet",
    "LambdaFit",
    "LaplaceSample",
    "MapStatus",
    "MapVerdict",
    "MomentMapReport",
    "QGevreySpec",
    "QuadratureError",
    "SUITES",
    "SeriesReport",
    "Status",
    "SuiteReport",
    "TestFunction",
    "ValidationError",
    "Verdict",
    "WeightSequence",
    "associated_function",
    "bump01_taylor",
    "check_condition",
    "check_gamma_beta",
    "classify",
    "classify_power_series",
    "dc_minorant",
    "default_admissible",
    "derivative_function",
    "derive",
    "fit_growth_envelope",
    "forward_binomial",
    "g_log_modulus",
    "gamma_index",
    "injectivity_verdict",
    "inversion_coeffs",
    "jet_reciprocal",
    "lambda_fit",
    "laplace_sample",
    "make_bump01",
    "make_exp_power",
    "make_sequence",
    "make_user",
    "moment",
    "moment_origin",
    "omega_evaluator",
    "omega_index",
    "origin_verdicts",
    "phase_forward_binomial",
    "phase_inversion_coeffs",
    "poisson_transform",
    "run_suite",
    "sequence_from_json",
    "spec_from_json",
    "spec_to_json",
    "surjectivity_verdict",
    "taylor_bound_check",
    "verify_g_decay",
    "verify_g_window_bound",
    "verify_poisson_lower_bound",
]
