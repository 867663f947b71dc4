"""Depression-screening pipeline over smartphone usage logs.

Thin wrapper around the compiled extension. Everything heavy (feature
derivation, selection, nested evaluation, exact attributions) runs in C++.
"""

from ._core import (
    PHQ9_CUTOFF,
    SESSION_GAP_MS,
    ConfigError,
    DataError,
    Model,
    __version__,
    classify_session,
    compute_metrics,
    entropy,
    evaluate,
    exact_shapley,
    explain,
    featurize,
    fit_model,
    generate_cohort,
    hamming_ratio,
    model_from_json,
    model_kinds,
    score_phq9,
    select_features,
    sessionize,
    stack_evaluate,
)

__all__ = [
    "PHQ9_CUTOFF",
    "SESSION_GAP_MS",
    "ConfigError",
    "DataError",
    "Model",
    "__version__",
    "classify_session",
    "compute_metrics",
    "entropy",
    "evaluate",
    "exact_shapley",
    "explain",
    "featurize",
    "fit_model",
    "generate_cohort",
    "hamming_ratio",
    "model_from_json",
    "model_kinds",
    "score_phq9",
    "select_features",
    "sessionize",
    "stack_evaluate",
]
