"""Objective Bayes factors for zero-inflated count models."""
__version__ = "0.1.0"

from .bayes_factor import (
    BfComparison,
    BfResult,
    InterpretationCategory,
    all_zero_limit,
    interpret,
    log_bayes_factor,
)
from .errors import *  # noqa: F401,F403
from .kernels import BACKEND
from .marginals import MarginalResult, log_marginal
from .modes import DEFAULT_GAMMA, Mode
from .stats import (
    CountSample,
    Family,
    NBParams,
    PoissonParams,
    SufficientStats,
    ZINBParams,
    ZIPParams,
    compute_suff_stats,
    log_likelihood,
    log_pmf,
)

__all__ = [
    "__version__",
    "BACKEND",
    "BfComparison",
    "BfResult",
    "CountSample",
    "DEFAULT_GAMMA",
    "Family",
    "InterpretationCategory",
    "MarginalResult",
    "Mode",
    "NBParams",
    "PoissonParams",
    "SufficientStats",
    "ZINBParams",
    "ZIPParams",
    "all_zero_limit",
    "compute_suff_stats",
    "interpret",
    "log_bayes_factor",
    "log_likelihood",
    "log_marginal",
    "log_pmf",
]
