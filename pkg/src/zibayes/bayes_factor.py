"""Bayes factors for the four nested/non-nested comparisons.

The canonical log Bayes factor is the difference of two log marginals. In
paper-literal mode the printed composed expressions are evaluated as well
and stored in ``BfResult.printed_log_bf``; for NB vs Poisson, ZIP vs Poisson
and ZINB vs NB they coincide with the marginal ratio, while the composed ZINB
vs ZIP display collapses a ratio of two sums into one and does not.

All-zero samples
----------------
Both zero-inflated marginals diverge when every count is zero (the ``j = n``
term is an improper prior integral). ZIP vs Poisson is then ``+inf``. The
other comparisons follow the published convention of dropping that divergent
term, which leaves finite limits; ``all_zero_limit`` evaluates them directly.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import InvalidInputError
from .marginals import MarginalResult, log_marginal
from .modes import DEFAULT_GAMMA, Mode
from .stats import CountSample, Family, compute_suff_stats, per_value_gamma_sum

__all__ = [
    "BfComparison",
    "InterpretationCategory",
    "BfResult",
    "LOG_THRESHOLDS",
    "log_bayes_factor",
    "printed_log_bayes_factor",
    "all_zero_limit",
    "interpret",
]


class BfComparison(str, enum.Enum):
    NB_VS_POISSON = "nb-vs-poisson"
    ZIP_VS_POISSON = "zip-vs-poisson"
    ZINB_VS_NB = "zinb-vs-nb"
    ZINB_VS_ZIP = "zinb-vs-zip"

    @property
    def models(self) -> tuple[Family, Family]:
        """``(M1, M0)``."""
        return _MODELS[self]

    @property
    def index(self) -> int:
        return list(BfComparison).index(self) + 1


_MODELS = {
    BfComparison.NB_VS_POISSON: (Family.NB, Family.POISSON),
    BfComparison.ZIP_VS_POISSON: (Family.ZIP, Family.POISSON),
    BfComparison.ZINB_VS_NB: (Family.ZINB, Family.NB),
    BfComparison.ZINB_VS_ZIP: (Family.ZINB, Family.ZIP),
}


class InterpretationCategory(str, enum.Enum):
    STRONG_M0 = "strong-m0"
    MODERATE_M0 = "moderate-m0"
    WEAK_M0 = "weak-m0"
    WEAK_M1 = "weak-m1"
    MODERATE_M1 = "moderate-m1"
    STRONG_M1 = "strong-m1"

    @property
    def favors_m1(self) -> bool:
        return self in (self.WEAK_M1, self.MODERATE_M1, self.STRONG_M1)

    @property
    def description(self) -> str:
        strength, model = self.value.split("-")
        return f"{strength} evidence for {model.upper()}"


# Lower edges of the bands above STRONG_M0, on the log scale.
LOG_THRESHOLDS = (math.log(1 / 10), math.log(1 / 3.2), 0.0, math.log(3.2), math.log(10))


def interpret(log_bf: float) -> InterpretationCategory:
    """Map a log Bayes factor onto the six evidence bands.

    Each band contains its lower edge, so ``log_bf == 0`` is weak evidence
    for M1 and ``log_bf == log(10)`` is strong evidence for M1.
    """
    log_bf = float(log_bf)
    if math.isnan(log_bf):
        raise InvalidInputError("log Bayes factor is NaN")
    cats = list(InterpretationCategory)
    band = 0
    for edge in LOG_THRESHOLDS:
        if log_bf >= edge:
            band += 1
    return cats[band]


@dataclass(frozen=True)
class BfResult:
    log_bf: float
    comparison: BfComparison
    interpretation: InterpretationCategory
    degenerate_all_zero: bool
    mode: Mode
    printed_log_bf: Optional[float] = None
    log_m1: Optional[float] = None
    log_m0: Optional[float] = None

    @property
    def selects_m1(self) -> bool:
        """Decision rule: M1 iff the Bayes factor exceeds 1."""
        return self.log_bf > 0


def _lgamma(x):
    return math.lgamma(x)


def all_zero_limit(
    comparison: BfComparison,
    n: int,
    gamma: float = DEFAULT_GAMMA,
    mode: Mode = Mode.ORACLE_VALIDATED,
) -> float:
    """Log Bayes factor for a sample of ``n`` zeros.

    Oracle-validated mode evaluates the limits of the validated marginals;
    paper-literal mode evaluates the printed limits with the ``Gamma(0)``
    pole term dropped from their sums.
    """
    comparison = BfComparison(comparison)
    mode = Mode.coerce(mode)
    n = int(n)
    if n < 1:
        raise InvalidInputError("n must be at least 1")
    gamma = float(gamma)
    if not gamma > 0:
        raise InvalidInputError("gamma must be positive")
    if comparison is BfComparison.ZIP_VS_POISSON:
        return math.inf
    lg = math.log(gamma)
    ng = n * gamma
    j = np.arange(n)  # j = n is the divergent term
    m = (n - j) * gamma
    if comparison is BfComparison.NB_VS_POISSON:
        sign = 1.0 if mode is Mode.ORACLE_VALIDATED else -1.0
        return sign * 0.5 * lg + 0.5 * math.log(n) + _lgamma(ng) - _lgamma(ng + 0.5)
    if comparison is BfComparison.ZINB_VS_NB:
        # the printed limit divides by n where the composed ratio has n + 1
        lead = -math.log(n + 1) if mode is Mode.ORACLE_VALIDATED else -math.log(n)
        terms = gammaln(m) - gammaln(m + 0.5)
        return lead + _lgamma(ng + 0.5) - _lgamma(ng) + float(logsumexp(terms))
    if mode is Mode.ORACLE_VALIDATED:
        num = float(logsumexp(gammaln(m) - gammaln(m + 0.5)))
        den = float(logsumexp(-0.5 * np.log(n - j)))
        return 0.5 * lg + num - den
    return -0.5 * lg + float(logsumexp(gammaln(m) + 0.5 * np.log(n - j) - gammaln(m + 0.5)))


def printed_log_bayes_factor(
    sample: CountSample,
    comparison: BfComparison,
    gamma: float = DEFAULT_GAMMA,
) -> float:
    """Evaluate the published composed Bayes factor expression.

    For all-zero samples the published limits are returned (``+inf`` for ZIP
    vs Poisson).
    """
    if not isinstance(sample, CountSample):
        sample = CountSample.of(sample)
    comparison = BfComparison(comparison)
    gamma = float(gamma)
    st = compute_suff_stats(sample)
    n, w, phi, slf = st.n, st.zero_count, st.total, st.sum_log_factorial
    if st.all_zero:
        return all_zero_limit(comparison, n, gamma, Mode.PAPER_LITERAL)
    j = np.arange(w + 1)
    ng = n * gamma
    if comparison is BfComparison.ZIP_VS_POISSON:
        terms = gammaln(n - j + 1.0) - gammaln(w - j + 1.0) - (phi + 0.5) * np.log1p(-j / n)
        return _lgamma(w + 1.0) - _lgamma(n + 2.0) + float(logsumexp(terms))
    if comparison is BfComparison.ZINB_VS_NB:
        m = (n - j) * gamma
        terms = (
            gammaln(n - j + 1.0) + gammaln(m)
            - gammaln(w - j + 1.0) - gammaln(phi + m + 0.5)
        )
        return (
            _lgamma(w + 1.0) + _lgamma(phi + ng + 0.5) - _lgamma(n + 2.0) - _lgamma(ng)
            + float(logsumexp(terms))
        )
    pv = per_value_gamma_sum(sample, gamma)
    head = -0.5 * math.log(gamma) + (ng + 0.5) * pv - (ng - 0.5) * slf
    if comparison is BfComparison.NB_VS_POISSON:
        return head + (phi + 0.5) * math.log(n) + _lgamma(ng) - _lgamma(phi + ng + 0.5)
    m = (n - j) * gamma
    terms = gammaln(m) + (phi + 0.5) * np.log(n - j) - gammaln(phi + m + 0.5)
    return head + float(logsumexp(terms))


def _difference(m1: MarginalResult, m0: MarginalResult) -> float:
    a, b = m1.value, m0.value
    if math.isinf(a) and math.isinf(b) and a == b:
        raise InvalidInputError("both marginals diverge in the same direction")
    return a - b


def log_bayes_factor(
    sample: CountSample,
    comparison: BfComparison,
    gamma: float = DEFAULT_GAMMA,
    mode: Mode = Mode.ORACLE_VALIDATED,
) -> BfResult:
    """Log Bayes factor of M1 against M0 for ``comparison``.

    Returns ``+inf`` for ZIP vs Poisson on an all-zero sample; the other
    comparisons use the finite all-zero convention described in the module
    docstring.
    """
    if not isinstance(sample, CountSample):
        sample = CountSample.of(sample)
    comparison = BfComparison(comparison)
    mode = Mode.coerce(mode)
    fam1, fam0 = comparison.models
    m1 = log_marginal(fam1, sample, gamma, mode)
    m0 = log_marginal(fam0, sample, gamma, mode)
    degenerate = sample.all_zero
    printed = None
    if mode is Mode.PAPER_LITERAL:
        printed = printed_log_bayes_factor(sample, comparison, gamma)
    if degenerate and comparison is BfComparison.ZIP_VS_POISSON:
        value = math.inf
    elif degenerate and mode is Mode.PAPER_LITERAL:
        value = printed
    else:
        value = _difference(m1, m0)
    return BfResult(
        log_bf=value,
        comparison=comparison,
        interpretation=interpret(value),
        degenerate_all_zero=degenerate,
        mode=mode,
        printed_log_bf=printed,
        log_m1=m1.log_marginal,
        log_m0=m0.log_marginal,
    )
