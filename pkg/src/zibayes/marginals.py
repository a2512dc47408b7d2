"""Log marginal likelihoods under the Jeffreys priors.

Poisson and NB use ``pi(theta) = theta^-1/2`` and
``pi(kappa) = sqrt(gamma / (kappa (gamma + kappa)))``; the zero-inflated
models add a uniform prior on the inflation probability. Integrating the
inflation weight out expands ``[alpha + (1 - alpha) p0]^w`` binomially, which
is where the sums over ``j = 0..w`` come from.

For an all-zero sample the ``j = n`` term of the ZIP/ZINB sums is an
improper integral of the prior alone and diverges. Those marginals are
reported as ``+inf``; ``finite_part`` keeps the sum over ``j < n`` so that
the Bayes factor module can form the finite limits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from . import kernels
from .errors import DomainError
from .modes import DEFAULT_GAMMA, Mode
from .special import log_beta
from .stats import CountSample, Family, SufficientStats, compute_suff_stats, per_value_gamma_sum

__all__ = [
    "MarginalResult",
    "log_marginal_poisson",
    "log_marginal_zip",
    "log_marginal_nb",
    "log_marginal_zinb",
    "log_marginal",
]


@dataclass(frozen=True)
class MarginalResult:
    log_marginal: float
    family: Family
    mode: Mode
    degenerate_all_zero: bool = False
    finite_part: Optional[float] = None

    def __post_init__(self):
        if self.log_marginal == math.inf and self.family not in (Family.ZIP, Family.ZINB):
            raise ValueError("+inf marginal is only possible for zero-inflated models")

    @property
    def value(self) -> float:
        """Finite part for a degenerate marginal, otherwise the log marginal."""
        return self.finite_part if self.degenerate_all_zero and self.finite_part is not None else self.log_marginal


def _check_gamma(gamma):
    gamma = float(gamma)
    if not (gamma > 0 and math.isfinite(gamma)):
        raise DomainError(f"gamma must be positive, got {gamma!r}")
    return gamma


def log_marginal_poisson(stats: SufficientStats) -> MarginalResult:
    """``log Gamma(phi + 1/2) - (phi + 1/2) log n - sum log y!``."""
    phi = stats.total
    value = math.lgamma(phi + 0.5) - (phi + 0.5) * math.log(stats.n) - stats.sum_log_factorial
    return MarginalResult(value, Family.POISSON, Mode.ORACLE_VALIDATED, stats.all_zero)


def log_marginal_zip(stats: SufficientStats) -> MarginalResult:
    n, w, phi = stats.n, stats.zero_count, stats.total
    head = (
        math.lgamma(w + 1.0) - math.lgamma(n + 2.0)
        + math.lgamma(phi + 0.5) - stats.sum_log_factorial
    )
    if stats.all_zero:
        finite = head + kernels.zip_log_jsum(n, w, float(phi), n - 1)
        return MarginalResult(math.inf, Family.ZIP, Mode.ORACLE_VALIDATED, True, finite)
    value = head + kernels.zip_log_jsum(n, w, float(phi), w)
    return MarginalResult(value, Family.ZIP, Mode.ORACLE_VALIDATED, False)


def _nb_prefactor(stats, per_value_gamma, gamma, mode):
    # log of the constant in front of the beta functions
    log_prod = per_value_gamma - stats.sum_log_factorial
    if mode is Mode.ORACLE_VALIDATED:
        return 0.5 * math.log(gamma) + log_prod
    return -0.5 * math.log(gamma) + (stats.n * gamma + 0.5) * log_prod


def log_marginal_nb(
    stats: SufficientStats,
    per_value_gamma: float,
    gamma: float = DEFAULT_GAMMA,
    mode: Mode = Mode.ORACLE_VALIDATED,
) -> MarginalResult:
    """NB log marginal with fixed dispersion ``gamma``.

    Oracle-validated form: ``sqrt(gamma) prod[...] B(phi + 1/2, n gamma)``.
    The literal form raises the product to ``n gamma + 1/2`` and divides by
    ``sqrt(gamma)`` instead.
    """
    gamma = _check_gamma(gamma)
    mode = Mode.coerce(mode)
    value = _nb_prefactor(stats, per_value_gamma, gamma, mode) + log_beta(stats.total + 0.5, stats.n * gamma)
    return MarginalResult(value, Family.NB, mode, stats.all_zero)


def log_marginal_zinb(
    stats: SufficientStats,
    per_value_gamma: float,
    gamma: float = DEFAULT_GAMMA,
    mode: Mode = Mode.ORACLE_VALIDATED,
) -> MarginalResult:
    gamma = _check_gamma(gamma)
    mode = Mode.coerce(mode)
    n, w, phi = stats.n, stats.zero_count, stats.total
    head = (
        _nb_prefactor(stats, per_value_gamma, gamma, mode)
        + math.lgamma(w + 1.0) - math.lgamma(n + 2.0)
    )
    if stats.all_zero:
        finite = head + kernels.zinb_log_jsum(n, w, float(phi), gamma, n - 1)
        return MarginalResult(math.inf, Family.ZINB, mode, True, finite)
    value = head + kernels.zinb_log_jsum(n, w, float(phi), gamma, w)
    return MarginalResult(value, Family.ZINB, mode, False)


def log_marginal(
    family: Family,
    sample: CountSample,
    gamma: float = DEFAULT_GAMMA,
    mode: Mode = Mode.ORACLE_VALIDATED,
) -> MarginalResult:
    """Dispatch on ``family`` starting from a raw sample."""
    if not isinstance(sample, CountSample):
        sample = CountSample.of(sample)
    family = Family(family)
    stats = compute_suff_stats(sample)
    if family is Family.POISSON:
        return log_marginal_poisson(stats)
    if family is Family.ZIP:
        return log_marginal_zip(stats)
    pv = per_value_gamma_sum(sample, gamma)
    if family is Family.NB:
        return log_marginal_nb(stats, pv, gamma, mode)
    return log_marginal_zinb(stats, pv, gamma, mode)
