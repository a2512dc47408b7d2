"""Count samples, sufficient statistics, model parameters and likelihoods.

The four families share one parameterization convention:

* Poisson: mean ``theta``.
* NB: dispersion ``gamma`` and mean ``kappa``; variance ``kappa + kappa**2/gamma``.
* ZIP: inflation ``alpha`` in [0, 1) mixed with Poisson(``theta``).
* ZINB: inflation ``alpha`` in [0, 1) mixed with NB(``gamma``, ``kappa``).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from . import kernels
from .errors import DomainError, InvalidInputError

__all__ = [
    "Family",
    "CountSample",
    "SufficientStats",
    "PoissonParams",
    "NBParams",
    "ZIPParams",
    "ZINBParams",
    "ModelParams",
    "compute_suff_stats",
    "per_value_gamma_sum",
    "log_pmf",
    "log_pmf_array",
    "log_likelihood",
    "log_likelihood_from_stats",
]


class Family(str, enum.Enum):
    POISSON = "poisson"
    NB = "nb"
    ZIP = "zip"
    ZINB = "zinb"

    @property
    def n_params(self) -> int:
        return {"poisson": 1, "nb": 2, "zip": 2, "zinb": 3}[self.value]

    @property
    def is_zero_inflated(self) -> bool:
        return self in (Family.ZIP, Family.ZINB)

    @property
    def label(self) -> str:
        return {"poisson": "Pois", "nb": "NB", "zip": "ZIP", "zinb": "ZINB"}[self.value]


@dataclass(frozen=True, eq=False)
class CountSample:
    """An ordered, immutable vector of non-negative integer counts."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values)
        if arr.ndim != 1:
            raise InvalidInputError("counts must be one-dimensional")
        if arr.size == 0:
            raise InvalidInputError("count sample must contain at least one value")
        if arr.dtype.kind == "f":
            if not np.all(np.isfinite(arr)) or np.any(arr != np.floor(arr)):
                raise InvalidInputError("counts must be integers")
        elif arr.dtype.kind not in "iub":
            raise InvalidInputError(f"counts must be integers, got dtype {arr.dtype}")
        arr = np.ascontiguousarray(arr, dtype=np.int64)
        if np.any(arr < 0):
            raise InvalidInputError("counts must be non-negative")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @classmethod
    def of(cls, counts: Iterable[int]) -> "CountSample":
        return cls(np.fromiter((int(c) for c in counts), dtype=np.int64))

    def __len__(self) -> int:
        return int(self.values.size)

    def __iter__(self):
        return iter(self.values.tolist())

    def __eq__(self, other):
        if not isinstance(other, CountSample):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())

    def __repr__(self):
        return f"CountSample(n={len(self)}, zeros={self.zero_count})"

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def zero_count(self) -> int:
        return int(np.count_nonzero(self.values == 0))

    @property
    def total(self) -> int:
        return int(self.values.sum())

    @property
    def all_zero(self) -> bool:
        return self.total == 0


@dataclass(frozen=True)
class SufficientStats:
    """Reduced statistics: size, zero count, total count and sum of log y!."""

    n: int
    zero_count: int
    total: int
    sum_log_factorial: float

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInputError("n must be positive")
        if not 0 <= self.zero_count <= self.n:
            raise InvalidInputError("zero_count must lie in [0, n]")
        if self.total < self.n - self.zero_count:
            raise InvalidInputError("each nonzero count contributes at least 1 to the total")
        if (self.zero_count == self.n) != (self.total == 0):
            raise InvalidInputError("zero_count == n must coincide with total == 0")
        if self.sum_log_factorial < 0:
            raise InvalidInputError("sum_log_factorial must be non-negative")

    @property
    def all_zero(self) -> bool:
        return self.zero_count == self.n


def compute_suff_stats(sample: CountSample) -> SufficientStats:
    """Reduce a sample to ``(n, zero_count, total, sum log y!)``."""
    if not isinstance(sample, CountSample):
        sample = CountSample.of(sample)
    _, slf = kernels.gamma_sums(sample.values, 1.0)
    return SufficientStats(
        n=sample.n,
        zero_count=sample.zero_count,
        total=sample.total,
        sum_log_factorial=slf,
    )


def per_value_gamma_sum(sample: CountSample, gamma: float) -> float:
    """``sum_i [log Gamma(y_i + gamma) - log Gamma(gamma)]``."""
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma!r}")
    pv, _ = kernels.gamma_sums(sample.values, float(gamma))
    return pv


def _positive(name, value):
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be a positive finite number, got {value!r}")
    return value


def _inflation(value):
    value = float(value)
    if not 0.0 <= value < 1.0:
        raise DomainError(f"inflation probability must lie in [0, 1), got {value!r}")
    return value


def _log_nb_p0(gamma, kappa):
    return -gamma * math.log1p(kappa / gamma)


@dataclass(frozen=True)
class PoissonParams:
    theta: float

    family = Family.POISSON

    def __post_init__(self):
        object.__setattr__(self, "theta", _positive("theta", self.theta))

    def mean(self):
        return self.theta

    def variance(self):
        return self.theta

    def zero_mass(self):
        return math.exp(-self.theta)


@dataclass(frozen=True)
class NBParams:
    gamma: float
    kappa: float

    family = Family.NB

    def __post_init__(self):
        object.__setattr__(self, "gamma", _positive("gamma", self.gamma))
        object.__setattr__(self, "kappa", _positive("kappa", self.kappa))

    def mean(self):
        return self.kappa

    def variance(self):
        return self.kappa + self.kappa**2 / self.gamma

    def zero_mass(self):
        return math.exp(_log_nb_p0(self.gamma, self.kappa))


@dataclass(frozen=True)
class ZIPParams:
    alpha: float
    theta: float

    family = Family.ZIP

    def __post_init__(self):
        object.__setattr__(self, "alpha", _inflation(self.alpha))
        object.__setattr__(self, "theta", _positive("theta", self.theta))

    def mean(self):
        return (1.0 - self.alpha) * self.theta

    def variance(self):
        return (1.0 - self.alpha) * self.theta * (1.0 + self.alpha * self.theta)

    def zero_mass(self):
        return self.alpha + (1.0 - self.alpha) * math.exp(-self.theta)


@dataclass(frozen=True)
class ZINBParams:
    alpha: float
    gamma: float
    kappa: float

    family = Family.ZINB

    def __post_init__(self):
        object.__setattr__(self, "alpha", _inflation(self.alpha))
        object.__setattr__(self, "gamma", _positive("gamma", self.gamma))
        object.__setattr__(self, "kappa", _positive("kappa", self.kappa))

    def mean(self):
        return (1.0 - self.alpha) * self.kappa

    def variance(self):
        a, k = self.alpha, self.kappa
        return (1.0 - a) * k * (1.0 + a * k + k / self.gamma)

    def zero_mass(self):
        return self.alpha + (1.0 - self.alpha) * math.exp(_log_nb_p0(self.gamma, self.kappa))


ModelParams = Union[PoissonParams, NBParams, ZIPParams, ZINBParams]


def _check_params(params):
    if not isinstance(params, (PoissonParams, NBParams, ZIPParams, ZINBParams)):
        raise DomainError(f"unknown parameter object {params!r}")


def log_pmf(params: ModelParams, y: int) -> float:
    """Log probability of a single count under ``params``."""
    _check_params(params)
    if int(y) != y or y < 0:
        raise DomainError(f"count must be a non-negative integer, got {y!r}")
    return float(log_pmf_array(params, np.array([int(y)], dtype=np.int64))[0])


def log_pmf_array(params: ModelParams, y: np.ndarray) -> np.ndarray:
    """Vectorized log pmf over an integer array."""
    from scipy.special import gammaln

    _check_params(params)
    y = np.asarray(y, dtype=np.int64)
    if isinstance(params, (PoissonParams, ZIPParams)):
        theta = params.theta
        base = y * math.log(theta) - theta - gammaln(y + 1.0)
        if isinstance(params, PoissonParams) or params.alpha == 0.0:
            return base
        a = params.alpha
        return np.where(
            y == 0,
            math.log(a + (1.0 - a) * math.exp(-theta)),
            math.log1p(-a) + base,
        )
    gamma, kappa = params.gamma, params.kappa
    log_p0 = _log_nb_p0(gamma, kappa)
    base = (
        gammaln(y + gamma) - gammaln(gamma) - gammaln(y + 1.0)
        + log_p0 - y * math.log1p(gamma / kappa)
    )
    if isinstance(params, NBParams) or params.alpha == 0.0:
        return base
    a = params.alpha
    return np.where(
        y == 0,
        math.log(a + (1.0 - a) * math.exp(log_p0)),
        math.log1p(-a) + base,
    )


def log_likelihood(params: ModelParams, sample: CountSample) -> float:
    """Joint log likelihood ``sum_i log f(y_i | params)``."""
    _check_params(params)
    if not isinstance(sample, CountSample):
        sample = CountSample.of(sample)
    y = sample.values
    if isinstance(params, PoissonParams):
        return kernels.poisson_loglik(y, params.theta)
    if isinstance(params, ZIPParams):
        return kernels.zip_loglik(y, params.alpha, params.theta)
    if isinstance(params, NBParams):
        return kernels.zinb_loglik(y, 0.0, params.gamma, params.kappa)
    return kernels.zinb_loglik(y, params.alpha, params.gamma, params.kappa)


def log_likelihood_from_stats(
    params: ModelParams,
    stats: SufficientStats,
    per_value_gamma: float | None = None,
) -> float:
    """Joint log likelihood rebuilt from reduced statistics.

    NB-family models additionally need ``per_value_gamma``, the sum
    ``sum_i [log Gamma(y_i + gamma) - log Gamma(gamma)]`` at ``params.gamma``.
    """
    _check_params(params)
    n, w, phi = stats.n, stats.zero_count, stats.total
    slf = stats.sum_log_factorial
    nz = n - w

    def xlogy(x, v):
        return 0.0 if x == 0 else x * math.log(v)

    if isinstance(params, PoissonParams):
        return xlogy(phi, params.theta) - n * params.theta - slf
    if isinstance(params, ZIPParams):
        a, theta = params.alpha, params.theta
        zero = math.log(a + (1.0 - a) * math.exp(-theta)) if a else -theta
        return (
            w * zero + xlogy(nz, 1.0 - a) - nz * theta + xlogy(phi, theta) - slf
        )
    if per_value_gamma is None:
        raise InvalidInputError("NB-family likelihood needs the per-value gamma sum")
    gamma, kappa = params.gamma, params.kappa
    log_p0 = _log_nb_p0(gamma, kappa)
    tail = nz * log_p0 - phi * math.log1p(gamma / kappa) + per_value_gamma - slf
    if isinstance(params, NBParams) or params.alpha == 0.0:
        return w * log_p0 + tail
    a = params.alpha
    return w * math.log(a + (1.0 - a) * math.exp(log_p0)) + nz * math.log1p(-a) + tail
