"""Jeffreys priors for the four count models.

Includes the zero-truncated NB Fisher information behind the orthogonal ZINB
prior. The published closed forms for that information and for the truncated
mean do not survive a summation check; ``Mode.ORACLE_VALIDATED`` (default)
returns the re-derived expressions and ``Mode.PAPER_LITERAL`` the printed ones.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError, RadicandError
from .modes import DEFAULT_GAMMA, Mode
from .stats import Family

__all__ = [
    "PriorVariant",
    "PriorSpec",
    "poisson_prior_logdensity",
    "nb_prior_logdensity",
    "zip_c1",
    "zinb_c2",
    "c2_radicand",
    "truncated_nb_fisher_info",
    "truncated_nb_mean",
    "truncated_poisson_fisher_info",
]


def _pos(name, v):
    v = float(v)
    if not (v > 0 and math.isfinite(v)):
        raise DomainError(f"{name} must be positive and finite, got {v!r}")
    return v


def _p0_q(kappa, gamma):
    """NB zero mass ``(1 + kappa/gamma)**-gamma`` and its complement."""
    log_p0 = -gamma * math.log1p(kappa / gamma)
    return math.exp(log_p0), -math.expm1(log_p0)


class PriorVariant(str, enum.Enum):
    SIMPLE = "simple"
    ORTHOGONAL_TRUNCATED = "orthogonal-truncated"


@dataclass(frozen=True)
class PriorSpec:
    """Which Jeffreys prior to place on the base rate/mean parameter.

    ``variant`` only matters for the NB family. The uniform prior on the
    inflation probability is implied for ZIP/ZINB.
    """

    family: Family
    gamma_fixed: float = DEFAULT_GAMMA
    variant: PriorVariant = PriorVariant.SIMPLE

    def __post_init__(self):
        _pos("gamma_fixed", self.gamma_fixed)
        if (
            self.variant is PriorVariant.ORTHOGONAL_TRUNCATED
            and self.family not in (Family.NB, Family.ZINB)
        ):
            raise DomainError("the orthogonal-truncated variant applies to NB-family models")

    def logdensity(self, value: float) -> float:
        """Log prior density (up to the usual improper constant)."""
        if self.family in (Family.POISSON, Family.ZIP):
            return poisson_prior_logdensity(value)
        base = nb_prior_logdensity(value, self.gamma_fixed)
        if self.variant is PriorVariant.SIMPLE:
            return base
        return base + math.log(zinb_c2(value, self.gamma_fixed))


def poisson_prior_logdensity(theta: float) -> float:
    """``log(1/sqrt(theta))``."""
    return -0.5 * math.log(_pos("theta", theta))


def nb_prior_logdensity(kappa: float, gamma: float) -> float:
    """``log sqrt(gamma / (kappa (gamma + kappa)))``."""
    kappa = _pos("kappa", kappa)
    gamma = _pos("gamma", gamma)
    return 0.5 * (math.log(gamma) - math.log(kappa) - math.log(gamma + kappa))


def _one_minus_one_plus_x_exp(theta):
    # 1 - (1 + theta) e^{-theta}; series below 0.1 avoids cancellation.
    if theta >= 0.1:
        return -math.expm1(-theta) - theta * math.exp(-theta)
    acc, term, k = 0.0, theta, 1
    while True:
        k += 1
        term *= -theta / k
        inc = -(k - 1) * term
        acc += inc
        if abs(inc) < 1e-18 * abs(acc) or k > 60:
            return acc


def zip_c1(theta: float) -> float:
    """Orthogonal ZIP prior factor ``sqrt(1 - (1+theta)e^-theta) / (1 - e^-theta)``.

    Tends to ``1/sqrt(2)`` as ``theta -> 0`` and to 1 as ``theta -> inf``.
    """
    theta = _pos("theta", theta)
    return math.sqrt(_one_minus_one_plus_x_exp(theta)) / -math.expm1(-theta)


def truncated_poisson_fisher_info(theta: float) -> float:
    """Fisher information of the zero-truncated Poisson, ``c1(theta)**2 / theta``."""
    return zip_c1(theta) ** 2 / _pos("theta", theta)


def truncated_nb_fisher_info(kappa: float, gamma: float, mode: Mode = Mode.ORACLE_VALIDATED) -> float:
    """Fisher information for ``kappa`` in the zero-truncated NB at fixed ``gamma``.

    Oracle-validated::

        I = gamma/(kappa+gamma)^2 * [(2 kappa + gamma)/(kappa q) - 1
                                     - (gamma+1) p0/q - gamma p0^2/q^2]

    with ``p0 = (1+kappa/gamma)^-gamma`` and ``q = 1 - p0``. The literal mode
    returns the published display, which can be negative.
    """
    kappa = _pos("kappa", kappa)
    gamma = _pos("gamma", gamma)
    mode = Mode.coerce(mode)
    p0, q = _p0_q(kappa, gamma)
    s = kappa + gamma
    if mode is Mode.ORACLE_VALIDATED:
        bracket = (2.0 * kappa + gamma) / (kappa * q) - 1.0 - (gamma + 1.0) * p0 / q - gamma * (p0 / q) ** 2
        return gamma / s**2 * bracket
    p2 = math.exp(-(2.0 + gamma) * math.log1p(kappa / gamma))
    return (
        (gamma / kappa) ** 3 / (s * q) * (2.0 - 1.0 / (s * q))
        - gamma / s**2
        + p2 / q * ((1.0 + gamma) / gamma + 1.0 / q)
    )


def c2_radicand(kappa: float, gamma: float, mode: Mode = Mode.ORACLE_VALIDATED) -> float:
    """The quantity under the square root of the orthogonal ZINB factor."""
    kappa = _pos("kappa", kappa)
    gamma = _pos("gamma", gamma)
    mode = Mode.coerce(mode)
    if mode is Mode.ORACLE_VALIDATED:
        return truncated_nb_fisher_info(kappa, gamma, mode) * kappa * (kappa + gamma) / gamma
    p0, q = _p0_q(kappa, gamma)
    s = kappa + gamma
    p2 = math.exp(-(2.0 + gamma) * math.log1p(kappa / gamma))
    return (
        gamma**2 / (kappa**2 * q) * (2.0 - (1.0 / s) / q)
        - kappa / s
        + kappa * s * p2 / (gamma * q) * (1.0 + 1.0 / gamma + 1.0 / q)
    )


def zinb_c2(kappa: float, gamma: float, mode: Mode = Mode.ORACLE_VALIDATED) -> float:
    """Orthogonal ZINB prior factor: ``sqrt(I(kappa) kappa (kappa+gamma) / gamma)``.

    Raises
    ------
    RadicandError
        If the radicand is negative (happens for the printed form).
    """
    r = c2_radicand(kappa, gamma, mode)
    if r < 0:
        raise RadicandError(
            f"negative radicand {r:.6g} at kappa={kappa}, gamma={gamma} ({Mode.coerce(mode).value})",
            radicand=r,
            kappa=kappa,
            gamma=gamma,
        )
    return math.sqrt(r)


def truncated_nb_mean(kappa: float, gamma: float, mode: Mode = Mode.ORACLE_VALIDATED) -> float:
    """Mean of the zero-truncated NB: ``kappa / (1 - p0)``.

    The literal mode returns the published ``gamma^2 / (kappa (1 - p0))``,
    which only coincides with the true mean when ``kappa == gamma``.
    """
    kappa = _pos("kappa", kappa)
    gamma = _pos("gamma", gamma)
    _, q = _p0_q(kappa, gamma)
    if Mode.coerce(mode) is Mode.ORACLE_VALIDATED:
        return kappa / q
    return gamma**2 / (kappa * q)
