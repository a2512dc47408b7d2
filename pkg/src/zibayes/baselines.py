"""Frequentist comparison methods: MLE fits, AIC, Vuong's test, zero check.

Unlike the Bayesian path, NB-family fits estimate the dispersion ``gamma``.
ZIP and ZINB are fitted by EM over the structural-zero indicator; the
M-step reuses the Poisson/NB estimators on weighted data. SQUAREM
extrapolation speeds up EM, and a bounded quasi-Newton step finishes runs
that stall on the flat likelihood ridges of sparse samples.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np
from scipy import optimize

from . import kernels
from .errors import DegenerateVarianceError, DomainError, FitError, NoSelectionError, NonIdentifiableError
from .stats import (
    CountSample,
    Family,
    ModelParams,
    NBParams,
    PoissonParams,
    ZINBParams,
    ZIPParams,
    log_pmf_array,
)

__all__ = [
    "FitResult",
    "Preference",
    "VuongResult",
    "ZeroInflationCheck",
    "fit",
    "aic_select",
    "vuong_test",
    "zero_inflation_check",
    "GAMMA_BOUNDS",
]

GAMMA_BOUNDS = (1e-8, 1e6)
ALPHA_MAX = 1.0 - 1e-8


@dataclass(frozen=True)
class FitResult:
    """Maximum likelihood fit of one model.

    ``boundary`` marks estimates pinned to a parameter-space edge (no
    inflation, or the Poisson limit of the NB dispersion). ``history`` is the
    EM log-likelihood path for zero-inflated fits.
    """

    family: Family
    params: Optional[ModelParams]
    loglik: float
    k: int
    aic: float
    converged: bool
    iterations: int
    boundary: bool = False
    history: tuple = field(default=(), repr=False)
    message: str = ""

    @classmethod
    def make(cls, family, params, loglik, converged, iterations, **kw):
        k = family.n_params
        return cls(family, params, float(loglik), k, 2.0 * k - 2.0 * float(loglik), converged, iterations, **kw)


def _profile_gamma(y, w, kappa):
    """Maximize the weighted NB likelihood over ``gamma`` at fixed ``kappa``."""
    lo, hi = math.log(GAMMA_BOUNDS[0]), math.log(GAMMA_BOUNDS[1])

    def score(lg):
        return kernels.nb_weighted_score(y, w, math.exp(lg), kappa)

    s_hi = score(hi)
    if s_hi >= 0:
        return GAMMA_BOUNDS[1], True
    s_lo = score(lo)
    if s_lo <= 0:
        return GAMMA_BOUNDS[0], True
    root = optimize.brentq(score, lo, hi, xtol=1e-12, rtol=1e-12)
    return math.exp(root), False


def _fit_poisson(y):
    theta = float(y.mean())
    params = PoissonParams(theta)
    return FitResult.make(Family.POISSON, params, kernels.poisson_loglik(y, theta), True, 0)


def _fit_nb(y):
    w = np.ones(y.size)
    kappa = float(y.mean())
    gamma, boundary = _profile_gamma(y, w, kappa)
    ll = kernels.zinb_loglik(y, 0.0, gamma, kappa)
    msg = "dispersion at the Poisson limit" if boundary else ""
    return FitResult.make(Family.NB, NBParams(gamma, kappa), ll, True, 1, boundary=boundary, message=msg)


def _converged(prev, cur, tol):
    return abs(cur - prev) <= tol * (1.0 + abs(cur))


def _squarem(em_map, loglik, u0, max_iter, tol, bounds):
    """EM iterations accelerated by squared extrapolation (SQUAREM).

    ``em_map`` and ``loglik`` act on an unconstrained parameter vector. An
    extrapolated point is kept only if one EM step from it does not lower the
    likelihood below the plain two-step EM result, so the recorded
    log-likelihood path never decreases. Extrapolated points are clipped to
    ``bounds`` (a pair of arrays).
    """
    lo, hi = (np.asarray(b, dtype=float) for b in bounds)
    u = np.asarray(u0, dtype=float)
    ll = loglik(u)
    history = [ll]
    evals = 0
    while evals < max_iter:
        u1 = em_map(u)
        u2 = em_map(u1)
        evals += 2
        best, best_ll = u2, loglik(u2)
        if best_ll < ll:
            # EM cannot ascend further: numerically at a fixed point
            return u, ll, True, evals, history
        r = u1 - u
        v = u2 - u1 - r
        nv = float(np.linalg.norm(v))
        if nv > 0 and evals < max_iter:
            step = min(-float(np.linalg.norm(r)) / nv, -1.0)
            cand = em_map(np.clip(u - 2.0 * step * r + step * step * v, lo, hi))
            evals += 1
            cand_ll = loglik(cand)
            if np.all(np.isfinite(cand)) and cand_ll >= best_ll:
                best, best_ll = cand, cand_ll
        history.append(best_ll)
        if _converged(ll, best_ll, tol):
            return best, best_ll, True, evals, history
        u, ll = best, best_ll
    return u, ll, False, evals, history


def _polish(loglik, u, bounds, tol):
    """Quasi-Newton finish for EM runs that stall on a flat ridge."""
    lo, hi = bounds
    res = optimize.minimize(
        lambda v: -loglik(v), u, method="L-BFGS-B", bounds=list(zip(lo, hi)),
        options={"ftol": tol, "maxiter": 500},
    )
    return res.x, -float(res.fun), bool(res.success)


def _fit_em(em_map, loglik, u0, max_iter, tol, bounds):
    u, ll, conv, it, hist = _squarem(em_map, loglik, u0, max_iter, tol, bounds)
    if not conv:
        v, v_ll, ok = _polish(loglik, u, bounds, tol)
        if v_ll >= ll:
            u, ll = v, v_ll
            hist.append(ll)
        conv = ok
    return u, ll, conv, it, hist


def _logit(a):
    return math.log(a) - math.log1p(-a)


def _expit(x):
    return 1.0 / (1.0 + math.exp(-x)) if x >= 0 else math.exp(x) / (1.0 + math.exp(x))


def _clamp_alpha(a):
    return min(max(a, 1e-300), ALPHA_MAX)


def _fit_zip(y, max_iter, tol):
    n = y.size
    w = int(np.count_nonzero(y == 0))
    phi = float(y.sum())
    ybar = phi / n
    if w == 0:
        ll = kernels.poisson_loglik(y, ybar)
        return 0.0, ybar, ll, True, 1, [ll]
    alpha = min(max((w / n - math.exp(-ybar)) / max(1.0 - math.exp(-ybar), 1e-12), 0.05), 0.9)

    def unpack(u):
        return _clamp_alpha(_expit(u[0])), math.exp(u[1])

    def em_map(u):
        a, theta = unpack(u)
        tau = a / (a + (1.0 - a) * math.exp(-theta))
        s = tau * w
        return np.array([_logit(_clamp_alpha(s / n)), math.log(phi / (n - s))])

    def loglik(u):
        return kernels.zip_loglik(y, *unpack(u))

    u0 = [_logit(alpha), math.log(ybar / (1.0 - alpha))]
    bounds = ([-700.0, -700.0], [_logit(ALPHA_MAX), 700.0])
    u, ll, conv, it, hist = _fit_em(em_map, loglik, u0, max_iter, tol, bounds)
    alpha, theta = unpack(u)
    return alpha, theta, ll, conv, it, hist


def _fit_zinb(y, max_iter, tol, base):
    n = y.size
    zeros = y == 0
    w = int(zeros.sum())
    gamma, kappa = base.params.gamma, base.params.kappa
    if w == 0:
        return 0.0, gamma, kappa, base.loglik, True, 1, [base.loglik]
    p0 = math.exp(-gamma * math.log1p(kappa / gamma))
    alpha = min(max((w / n - p0) / max(1.0 - p0, 1e-12), 0.05), 0.9)
    weights = np.ones(n)

    def unpack(u):
        return _clamp_alpha(_expit(u[0])), math.exp(u[1]), math.exp(u[2])

    def em_map(u):
        a, g, k = unpack(u)
        p0 = math.exp(-g * math.log1p(k / g))
        tau = a / (a + (1.0 - a) * p0)
        weights[zeros] = 1.0 - tau
        k_new = float(np.dot(weights, y) / weights.sum())
        g_new, _ = _profile_gamma(y, weights, k_new)
        return np.array([_logit(_clamp_alpha(tau * w / n)), math.log(g_new), math.log(k_new)])

    def loglik(u):
        return kernels.zinb_loglik(y, *unpack(u))

    u0 = [_logit(alpha), math.log(gamma), math.log(kappa)]
    lg = [math.log(b) for b in GAMMA_BOUNDS]
    bounds = ([-700.0, lg[0], -700.0], [_logit(ALPHA_MAX), lg[1], 700.0])
    u, ll, conv, it, hist = _fit_em(em_map, loglik, u0, max_iter, tol, bounds)
    alpha, gamma, kappa = unpack(u)
    return alpha, gamma, kappa, ll, conv, it, hist


def fit(family: Family, sample: CountSample, max_iter: int = 500, tol: float = 1e-8) -> FitResult:
    """Maximum likelihood fit of ``family`` to ``sample``.

    Raises
    ------
    NonIdentifiableError
        If every count is zero (the rate estimate sits at 0, outside the
        parameter space).
    """
    family = Family(family)
    if not isinstance(sample, CountSample):
        sample = CountSample.of(sample)
    if sample.all_zero:
        raise NonIdentifiableError(f"{family.label} is not identifiable from an all-zero sample")
    if max_iter < 1 or not tol > 0:
        raise DomainError("max_iter must be positive and tol > 0")
    y = sample.values
    if family is Family.POISSON:
        return _fit_poisson(y)
    if family is Family.NB:
        return _fit_nb(y)
    if family is Family.ZIP:
        alpha, theta, ll, conv, it, hist = _fit_zip(y, max_iter, tol)
        base = _fit_poisson(y)
        if ll < base.loglik:
            hist.append(base.loglik)
            return FitResult.make(
                Family.ZIP, ZIPParams(0.0, base.params.theta), base.loglik, True, it,
                boundary=True, history=tuple(hist), message="no inflation",
            )
        msg = "" if conv else f"EM did not converge in {max_iter} iterations"
        return FitResult.make(
            Family.ZIP, ZIPParams(alpha, theta), ll, conv, it,
            boundary=alpha <= 0.0 or alpha >= ALPHA_MAX, history=tuple(hist), message=msg,
        )
    base = _fit_nb(y)
    alpha, gamma, kappa, ll, conv, it, hist = _fit_zinb(y, max_iter, tol, base)
    # ZIP is the gamma -> inf edge of ZINB; EM only creeps towards it
    zip_alpha, zip_theta, _, zip_conv, _, _ = _fit_zip(y, max_iter, tol)
    edge_ll = kernels.zinb_loglik(y, zip_alpha, GAMMA_BOUNDS[1], zip_theta)
    if zip_conv and edge_ll > ll and edge_ll >= base.loglik:
        hist.append(edge_ll)
        return FitResult.make(
            Family.ZINB, ZINBParams(zip_alpha, GAMMA_BOUNDS[1], zip_theta), edge_ll, True, it,
            boundary=True, history=tuple(hist), message="dispersion at the Poisson limit",
        )
    if ll < base.loglik:
        hist.append(base.loglik)
        return FitResult.make(
            Family.ZINB, ZINBParams(0.0, base.params.gamma, base.params.kappa), base.loglik, True, it,
            boundary=True, history=tuple(hist), message="no inflation",
        )
    msg = "" if conv else f"EM did not converge in {max_iter} iterations"
    return FitResult.make(
        Family.ZINB, ZINBParams(alpha, gamma, kappa), ll, conv, it,
        boundary=alpha <= 0.0 or alpha >= ALPHA_MAX or gamma in GAMMA_BOUNDS,
        history=tuple(hist), message=msg,
    )


def aic_select(fits: Iterable[FitResult]) -> Family:
    """Family with the smallest AIC among converged fits; ties go to fewer parameters."""
    ok = [f for f in fits if f is not None and f.converged]
    if not ok:
        raise NoSelectionError("no converged fit to select from")
    return min(ok, key=lambda f: (f.aic, f.k)).family


class Preference(str, enum.Enum):
    MODEL1 = "model1"
    MODEL0 = "model0"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class VuongResult:
    z: float
    n_effective: int
    preferred: Preference


def vuong_test(
    fit1: FitResult,
    fit0: FitResult,
    sample: CountSample,
    critical: float = 1.96,
    correction: Optional[str] = None,
) -> VuongResult:
    """Vuong's z statistic from pointwise log-likelihood ratios.

    ``correction`` may be ``"aic"`` or ``"bic"`` to penalize the parameter
    count difference; the default is the uncorrected statistic.

    Raises
    ------
    DegenerateVarianceError
        If the two fitted models agree at every observation.
    """
    if not isinstance(sample, CountSample):
        sample = CountSample.of(sample)
    if fit1.params is None or fit0.params is None:
        raise FitError("both fits need parameter estimates")
    y = sample.values
    m = log_pmf_array(fit1.params, y) - log_pmf_array(fit0.params, y)
    n = y.size
    sd = float(np.sqrt(np.mean((m - m.mean()) ** 2)))
    scale = max(1.0, float(np.max(np.abs(m))))
    if sd <= 1e-12 * scale:
        raise DegenerateVarianceError("pointwise log-likelihood ratios have zero variance")
    total = math.fsum(m)
    dk = fit1.k - fit0.k
    if correction == "aic":
        total -= dk
    elif correction == "bic":
        total -= 0.5 * dk * math.log(n)
    elif correction is not None:
        raise DomainError(f"unknown correction {correction!r}")
    z = total / (math.sqrt(n) * sd)
    if z > critical:
        pref = Preference.MODEL1
    elif z < -critical:
        pref = Preference.MODEL0
    else:
        pref = Preference.INDETERMINATE
    return VuongResult(z, n, pref)


@dataclass(frozen=True)
class ZeroInflationCheck:
    ratio: float
    inflated: bool
    observed_zeros: int
    expected_zeros: float


def zero_inflation_check(sample: CountSample, tol: float = 0.05) -> ZeroInflationCheck:
    """Observed zeros relative to the fitted Poisson expectation ``n exp(-ybar)``."""
    if not isinstance(sample, CountSample):
        sample = CountSample.of(sample)
    expected = sample.n * math.exp(-sample.total / sample.n)
    observed = sample.zero_count
    ratio = observed / expected
    return ZeroInflationCheck(ratio, ratio > 1.0 + tol, observed, expected)
