"""Pure numpy/scipy fallback for the compiled kernels."""
import numpy as np
from scipy.special import betaln, digamma, gammaln, logsumexp

BACKEND = "python"


def zip_log_jsum(n, w, phi, jmax):
    if jmax < 0:
        return -np.inf
    j = np.arange(jmax + 1)
    t = gammaln(n - j + 1.0) - gammaln(w - j + 1.0) - (phi + 0.5) * np.log(n - j)
    return float(logsumexp(t))


def zinb_log_jsum(n, w, phi, gamma, jmax):
    if jmax < 0:
        return -np.inf
    j = np.arange(jmax + 1)
    t = gammaln(n - j + 1.0) - gammaln(w - j + 1.0) + betaln(phi + 0.5, (n - j) * gamma)
    return float(logsumexp(t))


def gamma_sums(y, gamma):
    nz = y[y > 0]
    pv = float(np.sum(gammaln(nz + gamma)) - nz.size * gammaln(gamma))
    lf = float(np.sum(gammaln(nz + 1.0)))
    return pv, lf


def poisson_loglik(y, theta):
    return float(np.sum(y * np.log(theta) - gammaln(y + 1.0)) - y.size * theta)


def zip_loglik(y, alpha, theta):
    zeros = y == 0
    zero_term = -theta if alpha == 0.0 else np.log(alpha + (1.0 - alpha) * np.exp(-theta))
    nz = y[~zeros]
    acc = np.sum(np.log1p(-alpha) - theta + nz * np.log(theta) - gammaln(nz + 1.0))
    return float(acc + np.count_nonzero(zeros) * zero_term)


def zinb_loglik(y, alpha, gamma, kappa):
    log_p0 = -gamma * np.log1p(kappa / gamma)
    log_q = -np.log1p(gamma / kappa)
    zeros = y == 0
    zero_term = log_p0 if alpha == 0.0 else np.log(alpha + (1.0 - alpha) * np.exp(log_p0))
    nz = y[~zeros]
    acc = np.sum(
        np.log1p(-alpha) + log_p0 - gammaln(gamma)
        + gammaln(nz + gamma) - gammaln(nz + 1.0) + nz * log_q
    )
    return float(acc + np.count_nonzero(zeros) * zero_term)


def nb_weighted_loglik(y, w, gamma, kappa):
    log_p0 = -gamma * np.log1p(kappa / gamma)
    log_q = -np.log1p(gamma / kappa)
    keep = w != 0.0
    yk, wk = y[keep], w[keep]
    terms = gammaln(yk + gamma) - gammaln(gamma) - gammaln(yk + 1.0) + log_p0 + yk * log_q
    return float(np.sum(wk * terms))


def nb_weighted_score(y, w, gamma, kappa):
    keep = w != 0.0
    yk, wk = y[keep], w[keep]
    dg = np.where(yk > 0, digamma(yk + gamma) - digamma(gamma), 0.0)
    acc = np.sum(wk * dg) + np.sum(wk * (kappa - yk)) / (gamma + kappa)
    return float(acc - np.sum(wk) * np.log1p(kappa / gamma))
