# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Signatures mirror ``zibayes._kernels_py`` exactly."""
from libc.math cimport lgamma, log, log1p, exp, INFINITY
from libc.stdint cimport int64_t
from libc.stdlib cimport malloc, free
from scipy.special.cython_special cimport psi

BACKEND = "cython"


cdef inline double _lbeta(double a, double b) noexcept nogil:
    return lgamma(a) + lgamma(b) - lgamma(a + b)


cdef double _lse(double* t, Py_ssize_t m) noexcept nogil:
    cdef Py_ssize_t i
    cdef double top = -INFINITY, acc = 0.0
    for i in range(m):
        if t[i] > top:
            top = t[i]
    if top == -INFINITY or top == INFINITY:
        return top
    for i in range(m):
        acc += exp(t[i] - top)
    return top + log(acc)


def zip_log_jsum(int64_t n, int64_t w, double phi, int64_t jmax):
    cdef Py_ssize_t j, m = jmax + 1
    cdef double out
    cdef double* t
    if m <= 0:
        return -INFINITY
    t = <double*> malloc(m * sizeof(double))
    if t == NULL:
        raise MemoryError()
    with nogil:
        for j in range(m):
            t[j] = (lgamma(n - j + 1.0) - lgamma(w - j + 1.0)
                    - (phi + 0.5) * log(<double>(n - j)))
        out = _lse(t, m)
    free(t)
    return out


def zinb_log_jsum(int64_t n, int64_t w, double phi, double gamma, int64_t jmax):
    cdef Py_ssize_t j, m = jmax + 1
    cdef double out
    cdef double* t
    if m <= 0:
        return -INFINITY
    t = <double*> malloc(m * sizeof(double))
    if t == NULL:
        raise MemoryError()
    with nogil:
        for j in range(m):
            t[j] = (lgamma(n - j + 1.0) - lgamma(w - j + 1.0)
                    + _lbeta(phi + 0.5, (n - j) * gamma))
        out = _lse(t, m)
    free(t)
    return out


def gamma_sums(const int64_t[::1] y, double gamma):
    cdef Py_ssize_t i, n = y.shape[0]
    cdef double lg = lgamma(gamma), pv = 0.0, lf = 0.0
    with nogil:
        for i in range(n):
            if y[i] > 0:
                pv += lgamma(y[i] + gamma) - lg
                lf += lgamma(y[i] + 1.0)
    return pv, lf


def poisson_loglik(const int64_t[::1] y, double theta):
    cdef Py_ssize_t i, n = y.shape[0]
    cdef double acc = 0.0, lt = log(theta)
    with nogil:
        for i in range(n):
            acc += y[i] * lt - lgamma(y[i] + 1.0)
    return acc - n * theta


def zip_loglik(const int64_t[::1] y, double alpha, double theta):
    cdef Py_ssize_t i, n = y.shape[0]
    cdef double acc = 0.0, lt = log(theta), zero_term, nz_shift
    if alpha == 0.0:
        zero_term = -theta
    else:
        zero_term = log(alpha + (1.0 - alpha) * exp(-theta))
    nz_shift = log1p(-alpha) - theta
    with nogil:
        for i in range(n):
            if y[i] == 0:
                acc += zero_term
            else:
                acc += nz_shift + y[i] * lt - lgamma(y[i] + 1.0)
    return acc


def zinb_loglik(const int64_t[::1] y, double alpha, double gamma, double kappa):
    cdef Py_ssize_t i, n = y.shape[0]
    cdef double acc = 0.0, lg = lgamma(gamma)
    cdef double log_p0 = -gamma * log1p(kappa / gamma)
    cdef double log_q = -log1p(gamma / kappa)
    cdef double zero_term, nz_shift
    if alpha == 0.0:
        zero_term = log_p0
    else:
        zero_term = log(alpha + (1.0 - alpha) * exp(log_p0))
    nz_shift = log1p(-alpha) + log_p0 - lg
    with nogil:
        for i in range(n):
            if y[i] == 0:
                acc += zero_term
            else:
                acc += (nz_shift + lgamma(y[i] + gamma) - lgamma(y[i] + 1.0)
                        + y[i] * log_q)
    return acc


def nb_weighted_loglik(const int64_t[::1] y, const double[::1] w,
                       double gamma, double kappa):
    cdef Py_ssize_t i, n = y.shape[0]
    cdef double acc = 0.0, lg = lgamma(gamma)
    cdef double log_p0 = -gamma * log1p(kappa / gamma)
    cdef double log_q = -log1p(gamma / kappa)
    with nogil:
        for i in range(n):
            if w[i] == 0.0:
                continue
            acc += w[i] * (lgamma(y[i] + gamma) - lg - lgamma(y[i] + 1.0)
                           + log_p0 + y[i] * log_q)
    return acc


def nb_weighted_score(const int64_t[::1] y, const double[::1] w,
                      double gamma, double kappa):
    cdef Py_ssize_t i, n = y.shape[0]
    cdef double acc = 0.0, total = 0.0, pg = psi(gamma)
    cdef double lr = -log1p(kappa / gamma), s = gamma + kappa
    for i in range(n):
        if w[i] == 0.0:
            continue
        total += w[i]
        if y[i] > 0:
            acc += w[i] * (psi(y[i] + gamma) - pg)
        acc += w[i] * (kappa - y[i]) / s
    return acc + total * lr
