"""Kernel backend selection.

The compiled extension is preferred; set ``ZIBAYES_PURE_PYTHON=1`` to force
the numpy fallback (used by the benchmark and the backend-parity tests).
"""
import os

from . import _kernels_py as python_backend

if os.environ.get("ZIBAYES_PURE_PYTHON", "") not in ("", "0"):
    _active = python_backend
else:
    try:
        from . import _kernels as _active
    except ImportError:
        _active = python_backend

try:
    from . import _kernels as compiled_backend
except ImportError:
    compiled_backend = None

BACKEND = _active.BACKEND

zip_log_jsum = _active.zip_log_jsum
zinb_log_jsum = _active.zinb_log_jsum
gamma_sums = _active.gamma_sums
poisson_loglik = _active.poisson_loglik
zip_loglik = _active.zip_loglik
zinb_loglik = _active.zinb_loglik
nb_weighted_loglik = _active.nb_weighted_loglik
nb_weighted_score = _active.nb_weighted_score

__all__ = [
    "BACKEND",
    "compiled_backend",
    "python_backend",
    "zip_log_jsum",
    "zinb_log_jsum",
    "gamma_sums",
    "poisson_loglik",
    "zip_loglik",
    "zinb_loglik",
    "nb_weighted_loglik",
    "nb_weighted_score",
]
