"""Hot loops of the Monte Carlo estimators.

The compiled Cython extension is used when it has been built; otherwise the
numpy fallback is imported. Setting ``PTCOPULA_PURE_PYTHON=1`` before import
forces the fallback. Both backends give bitwise-identical results.

All functions accept array-likes and coerce them to C-contiguous float64.
"""
import os

import numpy as np

from . import _pykernels

if os.environ.get("PTCOPULA_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"


def _mat(x):
    return np.ascontiguousarray(np.atleast_2d(x), dtype=np.float64)


def _vec(x):
    return np.ascontiguousarray(np.atleast_1d(x), dtype=np.float64)


def row_max_scaled(Z, a, impl=None):
    """Per-row ``max_j a_j Z_ij``."""
    return (impl or _impl).row_max_scaled(_mat(Z), _vec(a))


def row_min_scaled(Z, a, impl=None):
    """Per-row ``min_j a_j Z_ij``."""
    return (impl or _impl).row_min_scaled(_mat(Z), _vec(a))


def thinned_row_max(Z, U, u, a, impl=None):
    """Per-row ``max_j a_j Z_ij 1(U_ij > u_j) / (1 - u_j)``, floored at 0."""
    return (impl or _impl).thinned_row_max(_mat(Z), _mat(U), _vec(u), _vec(a))


def count_dominated(S, P, impl=None):
    """For every row ``p`` of ``P`` the number of rows of ``S`` with ``S <= p``."""
    return (impl or _impl).count_dominated(_mat(S), _mat(P))


def count_exceeding(S, P, impl=None):
    """For every row ``p`` of ``P`` the number of rows of ``S`` with ``S > p``."""
    return (impl or _impl).count_exceeding(_mat(S), _mat(P))


__all__ = [
    "BACKEND",
    "row_max_scaled",
    "row_min_scaled",
    "thinned_row_max",
    "count_dominated",
    "count_exceeding",
]
