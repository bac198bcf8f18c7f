"""numpy implementations of the Monte Carlo inner loops.

Used when the compiled extension is unavailable or disabled through the
``PTCOPULA_PURE_PYTHON`` environment variable.
"""
import numpy as np


def row_max_scaled(Z, a):
    return (a * Z).max(axis=1)


def row_min_scaled(Z, a):
    return (a * Z).min(axis=1)


def thinned_row_max(Z, U, u, a):
    denom = np.subtract(1.0, u)
    vals = np.where(U > u, (a * Z) / denom, 0.0)
    return np.maximum(vals.max(axis=1), 0.0)


def count_dominated(S, P):
    return np.array([np.count_nonzero(np.all(S <= p, axis=1)) for p in P], dtype=np.int64)


def count_exceeding(S, P):
    return np.array([np.count_nonzero(np.all(S > p, axis=1)) for p in P], dtype=np.int64)
