"""Empirical copula and the piecing-together variant built on it."""
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .copulas import CopulaModel
from .dnorm import DEFAULT_MC_SAMPLES, MCEstimate
from .errors import DimensionError, DomainError, IngestionError
from .generators import sample_generator
from .gpd_copula import sample_gpd_copula
from .pt import _threshold


@dataclass(frozen=True, eq=False)
class RankMatrix(CopulaModel):
    """Standardized ranks ``R_ij = #{k : X_kj <= X_ij} / (n + 1)``.

    Doubles as the empirical copula model: ``sample`` resamples rows
    uniformly and ``cdf`` is the empirical copula ``C_n``.
    """

    values: np.ndarray = field(repr=False, compare=False)
    name = "empirical"

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def dim(self):
        return self.values.shape[1]

    def sample(self, rng, n):
        return self.values[rng.integers(0, self.n, size=int(n))]

    def cdf(self, v):
        return empirical_copula_cdf(self, v)


def standardized_ranks(data):
    """Rank-transform an ``(n, d)`` data matrix.

    Ties share the common value given by the counting definition, e.g. a
    column ``(3, 3)`` maps to ``(2/3, 2/3)``.
    """
    x = np.asarray(data, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] < 1:
        raise IngestionError("rank transform needs a nonempty (n, d) matrix")
    bad = ~np.isfinite(x)
    if bad.any():
        r, c = map(int, np.argwhere(bad)[0])
        raise IngestionError(f"non-finite value at row {r}, column {c}", row=r, col=c)
    n = x.shape[0]
    ranks = np.empty_like(x)
    for j in range(x.shape[1]):
        col = x[:, j]
        ranks[:, j] = np.searchsorted(np.sort(col), col, side="right") / (n + 1.0)
    ranks.setflags(write=False)
    return RankMatrix(ranks)


def empirical_copula_cdf(ranks, v):
    """``C_n(v)``: fraction of rank rows dominated by ``v``.

    ``v`` may be one point or a stack of points along the last axis.
    """
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != ranks.dim:
        raise DimensionError(f"point of dimension {v.shape[-1]} for {ranks.dim} rank columns")
    pts = v.reshape(-1, ranks.dim)
    vals = kernels.count_dominated(ranks.values, pts) / ranks.n
    return vals.reshape(v.shape[:-1]) if v.ndim > 1 else float(vals[0])


def empirical_threshold(ranks, u):
    """``u*_i = P_n(U*_i <= u_i)`` under the empirical copula."""
    u = _threshold(u, ranks.dim)
    return (ranks.values <= u).mean(axis=0)


def _check_joint_exceedance(ranks, u):
    if kernels.count_exceeding(ranks.values, u[None, :])[0] == 0:
        raise DomainError(
            f"no rank row exceeds u={u} in every component; lower the threshold",
            code="threshold-too-high",
        )


def empirical_pt_sample(ranks, gpd_model, u, rng, n_out):
    """Draw ``n_out`` vectors of the empirical PT construction.

    ``U*`` is resampled from the rank rows, then ``V`` is drawn from
    ``gpd_model``; above the threshold component ``i`` becomes
    ``u*_i + (1 - u*_i) V_i``.
    """
    u = _threshold(u, ranks.dim)
    if gpd_model.dim != ranks.dim:
        raise DimensionError("GPD-copula and rank dimensions differ")
    _check_joint_exceedance(ranks, u)
    u_star = empirical_threshold(ranks, u)
    U = ranks.sample(rng, n_out)
    V = sample_gpd_copula(gpd_model, rng, n_out)
    return np.where(U <= u, U, u_star + (1.0 - u_star) * V)


def empirical_exact_region(ranks, gpd_model, u):
    """Lower corner above which the empirical PT tail is exactly GPD."""
    u = _threshold(u, ranks.dim)
    u_star = empirical_threshold(ranks, u)
    return np.maximum(u, 1.0 + (1.0 - u_star) * gpd_model.K)


def empirical_thinned_dnorm(gen, ranks, u, x, n_samples=DEFAULT_MC_SAMPLES, rng=None):
    """``E_n max_j |x_j| Z_j 1(U*_j > u_j) / (1 - u*_j)`` by Monte Carlo.

    The expectation over ``U*`` is taken by resampling rank rows; ``Z`` is
    drawn first.
    """
    u = _threshold(u, ranks.dim)
    a = np.abs(np.atleast_1d(np.asarray(x, dtype=float)))
    if a.size != ranks.dim or gen.dim != ranks.dim:
        raise DimensionError("generator, ranks and x must share one dimension")
    _check_joint_exceedance(ranks, u)
    u_star = empirical_threshold(ranks, u)
    z = sample_generator(gen, rng, n_samples)
    U = ranks.sample(rng, n_samples)
    # Indicator uses u, normalization uses u*.
    thinned = np.where(U > u, z / (1.0 - u_star), 0.0)
    return MCEstimate.from_draws(kernels.row_max_scaled(thinned, a))
