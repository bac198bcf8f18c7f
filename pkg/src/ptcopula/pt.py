"""Multivariate piecing-together.

Given ``U`` from a copula ``C`` and an independent ``V`` from a GPD-copula
with generator ``Z``, the PT vector is

    Y_i = U_i 1(U_i <= u_i) + {u_i + (1 - u_i) V_i} 1(U_i > u_i).

``Y`` follows a copula that equals ``C`` on ``[0, u]`` and has the upper tail
``1 - ||x - 1||_D`` with the thinned generator
``Z_j 1(U_j > u_j) / (1 - u_j)``.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .dnorm import DEFAULT_MC_SAMPLES, MCEstimate
from .errors import ConfigurationError, DataError, DimensionError, DomainError
from .generators import make_custom_generator, sample_generator
from .gpd_copula import GpdCopulaModel, sample_gpd_copula


def _threshold(u, d=None):
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if d is not None and u.size != d:
        raise DimensionError(f"threshold of length {u.size} for dimension {d}")
    if not ((u > 0) & (u < 1)).all():
        raise DomainError(f"threshold must lie strictly inside (0, 1), got {u}", code="invalid-threshold")
    return u


@dataclass(frozen=True)
class PTConfig:
    """Threshold, the given copula, the GPD-copula and the sample size."""

    u: tuple
    copula: object
    gpd: GpdCopulaModel
    n: int = 10_000
    seed: Optional[int] = None

    def __post_init__(self):
        u = _threshold(self.u, self.copula.dim)
        if self.gpd.dim != self.copula.dim:
            raise DimensionError("copula and GPD-copula dimensions differ")
        if self.n < 1:
            raise ConfigurationError(f"sample count must be >= 1, got {self.n}")
        object.__setattr__(self, "u", tuple(u))

    @property
    def dim(self):
        return len(self.u)

    @property
    def threshold(self):
        return np.asarray(self.u)

    def exact_region(self):
        """Lower corner of the region where the PT tail is exactly GPD."""
        return pt_exact_region(self.threshold, self.gpd)

    def check_exceedance(self, rng, n=10_000):
        """Raise unless sampled ``U`` exceeds ``u`` jointly at least once."""
        p = joint_exceedance_probability(self.copula, self.threshold, rng, n)
        if p.value <= 0:
            raise DomainError(
                f"no joint exceedance of u={self.u} in {n} copula draws",
                code="invalid-threshold",
            )
        return p


def joint_exceedance_probability(copula, u, rng, n=10_000):
    """Monte Carlo estimate of ``P(U > u)``."""
    U = copula.sample(rng, int(n))
    hits = kernels.count_exceeding(U, np.atleast_2d(u))[0]
    p = hits / n
    return MCEstimate(p, float(np.sqrt(p * (1 - p) / n)), int(n))


def piece_together(U, V, u):
    """Combine ``U`` (below threshold) and ``V`` (above) componentwise."""
    U = np.asarray(U, dtype=float)
    V = np.asarray(V, dtype=float)
    u = np.asarray(u, dtype=float)
    return np.where(U <= u, U, u + (1.0 - u) * V)


def pt_sample(config, rng, n=None):
    """Draw ``n`` (default ``config.n``) PT vectors; ``U`` is drawn before ``V``."""
    n = config.n if n is None else int(n)
    U = config.copula.sample(rng, n)
    V = sample_gpd_copula(config.gpd, rng, n)
    return piece_together(U, V, config.threshold)


def pt_exact_region(u, gpd):
    """``1 + (1 - u_j) K``: the PT upper tail is exact for ``x`` above it."""
    u = _threshold(u)
    return 1.0 + (1.0 - u) * gpd.K


def thinned_generator(gen, copula, u):
    """The thinned generator as a samplable :class:`GeneratorSpec`."""
    u = _threshold(u, gen.dim)
    if copula.dim != gen.dim:
        raise DimensionError("copula and generator dimensions differ")

    def sampler(rng, n):
        z = sample_generator(gen, rng, n)
        U = copula.sample(rng, n)
        return z * (U > u) / (1.0 - u)

    return make_custom_generator(sampler, gen.dim, gen.bound / float(np.min(1.0 - u)))


def thinned_dnorm(gen, copula, u, x, n_samples=DEFAULT_MC_SAMPLES, rng=None):
    """Monte Carlo D-norm of the PT copula's upper tail.

    Estimates ``E max_j |x_j| Z_j 1(U_j > u_j) / (1 - u_j)`` with ``Z`` drawn
    before ``U`` from ``rng``.
    """
    if rng is None:
        raise ConfigurationError("thinned D-norm estimation needs an RNG stream")
    u = _threshold(u, gen.dim)
    a = np.abs(np.atleast_1d(np.asarray(x, dtype=float)))
    if a.size != gen.dim or copula.dim != gen.dim:
        raise DimensionError("generator, copula, threshold and x must share one dimension")
    z = sample_generator(gen, rng, n_samples)
    U = copula.sample(rng, n_samples)
    return MCEstimate.from_draws(kernels.thinned_row_max(z, U, u, a))


def inject_margins(samples, quantile_functions):
    """Map copula samples to the data scale column by column.

    ``quantile_functions`` holds one callable (or object with ``ppf``) per
    column.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if len(quantile_functions) != samples.shape[1]:
        raise DimensionError(
            f"{len(quantile_functions)} quantile functions for {samples.shape[1]} columns"
        )
    out = np.empty_like(samples)
    for j, q in enumerate(quantile_functions):
        q = getattr(q, "ppf", q)
        out[:, j] = q(samples[:, j])
        bad = ~np.isfinite(out[:, j])
        if bad.any():
            level = samples[np.argmax(bad), j]
            raise DataError(
                f"quantile function of column {j} undefined at level {level!r}",
                code="margin-domain",
            )
    return out
