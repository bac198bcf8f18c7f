"""Copula models used as the "given" copula in the piecing-together step.

Every model exposes ``dim``, ``sample(rng, n)`` returning an ``(n, dim)``
array in ``[0, 1]^dim`` and, where a closed form exists, ``cdf(u)`` accepting
a point or a stack of points along the last axis.
"""
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import DimensionError, DomainError, UnsupportedModelError


def _check_dim(d):
    if int(d) != d or d < 1:
        raise DimensionError(f"dimension must be a positive integer, got {d!r}")
    return int(d)


def _points(u, d):
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != d:
        raise DimensionError(f"expected points of dimension {d}, got shape {u.shape}")
    return u


class CopulaModel:
    """Base class; subclasses implement ``sample`` and optionally ``cdf``."""

    dim: int
    name = "copula"

    def sample(self, rng, n):
        raise UnsupportedModelError(f"{self.name} copula is not samplable")

    def cdf(self, u):
        raise UnsupportedModelError(f"{self.name} copula has no closed-form CDF")

    def has_cdf(self):
        return type(self).cdf is not CopulaModel.cdf


@dataclass(frozen=True)
class IndependenceCopula(CopulaModel):
    dim: int
    name = "independence"

    def __post_init__(self):
        _check_dim(self.dim)

    def sample(self, rng, n):
        return rng.random((n, self.dim))

    def cdf(self, u):
        return np.prod(np.clip(_points(u, self.dim), 0.0, 1.0), axis=-1)


@dataclass(frozen=True)
class ComonotoneCopula(CopulaModel):
    """Upper Frechet bound: all components equal one uniform variable."""

    dim: int
    name = "comonotone"

    def __post_init__(self):
        _check_dim(self.dim)

    def sample(self, rng, n):
        return np.repeat(rng.random((n, 1)), self.dim, axis=1)

    def cdf(self, u):
        return np.min(np.clip(_points(u, self.dim), 0.0, 1.0), axis=-1)


@dataclass(frozen=True)
class ClaytonCopula(CopulaModel):
    """Clayton copula, sampled by the Marshall-Olkin gamma-frailty algorithm."""

    dim: int
    theta: float
    name = "clayton"

    def __post_init__(self):
        _check_dim(self.dim)
        if not self.theta > 0:
            raise DomainError(f"Clayton theta must be positive, got {self.theta}")

    def sample(self, rng, n):
        frailty = rng.gamma(1.0 / self.theta, 1.0, size=(n, 1))
        e = rng.standard_exponential((n, self.dim))
        return (1.0 + e / frailty) ** (-1.0 / self.theta)

    def cdf(self, u):
        u = np.clip(_points(u, self.dim), 0.0, 1.0)
        with np.errstate(divide="ignore"):
            s = np.sum(u ** (-self.theta), axis=-1) - self.dim + 1.0
            out = s ** (-1.0 / self.theta)
        return np.where(np.any(u == 0.0, axis=-1), 0.0, out)


@dataclass(frozen=True)
class GumbelCopula(CopulaModel):
    """Gumbel-Hougaard copula ``exp(-||-log u||_theta)``.

    It is an extreme value copula whose D-norm is the theta-norm. Sampling
    uses a positive stable frailty drawn with the Chambers-Mallows-Stuck
    representation.
    """

    dim: int
    theta: float
    name = "gumbel"

    def __post_init__(self):
        _check_dim(self.dim)
        if not self.theta >= 1:
            raise DomainError(f"Gumbel theta must be >= 1, got {self.theta}")

    def _stable(self, rng, n):
        alpha = 1.0 / self.theta
        if alpha == 1.0:
            return np.ones((n, 1))
        phi = rng.uniform(0.0, np.pi, size=(n, 1))
        w = rng.standard_exponential((n, 1))
        return (np.sin(alpha * phi) / np.sin(phi) ** (1.0 / alpha)) * (
            np.sin((1.0 - alpha) * phi) / w
        ) ** ((1.0 - alpha) / alpha)

    def sample(self, rng, n):
        s = self._stable(rng, n)
        e = rng.standard_exponential((n, self.dim))
        return np.exp(-((e / s) ** (1.0 / self.theta)))

    def cdf(self, u):
        u = np.clip(_points(u, self.dim), 0.0, 1.0)
        with np.errstate(divide="ignore"):
            t = np.sum((-np.log(u)) ** self.theta, axis=-1) ** (1.0 / self.theta)
        return np.exp(-t)


@dataclass(frozen=True)
class GaussianCopula(CopulaModel):
    corr: tuple
    name = "gaussian"

    def __post_init__(self):
        c = np.asarray(self.corr, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise DimensionError("correlation matrix must be square")
        if not np.allclose(np.diag(c), 1.0) or not np.allclose(c, c.T):
            raise DomainError("correlation matrix must be symmetric with unit diagonal")
        # Raises LinAlgError for matrices that are not positive definite.
        np.linalg.cholesky(c)
        object.__setattr__(self, "corr", tuple(map(tuple, c)))

    @property
    def dim(self):
        return len(self.corr)

    def sample(self, rng, n):
        chol = np.linalg.cholesky(np.asarray(self.corr))
        g = rng.standard_normal((n, self.dim)) @ chol.T
        return stats.norm.cdf(g)

    def cdf(self, u):
        u = np.clip(_points(u, self.dim), 1e-300, 1.0)
        mvn = stats.multivariate_normal(mean=np.zeros(self.dim), cov=np.asarray(self.corr))
        return mvn.cdf(stats.norm.ppf(u))


def make_copula(family, dim=None, **params):
    """Build a copula model from a family name (used by the CLI)."""
    family = family.lower()
    if family == "independence":
        return IndependenceCopula(dim)
    if family == "comonotone":
        return ComonotoneCopula(dim)
    if family == "clayton":
        return ClaytonCopula(dim, float(params["theta"]))
    if family == "gumbel":
        return GumbelCopula(dim, float(params["theta"]))
    if family == "gaussian":
        if "corr" in params:
            corr = params["corr"]
        else:
            rho = float(params["rho"])
            corr = np.full((dim, dim), rho)
            np.fill_diagonal(corr, 1.0)
        return GaussianCopula(corr)
    raise UnsupportedModelError(f"unknown copula family {family!r}")
