"""GP functions, GPD-copulas and their exact samplers.

A GPD-copula with generator ``Z`` has ``C(u) = 1 - ||u - 1||_D`` on an upper
region ``[1 + K, 1]^d``. The sampler takes ``V_i = max(M, -U / Z_i)`` with
``U`` uniform and independent of ``Z``; components at or below ``K`` are
replaced by one shared draw ``xi`` uniform on ``(-1, K)``, which makes every
margin exactly uniform while leaving the law above ``K`` untouched.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .copulas import CopulaModel
from .dnorm import DEFAULT_MC_SAMPLES, DNorm, MCEstimate, eval_dnorm
from .errors import ConfigurationError, DimensionError, DomainError, UnsupportedModelError
from .generators import GeneratorSpec, sample_generator


@dataclass(frozen=True)
class GPFunction:
    """``H(x) = 1 - ||x||_D`` for ``x <= 0`` with ``||x||_D <= 1``.

    For ``d >= 3`` this is in general only a quasi-copula, so it is never
    evaluated outside its natural domain.
    """

    norm: DNorm

    def __call__(self, x, rng=None):
        return gp_function_eval(self, x, rng)


def gp_function_eval(H, x, rng=None):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if (x > 0).any():
        raise DomainError(f"GP function is defined for nonpositive arguments, got {x}")
    value = eval_dnorm(H.norm, x, rng).value
    if value > 1.0:
        raise DomainError(f"||x||_D = {value:.6g} > 1: outside the GP function's domain")
    return 1.0 - value


def clipping_level(bound, M):
    """``K = max(M, -1/c)``."""
    return max(float(M), -1.0 / float(bound))


@dataclass(frozen=True)
class GpdCopulaModel(CopulaModel):
    """GPD-copula generated by ``gen`` with clipping constant ``M < 0``.

    ``M`` defaults to ``-1/c``, which makes ``K = -1/c`` and the exact upper
    region as large as possible.
    """

    gen: GeneratorSpec
    M: Optional[float] = None
    K: float = field(init=False)
    name = "gpd"

    def __post_init__(self):
        M = -1.0 / self.gen.bound if self.M is None else float(self.M)
        if not M < 0:
            raise ConfigurationError(f"clipping constant M must be negative, got {M}")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "K", clipping_level(self.gen.bound, M))

    @property
    def dim(self):
        return self.gen.dim

    @property
    def needs_modification(self):
        return self.K > -1.0

    @property
    def lower_corner(self):
        """Lower corner ``1 + K`` of the exact region (same in every coordinate)."""
        return 1.0 + self.K

    def sample(self, rng, n):
        return sample_gpd_copula(self, rng, n)

    def has_cdf(self):
        return self.gen.exact_dnorm(np.zeros(self.dim)) is not None

    def cdf(self, u):
        exact = self.gen.exact_dnorm
        u = np.asarray(u, dtype=float)
        if exact(np.zeros(self.dim)) is None:
            raise UnsupportedModelError("no closed-form D-norm; use gpd_copula_cdf_upper")
        pts = np.atleast_2d(u)
        vals = np.array([gpd_copula_cdf_upper(self, p).value for p in pts])
        return vals.reshape(u.shape[:-1]) if u.ndim > 1 else float(vals[0])


def gpd_copula_cdf_upper(model, u, rng=None, n_samples=DEFAULT_MC_SAMPLES):
    """``C(u) = 1 - ||u - 1||_D`` on the exact region ``u >= 1 + K``.

    Exact when the generator's D-norm has a closed form, otherwise a Monte
    Carlo estimate drawn from ``rng``.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if u.size != model.dim:
        raise DimensionError(f"point of length {u.size} for a {model.dim}-dimensional copula")
    if (u > 1).any():
        raise DomainError(f"copula argument above 1: {u}")
    if (u < model.lower_corner).any():
        raise DomainError(
            f"{u} lies below the exact GPD region [{model.lower_corner:.6g}, 1]",
            code="outside-upper-region",
        )
    exact = model.gen.exact_dnorm(u - 1.0)
    if exact is not None:
        return MCEstimate(1.0 - exact)
    est = eval_dnorm(DNorm.from_generator(model.gen, n_samples), u - 1.0, rng)
    return MCEstimate(1.0 - est.value, est.std_error, est.n_samples)


def gpp_transform(z, U, M):
    """``max(M, -U / Z)`` row-wise, with ``Z = 0`` mapped to ``M``."""
    with np.errstate(divide="ignore"):
        v = -np.asarray(U, dtype=float).reshape(-1, 1) / z
    return np.maximum(M, v)


def copula_modification(v, K, xi):
    """Replace entries ``<= K`` by the row's shared ``xi``.

    Returns the modified array and the boolean mask of replaced entries.
    """
    mask = v <= K
    out = np.where(mask, np.asarray(xi, dtype=float).reshape(-1, 1), v)
    return out, mask


def sample_gpd_copula(model, rng, n, return_details=False):
    """Draw ``n`` vectors from the GPD-copula ``model``.

    Draw order per call: ``U`` (n), ``Z`` (n x d), then ``xi`` (n) when a
    modification is needed (``K > -1``).

    With ``return_details`` the tuple ``(Y, mask, xi)`` is returned, where
    ``mask`` flags the components replaced by ``xi``.
    """
    if model.gen.bound > 1.0 and not model.K > -1.0:
        raise ConfigurationError("K must lie in (-1, 0); choose M > -1/c")
    U = rng.random(int(n))
    z = sample_generator(model.gen, rng, n)
    v = gpp_transform(z, U, model.M)
    if model.needs_modification:
        xi = rng.uniform(-1.0, model.K, size=int(n))
        v, mask = copula_modification(v, model.K, xi)
    else:
        xi = np.full(int(n), np.nan)
        mask = np.zeros(v.shape, dtype=bool)
    y = v + 1.0
    if return_details:
        return y, mask, xi
    return y
