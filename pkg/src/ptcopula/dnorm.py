"""D-norms, Pickands dependence functions and tail copulas."""
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from . import kernels
from .errors import ComplexityError, ConfigurationError, DimensionError, DomainError
from .generators import GeneratorSpec, sample_generator

DEFAULT_MC_SAMPLES = 100_000
MAX_SUBSET_DIM = 20


@dataclass(frozen=True)
class MCEstimate:
    """A Monte Carlo mean with its standard error (0 for exact values)."""

    value: float
    std_error: float = 0.0
    n_samples: int = 0

    @classmethod
    def from_draws(cls, draws):
        draws = np.asarray(draws, dtype=float)
        n = draws.size
        se = float(draws.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
        return cls(float(draws.mean()), se, n)

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class DNorm:
    """A D-norm with either a closed-form or a Monte Carlo backend.

    ``kind`` is ``"sup"``, ``"one"``, ``"theta"`` (with ``theta >= 1``,
    ``inf`` allowed) or ``"monte_carlo"`` (with ``generator`` and
    ``n_samples``).
    """

    dim: int
    kind: str
    theta: Optional[float] = None
    generator: Optional[GeneratorSpec] = None
    n_samples: int = DEFAULT_MC_SAMPLES

    def __post_init__(self):
        if self.kind not in ("sup", "one", "theta", "monte_carlo"):
            raise ConfigurationError(f"unknown D-norm backend {self.kind!r}")
        if self.kind == "theta" and not (self.theta is not None and self.theta >= 1):
            raise DomainError(f"theta-norm requires theta >= 1, got {self.theta}")
        if self.kind == "monte_carlo":
            if self.generator is None:
                raise ConfigurationError("Monte Carlo D-norm needs a generator")
            if self.generator.dim != self.dim:
                raise DimensionError("generator dimension differs from norm dimension")

    @property
    def is_exact(self):
        return self.kind != "monte_carlo"

    @classmethod
    def sup(cls, d):
        return cls(d, "sup")

    @classmethod
    def one(cls, d):
        return cls(d, "one")

    @classmethod
    def theta_norm(cls, d, theta):
        return cls(d, "theta", theta=float(theta))

    @classmethod
    def from_generator(cls, gen, n_samples=DEFAULT_MC_SAMPLES, prefer_closed_form=False):
        """MC norm of ``gen``; switches to the closed form if asked and known."""
        if prefer_closed_form and gen.closed_form_norm() is not None:
            return cls(gen.dim, gen.closed_form_norm())
        return cls(gen.dim, "monte_carlo", generator=gen, n_samples=int(n_samples))


def _closed_form(norm, a):
    if norm.kind == "sup":
        return float(a.max())
    if norm.kind == "one":
        return float(a.sum())
    if np.isinf(norm.theta):
        return float(a.max())
    top = a.max()
    if top == 0:
        return 0.0
    # Scaling by the max avoids overflow for large theta.
    return float(top * np.sum((a / top) ** norm.theta) ** (1.0 / norm.theta))


def eval_dnorm(norm, x, rng=None):
    """Evaluate ``||x||_D``.

    Closed-form backends return the exact value with zero standard error;
    Monte Carlo backends average ``max_i |x_i| Z_i`` over ``norm.n_samples``
    generator draws from ``rng``.
    """
    a = np.abs(np.asarray(x, dtype=float)).ravel()
    if a.size != norm.dim:
        raise DimensionError(f"vector of length {a.size} for a {norm.dim}-dimensional D-norm")
    if norm.is_exact:
        return MCEstimate(_closed_form(norm, a))
    if rng is None:
        raise ConfigurationError("Monte Carlo D-norm evaluation needs an RNG stream")
    z = sample_generator(norm.generator, rng, norm.n_samples)
    return MCEstimate.from_draws(kernels.row_max_scaled(z, a))


def pickands(norm, t, rng=None, tol=1e-12):
    """Pickands dependence function ``D(t) = ||(t, 1 - sum t)||_D``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.size != norm.dim - 1:
        raise DimensionError(f"Pickands argument needs {norm.dim - 1} coordinates")
    rest = 1.0 - t.sum()
    if (t < -tol).any() or rest < -tol:
        raise DomainError(f"{t} is outside the unit simplex")
    point = np.append(np.clip(t, 0.0, None), max(rest, 0.0))
    return eval_dnorm(norm, point, rng).value


def _nonpositive(x):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if (x > 0).any():
        raise DomainError(f"tail copula requires a nonpositive argument, got {x}")
    return x


def tail_copula(gen, x, n_samples=DEFAULT_MC_SAMPLES, rng=None):
    """Monte Carlo tail copula ``lambda(x) = E min_i(|x_i| Z_i)``."""
    x = _nonpositive(x)
    if x.size != gen.dim:
        raise DimensionError(f"vector of length {x.size} for a {gen.dim}-dimensional generator")
    if rng is None:
        raise ConfigurationError("tail copula estimation needs an RNG stream")
    z = sample_generator(gen, rng, n_samples)
    return MCEstimate.from_draws(kernels.row_min_scaled(z, np.abs(x)))


def tail_copula_via_inclusion_exclusion(norm, x, rng=None):
    """Tail copula from subset D-norms through the min-max identity.

    ``lambda(x) = sum_{K nonempty} (-1)^{|K|-1} ||sum_{k in K} x_k e_k||_D``.
    For a Monte Carlo norm every subset is evaluated on its own stream
    spawned from ``rng``, and the standard errors are combined in quadrature.
    """
    x = _nonpositive(x)
    d = x.size
    if d != norm.dim:
        raise DimensionError(f"vector of length {d} for a {norm.dim}-dimensional D-norm")
    if d > MAX_SUBSET_DIM:
        raise ComplexityError(f"subset enumeration refused for d={d} > {MAX_SUBSET_DIM}")
    subsets = [k for r in range(1, d + 1) for k in combinations(range(d), r)]
    streams = [None] * len(subsets)
    if not norm.is_exact:
        if rng is None:
            raise ConfigurationError("Monte Carlo D-norm evaluation needs an RNG stream")
        streams = rng.spawn(len(subsets))
    total = 0.0
    var = 0.0
    for subset, sub_rng in zip(subsets, streams):
        restricted = np.zeros(d)
        restricted[list(subset)] = x[list(subset)]
        est = eval_dnorm(norm, restricted, sub_rng)
        total += (-1) ** (len(subset) - 1) * est.value
        var += est.std_error ** 2
    n = 0 if norm.is_exact else norm.n_samples * len(subsets)
    return MCEstimate(total, float(np.sqrt(var)), n)
