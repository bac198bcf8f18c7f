"""Generators of D-norms.

A generator is a random vector ``Z`` in ``[0, c]^d`` with ``E(Z_i) = 1``; it
defines the D-norm ``||x||_D = E max_i(|x_i| Z_i)``. Generator processes are
the grid-discretized analogue on ``[0, 1]``, built here as convex
combinations ``Z_t = sum_j a_j(t) W_j`` of i.i.d. bounded unit-mean atoms.
"""
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigurationError, DimensionError, DomainError, UnsupportedModelError


@dataclass(frozen=True)
class GeneratorSpec:
    """Samplable generator of a d-dimensional D-norm.

    Parameters
    ----------
    dim : int
        Dimension ``d``.
    family : str
        One of ``constant``, ``unit_vector``, ``scaled_copula``,
        ``bernoulli_mixture`` or ``custom``.
    bound : float
        Uniform upper bound ``c >= 1`` of all components.
    sampler : callable
        ``sampler(rng, n) -> (n, d)`` array.
    params : dict
        Family parameters kept for introspection and closed forms.
    """

    dim: int
    family: str
    bound: float
    sampler: Callable = field(repr=False, compare=False)
    params: dict = field(default_factory=dict, compare=False)

    def closed_form_norm(self):
        """Return the ``(kind, theta)`` of a closed-form D-norm, if known."""
        if self.family == "constant":
            return "sup"
        if self.family == "unit_vector":
            return "one"
        return None

    def exact_dnorm(self, x):
        """Exact D-norm for families where it is available, else ``None``."""
        a = np.abs(np.asarray(x, dtype=float))
        if self.family == "constant":
            return float(a.max())
        if self.family == "unit_vector":
            return float(a.sum())
        if self.family == "bernoulli_mixture":
            patterns = self.params["patterns"]
            w = self.params["weights"]
            scaled = a / self.params["inclusion"]
            return float(sum(wk * np.max(scaled * pk) for wk, pk in zip(w, patterns)))
        return None


def _check_dim(d):
    if isinstance(d, bool) or int(d) != d or d < 1:
        raise DimensionError(f"generator dimension must be a positive integer, got {d!r}")
    return int(d)


def make_constant_generator(d):
    """Generator ``Z = (1, ..., 1)`` of the sup-norm."""
    d = _check_dim(d)
    return GeneratorSpec(d, "constant", 1.0, lambda rng, n: np.ones((n, d)))


def make_unit_vector_generator(d):
    """Generator ``Z = d e_J``, ``J`` uniform on ``{1, ..., d}``; gives the 1-norm."""
    d = _check_dim(d)

    def sampler(rng, n):
        z = np.zeros((n, d))
        z[np.arange(n), rng.integers(0, d, size=n)] = float(d)
        return z

    return GeneratorSpec(d, "unit_vector", float(d), sampler)


def make_scaled_copula_generator(copula):
    """Generator ``Z = 2 U`` with ``U`` following ``copula``."""
    if not callable(getattr(copula, "sample", None)):
        raise UnsupportedModelError(f"{copula!r} is not a samplable copula")
    d = _check_dim(copula.dim)
    return GeneratorSpec(
        d,
        "scaled_copula",
        2.0,
        lambda rng, n: 2.0 * copula.sample(rng, n),
        {"copula": copula},
    )


def make_bernoulli_mixture_generator(patterns, weights):
    """Generator switching on a random subset of components.

    With probability ``weights[k]`` the components in the 0/1 row
    ``patterns[k]`` are active; active component ``i`` takes the value
    ``1 / p_i`` where ``p_i`` is its overall activation probability, so that
    ``E(Z_i) = 1``. The D-norm is ``sum_k w_k max_{i in S_k} |x_i| / p_i``.
    """
    patterns = np.asarray(patterns, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if patterns.ndim != 2 or len(weights) != len(patterns):
        raise DimensionError("patterns must be a (K, d) matrix matching K weights")
    if not np.isin(patterns, (0.0, 1.0)).all():
        raise DomainError("patterns must contain only 0 and 1")
    if (weights < 0).any() or not np.isclose(weights.sum(), 1.0, rtol=0, atol=1e-12):
        raise DomainError("weights must be nonnegative and sum to 1")
    d = _check_dim(patterns.shape[1])
    inclusion = weights @ patterns
    if (inclusion <= 0).any():
        raise DomainError("every component must be active with positive probability")
    values = patterns / inclusion
    cum = np.cumsum(weights)
    cum[-1] = 1.0

    def sampler(rng, n):
        k = np.searchsorted(cum, rng.random(n), side="right")
        return values[np.minimum(k, len(values) - 1)]

    return GeneratorSpec(
        d,
        "bernoulli_mixture",
        float(values.max()),
        sampler,
        {"patterns": patterns, "weights": weights, "inclusion": inclusion},
    )


def make_custom_generator(sampler, dim, bound):
    """Wrap a user sampler; bounds are enforced on every draw."""
    d = _check_dim(dim)
    if not np.isfinite(bound) or bound < 1:
        raise DomainError(f"generator bound must be finite and >= 1, got {bound}")
    return GeneratorSpec(d, "custom", float(bound), sampler)


def sample_generator(spec, rng, n):
    """Draw ``n`` generator vectors as an ``(n, d)`` float array.

    Raises
    ------
    DomainError
        If a sampled component leaves ``[0, c]`` (custom samplers only can).
    """
    if n < 1:
        raise ConfigurationError(f"sample count must be >= 1, got {n}")
    z = np.asarray(spec.sampler(rng, int(n)), dtype=float)
    if z.shape != (n, spec.dim):
        raise DimensionError(f"sampler returned shape {z.shape}, expected {(n, spec.dim)}")
    if not ((z >= 0.0) & (z <= spec.bound)).all():
        raise DomainError(f"generator sample outside [0, {spec.bound}]")
    return z


# -- generator processes -----------------------------------------------------


def uniform_grid(m):
    """``m + 1`` equispaced points covering ``[0, 1]``."""
    if m < 1:
        raise ConfigurationError(f"grid needs at least two points, got m={m}")
    return np.linspace(0.0, 1.0, int(m) + 1)


@dataclass(frozen=True)
class AtomSpec:
    """Law of the i.i.d. bounded unit-mean atoms ``W_j``."""

    name: str
    bound: float
    sampler: Callable = field(repr=False, compare=False)
    mean: float = 1.0


def constant_atoms():
    return AtomSpec("constant", 1.0, lambda rng, size: np.ones(size))


def coin_atoms():
    """Fair coin on ``{0, 2}``."""
    return AtomSpec("coin", 2.0, lambda rng, size: 2.0 * rng.integers(0, 2, size=size))


def uniform_atoms():
    """Uniform on ``(0, 2)``."""
    return AtomSpec("uniform", 2.0, lambda rng, size: rng.uniform(0.0, 2.0, size=size))


def custom_atoms(sampler, bound, mean=1.0):
    return AtomSpec("custom", bound, sampler, mean)


def linear_basis(grid):
    """Two weights ``1 - t`` and ``t``."""
    grid = np.asarray(grid, dtype=float)
    return np.vstack([1.0 - grid, grid])


def hat_basis(n_basis, grid):
    """Piecewise linear hat functions at ``n_basis`` equispaced knots.

    The hats form a partition of unity, so every grid point carries weights
    summing to one.
    """
    grid = np.asarray(grid, dtype=float)
    if n_basis < 1:
        raise ConfigurationError("need at least one basis function")
    if n_basis == 1:
        return np.ones((1, len(grid)))
    knots = np.linspace(0.0, 1.0, n_basis)
    h = knots[1] - knots[0]
    return np.clip(1.0 - np.abs(grid[None, :] - knots[:, None]) / h, 0.0, None)


@dataclass(frozen=True, eq=False)
class GeneratorProcessSpec:
    """Generator process ``Z_t = sum_j a_j(t) W_j`` sampled on a grid."""

    basis: np.ndarray = field(repr=False, compare=False)
    atoms: AtomSpec
    grid: np.ndarray = field(repr=False, compare=False)

    @property
    def n_basis(self):
        return self.basis.shape[0]

    @property
    def bound(self):
        return float(max(self.atoms.bound, 1.0))

    def sample_atoms(self, rng, n):
        w = np.asarray(self.atoms.sampler(rng, (int(n), self.n_basis)), dtype=float)
        if not ((w >= 0) & (w <= self.atoms.bound)).all():
            raise DomainError(f"atom sample outside [0, {self.atoms.bound}]")
        return w

    def paths_from_atoms(self, w):
        """``sum_j a_j(t) W_j`` accumulated in basis order ``j = 0, 1, ...``."""
        # Fixed summation order (not BLAS) so values are reproducible exactly.
        out = w[:, :1] * self.basis[0]
        for j in range(1, self.n_basis):
            out += w[:, j:j + 1] * self.basis[j]
        return out

    def sample(self, rng, n):
        """``(n, m + 1)`` matrix of generator paths."""
        return self.paths_from_atoms(self.sample_atoms(rng, n))

    def at_points(self, indices):
        """Finite-dimensional generator of ``(Z_{t_1}, ..., Z_{t_k})``.

        For the same random stream its draws equal the corresponding columns
        of :meth:`sample`.
        """
        idx = np.atleast_1d(np.asarray(indices, dtype=int))
        return GeneratorSpec(
            len(idx),
            "custom",
            self.bound,
            lambda rng, n: self.sample(rng, n)[:, idx],
            {"process": self, "indices": idx},
        )


def make_basis_generator_process(basis, atom_spec, grid):
    """Validate and assemble a :class:`GeneratorProcessSpec`.

    Raises
    ------
    ConfigurationError
        If any weight is negative or the weights at a grid point do not sum
        to one within ``1e-12`` ("invalid-basis").
    DomainError
        If the atoms are unbounded or do not have unit mean ("invalid-atom").
    """
    grid = np.asarray(grid, dtype=float)
    basis = np.atleast_2d(np.asarray(basis, dtype=float))
    if grid.ndim != 1 or len(grid) < 1 or (np.diff(grid) <= 0).any():
        raise ConfigurationError("grid must be strictly increasing", code="invalid-grid")
    if basis.shape[1] != len(grid):
        raise DimensionError(f"basis has {basis.shape[1]} columns for {len(grid)} grid points")
    if (basis < 0).any():
        raise ConfigurationError("basis weights must be nonnegative", code="invalid-basis")
    if np.abs(basis.sum(axis=0) - 1.0).max() > 1e-12:
        raise ConfigurationError("basis weights must sum to 1 at every grid point", code="invalid-basis")
    if not np.isfinite(atom_spec.bound) or atom_spec.bound < 0:
        raise DomainError("atoms must be bounded", code="invalid-atom")
    if atom_spec.mean != 1.0:
        raise DomainError("atoms must have unit mean", code="invalid-atom")
    basis.setflags(write=False)
    grid.setflags(write=False)
    return GeneratorProcessSpec(basis, atom_spec, grid)


def constant_generator_process(grid):
    """``Z_t = 1`` for all ``t``; its functional D-norm is the sup-norm."""
    grid = np.asarray(grid, dtype=float)
    return make_basis_generator_process(np.ones((1, len(grid))), constant_atoms(), grid)
