"""Functional piecing-together on a uniform grid over [0, 1].

Processes are represented by their values at the grid points, one row per
sampled path; the supremum over ``[0, 1]`` is approximated by the maximum
over the grid.
"""
import csv
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import stats

from . import kernels
from .dnorm import DEFAULT_MC_SAMPLES, MCEstimate
from .errors import ConfigurationError, DimensionError, DomainError
from .generators import GeneratorProcessSpec, uniform_grid
from .gpd_copula import clipping_level, copula_modification, gpp_transform
from .pt import piece_together

DEFAULT_GRID_SIZE = 50


@dataclass(frozen=True, eq=False)
class GridPath:
    """Path values on a grid; ``values`` is ``(m + 1,)`` or ``(n_paths, m + 1)``."""

    grid: np.ndarray = field(compare=False)
    values: np.ndarray = field(compare=False)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if values.shape[-1] != grid.size:
            raise DimensionError(f"{values.shape[-1]} values for {grid.size} grid points")
        if (np.diff(grid) <= 0).any():
            raise DimensionError("grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    @property
    def n_paths(self):
        return 1 if self.values.ndim == 1 else self.values.shape[0]

    @property
    def paths(self):
        return np.atleast_2d(self.values)

    def to_csv(self, path_or_file):
        """Write long-format rows ``path,t,value`` at 17 significant digits."""
        own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["path", "t", "value"])
            for i, row in enumerate(self.paths):
                for t, v in zip(self.grid, row):
                    w.writerow([i, f"{t:.17g}", f"{v:.17g}"])
        finally:
            if own:
                fh.close()


def _check_same_grid(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or not np.array_equal(a, b):
        raise DimensionError("processes live on different grids")


class _PointProjection:
    """Finite-dimensional copula ``(U_{t_1}, ..., U_{t_k})`` of a copula process."""

    def __init__(self, process, indices):
        self.process = process
        self.indices = np.atleast_1d(np.asarray(indices, dtype=int))
        self.dim = len(self.indices)
        self.name = f"{process.name}-projection"

    def sample(self, rng, n):
        return self.process.sample(rng, n)[:, self.indices]


class CopulaProcess:
    name = "copula-process"
    grid: np.ndarray

    def sample(self, rng, n):
        raise NotImplementedError

    def at_points(self, indices):
        return _PointProjection(self, indices)


class GaussianCopulaProcess(CopulaProcess):
    """``U_t = Phi(G_t)`` for a unit-variance Gaussian process ``G``.

    The covariance is squared exponential, ``exp(-(s - t)^2 / (2 l^2))``; its
    square root is taken by eigendecomposition with rows renormalized so that
    every marginal variance is exactly one.
    """

    name = "gaussian"

    def __init__(self, grid, length_scale=0.2):
        if not length_scale > 0:
            raise ConfigurationError("length scale must be positive")
        self.grid = np.asarray(grid, dtype=float)
        self.length_scale = float(length_scale)
        diff = self.grid[:, None] - self.grid[None, :]
        cov = np.exp(-0.5 * (diff / self.length_scale) ** 2)
        w, v = np.linalg.eigh(cov)
        root = v * np.sqrt(np.clip(w, 0.0, None))
        self._root = root / np.linalg.norm(root, axis=1, keepdims=True)

    def sample(self, rng, n):
        g = rng.standard_normal((int(n), self.grid.size)) @ self._root.T
        return stats.norm.cdf(g)


class ComonotoneCopulaProcess(CopulaProcess):
    """One uniform variable shared by all ``t``."""

    name = "comonotone"

    def __init__(self, grid):
        self.grid = np.asarray(grid, dtype=float)

    def sample(self, rng, n):
        return np.repeat(rng.random((int(n), 1)), self.grid.size, axis=1)


class GPCopulaProcess(CopulaProcess):
    """A generalized Pareto copula process used as the given copula process."""

    name = "gpcp"

    def __init__(self, gen_process, M=None):
        self.gen_process = gen_process
        self.M = M
        self.grid = gen_process.grid

    def sample(self, rng, n):
        return sample_gpcp(self.gen_process, self.M, rng, n).paths


def _default_M(gen_process, M):
    return -1.0 / gen_process.bound if M is None else float(M)


def sample_gpp(gen_process, M, rng, n):
    """Standard generalized Pareto process ``V_t = max(M, -U / Z_t)``.

    Draw order: ``U`` (n) then the atoms of ``Z``.
    """
    M = _default_M(gen_process, M)
    if not M < 0:
        raise ConfigurationError(f"clipping constant M must be negative, got {M}")
    U = rng.random(int(n))
    z = gen_process.sample(rng, n)
    return GridPath(gen_process.grid, gpp_transform(z, U, M))


def sample_gpcp(gen_process, M, rng, n, return_details=False):
    """Generalized Pareto copula process ``Q = V~ + 1`` with uniform margins.

    Grid values of ``V`` at or below ``K = max(M, -1/c)`` are replaced by
    one ``xi`` per path, uniform on ``(-1, K)``. With ``return_details`` the
    tuple ``(paths, mask, xi)`` is returned.
    """
    M = _default_M(gen_process, M)
    K = clipping_level(gen_process.bound, M)
    if not K > -1.0:
        raise ConfigurationError(
            f"K = max(M, -1/c) = {K} must exceed -1; choose M > -1", code="invalid-clipping"
        )
    v = sample_gpp(gen_process, M, rng, n).paths
    xi = rng.uniform(-1.0, K, size=int(n))
    v, mask = copula_modification(v, K, xi)
    q = GridPath(gen_process.grid, v + 1.0)
    if return_details:
        return q, mask, xi
    return q


@dataclass(frozen=True)
class FunctionalPTConfig:
    copula_process: CopulaProcess
    gen_process: GeneratorProcessSpec
    u: float
    M: Optional[float] = None
    K: float = field(init=False)

    def __post_init__(self):
        _check_same_grid(self.copula_process.grid, self.gen_process.grid)
        if not 0 < self.u < 1:
            raise DomainError(f"threshold must lie in (0, 1), got {self.u}", code="invalid-threshold")
        M = _default_M(self.gen_process, self.M)
        if not M < 0:
            raise ConfigurationError(f"clipping constant M must be negative, got {M}")
        K = clipping_level(self.gen_process.bound, M)
        if not -1.0 < K < 0.0:
            raise ConfigurationError(f"K = {K} must lie in (-1, 0); choose M > -1", code="invalid-clipping")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "K", K)

    @property
    def grid(self):
        return self.gen_process.grid

    def tail_bound(self):
        """Sup-norm bound on test functions for the exact functional tail."""
        c = self.gen_process.bound
        return (1.0 - self.u) * min(abs(self.M), abs(self.K), 1.0 / c)


def functional_pt_sample(config, rng, n):
    """PT-process paths; ``U`` paths are drawn before the GPCP."""
    U = config.copula_process.sample(rng, n)
    Q = sample_gpcp(config.gen_process, config.M, rng, n).paths
    return GridPath(config.grid, piece_together(U, Q, config.u))


def functional_thinned_dnorm(gen_process, copula_process, u, f, n_samples=DEFAULT_MC_SAMPLES, rng=None):
    """``E max_t |f(t)| Z_t 1(U_t > u) / (1 - u)`` over the grid.

    ``f`` is a :class:`GridPath` (or array) on the common grid; ``Z`` paths are
    drawn before ``U`` paths.
    """
    _check_same_grid(gen_process.grid, copula_process.grid)
    if isinstance(f, GridPath):
        _check_same_grid(f.grid, gen_process.grid)
        f = f.values
    a = np.abs(np.asarray(f, dtype=float))
    if a.shape != gen_process.grid.shape:
        raise DimensionError("test function does not match the grid")
    if rng is None:
        raise ConfigurationError("functional D-norm estimation needs an RNG stream")
    z = gen_process.sample(rng, n_samples)
    U = copula_process.sample(rng, n_samples)
    uu = np.full(a.shape, float(u))
    return MCEstimate.from_draws(kernels.thinned_row_max(z, U, uu, a))


def functional_dnorm(gen_process, f, n_samples=DEFAULT_MC_SAMPLES, rng=None):
    """``E max_t |f(t)| Z_t`` over the grid (no thinning)."""
    if isinstance(f, GridPath):
        _check_same_grid(f.grid, gen_process.grid)
        f = f.values
    a = np.abs(np.asarray(f, dtype=float))
    z = gen_process.sample(rng, n_samples)
    return MCEstimate.from_draws(kernels.row_max_scaled(z, a))


def make_grid(m=DEFAULT_GRID_SIZE):
    return uniform_grid(m)
