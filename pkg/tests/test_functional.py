import io

import numpy as np
import pytest

from ptcopula.copulas import IndependenceCopula
from ptcopula.errors import ConfigurationError, DimensionError, DomainError
from ptcopula.functional import (
    ComonotoneCopulaProcess,
    FunctionalPTConfig,
    GaussianCopulaProcess,
    GPCopulaProcess,
    GridPath,
    functional_dnorm,
    functional_pt_sample,
    functional_thinned_dnorm,
    make_grid,
    sample_gpcp,
    sample_gpp,
)
from ptcopula.generators import (
    coin_atoms,
    constant_generator_process,
    hat_basis,
    linear_basis,
    make_basis_generator_process,
    make_constant_generator,
    uniform_atoms,
    uniform_grid,
)
from ptcopula.gpd_copula import GpdCopulaModel
from ptcopula.pt import thinned_dnorm
from ptcopula.rng import stream
from ptcopula.verification import ks_uniform

N = 100_000


def hat_process(m=50, atoms=coin_atoms):
    grid = uniform_grid(m)
    return make_basis_generator_process(hat_basis(5, grid), atoms(), grid)


class TestGridPath:
    def test_shape_check(self):
        with pytest.raises(DimensionError):
            GridPath(uniform_grid(3), np.zeros(3))

    def test_unsorted(self):
        with pytest.raises(DimensionError):
            GridPath([0.0, 0.7, 0.5, 1.0], np.zeros(4))

    def test_csv(self):
        p = GridPath([0.0, 1.0], [[0.1, 0.2], [0.3, 1 / 3]])
        buf = io.StringIO()
        p.to_csv(buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "path,t,value"
        assert lines[-1] == "1,1,0.33333333333333331"
        assert len(lines) == 5

    def test_default_grid(self):
        g = make_grid()
        assert g.size == 51 and g[0] == 0 and g[-1] == 1


class TestGPP:
    def test_constant_path(self):
        gp = constant_generator_process(uniform_grid(10))
        v = sample_gpp(gp, -1.0, stream(0), 1).paths[0]
        U = stream(0).random(1)[0]
        np.testing.assert_allclose(v, -U)

    def test_values_in_range(self):
        gp = hat_process()
        v = sample_gpp(gp, -0.5, stream(1), 1000).paths
        assert (v >= -0.5).all() and (v < 0).all()

    def test_marginal_identity(self):
        gp = hat_process()
        v = sample_gpp(gp, -0.5, stream(2), N).paths[:, 25]
        p = (v <= -0.3).mean()
        assert abs(p - 0.7) <= 4 * np.sqrt(0.21 / N)

    def test_lower_tail_identity(self):
        gp = hat_process()
        grid = gp.grid
        fs = [np.full(grid.size, -0.3), -0.4 * np.sin(np.pi * grid), -0.2 - 0.2 * grid,
              -0.45 * (1 - np.abs(2 * grid - 1)), np.full(grid.size, -0.05)]
        V = sample_gpp(gp, -0.5, stream(3, 0), N).paths
        for k, f in enumerate(fs):
            est = functional_dnorm(gp, f, N, stream(3, 1, k))
            p = 1 - est.value
            emp = np.all(V <= f, axis=1).mean()
            assert abs(emp - p) <= 4 * np.sqrt(p * (1 - p) / N + est.std_error ** 2)

    def test_positive_M(self):
        with pytest.raises(ConfigurationError):
            sample_gpp(hat_process(), 0.1, stream(0), 5)


class TestGPCP:
    def test_shared_xi(self):
        q, mask, xi = sample_gpcp(hat_process(), -0.5, stream(4), 2000, return_details=True)
        rows, cols = np.nonzero(mask)
        assert rows.size > 0
        np.testing.assert_array_equal(q.paths[rows, cols], xi[rows] + 1.0)

    def test_unclipped_unchanged(self):
        gp = hat_process()
        q, mask, _ = sample_gpcp(gp, -0.5, stream(5), 200, return_details=True)
        v = sample_gpp(gp, -0.5, stream(5), 200).paths
        np.testing.assert_array_equal(q.paths[~mask], v[~mask] + 1.0)

    def test_margins_uniform_below_region(self):
        q = sample_gpcp(hat_process(), -0.5, stream(6), N).paths
        for t in (0, 17, 50):
            p = (q[:, t] <= 0.25).mean()
            assert abs(p - 0.25) <= 4 * np.sqrt(0.25 * 0.75 / N)
            stat, crit = ks_uniform(q[:, t])
            assert stat <= crit

    def test_invalid_clipping(self):
        gp = constant_generator_process(uniform_grid(5))
        with pytest.raises(ConfigurationError) as exc:
            sample_gpcp(gp, -1.0, stream(0), 5)
        assert exc.value.code == "invalid-clipping"


class TestFunctionalPT:
    def config(self, cp=None, u=0.5):
        gp = hat_process()
        cp = cp or GaussianCopulaProcess(gp.grid)
        return FunctionalPTConfig(cp, gp, u, -0.5)

    def test_tail_bound(self):
        cfg = self.config()
        assert cfg.K == -0.5 and cfg.tail_bound() == pytest.approx(0.25)

    def test_below_threshold_unchanged(self):
        cfg = self.config()
        rng = stream(7)
        y = functional_pt_sample(cfg, rng, 500).paths
        U = cfg.copula_process.sample(stream(7), 500)
        low = U <= 0.5
        np.testing.assert_array_equal(y[low], U[low])

    def test_margins(self):
        y = functional_pt_sample(self.config(), stream(8), N).paths
        for t in (0, 10, 25, 40, 50):
            stat, crit = ks_uniform(y[:, t])
            assert stat <= crit

    def test_gaussian_process_margins(self):
        U = GaussianCopulaProcess(uniform_grid(20), 0.1).sample(stream(9), N)
        for t in (0, 10, 20):
            stat, crit = ks_uniform(U[:, t])
            assert stat <= crit

    def test_grid_mismatch(self):
        gp = hat_process()
        with pytest.raises(DimensionError):
            FunctionalPTConfig(ComonotoneCopulaProcess(uniform_grid(10)), gp, 0.5)

    def test_bad_threshold(self):
        gp = hat_process()
        with pytest.raises(DomainError):
            FunctionalPTConfig(ComonotoneCopulaProcess(gp.grid), gp, 1.0)

    def test_gpcp_as_copula_process(self):
        gp = hat_process(20)
        cfg = FunctionalPTConfig(GPCopulaProcess(gp, -0.5), gp, 0.6)
        y = functional_pt_sample(cfg, stream(10), 20_000).paths
        stat, crit = ks_uniform(y[:, 7])
        assert stat <= crit


class TestFunctionalThinnedNorm:
    def test_comonotone_constant(self):
        grid = uniform_grid(10)
        est = functional_thinned_dnorm(constant_generator_process(grid), ComonotoneCopulaProcess(grid),
                                       0.5, -np.ones(grid.size), N, stream(11))
        assert abs(est.value - 1.0) <= 4 * est.std_error

    def test_zero_function(self):
        gp = hat_process()
        est = functional_thinned_dnorm(gp, GaussianCopulaProcess(gp.grid), 0.5, np.zeros(51), 1000, stream(0))
        assert est.value == 0.0

    def test_one_point_grid_matches_multivariate(self):
        grid = np.array([0.5])
        gp = make_basis_generator_process(np.ones((1, 1)), uniform_atoms(), grid)
        cp = ComonotoneCopulaProcess(grid)
        f = GridPath(grid, [-0.7])
        a = functional_thinned_dnorm(gp, cp, 0.4, f, 5000, stream(12))
        b = thinned_dnorm(gp.at_points([0]), cp.at_points([0]), [0.4], [-0.7], 5000, stream(12))
        assert a.value == b.value and a.std_error == b.std_error

    def test_grid_mismatch(self):
        gp = hat_process()
        with pytest.raises(DimensionError):
            functional_thinned_dnorm(gp, ComonotoneCopulaProcess(uniform_grid(5)), 0.5, np.zeros(51), 10, stream(0))

    def test_thinned_process_unit_mean(self):
        gp = hat_process()
        cp = GaussianCopulaProcess(gp.grid)
        z = gp.sample(stream(13), N)
        U = cp.sample(stream(13, 1), N)
        zt = z * (U > 0.5) / 0.5
        band = 4 * gp.bound / (0.5 * np.sqrt(N))
        assert np.all(np.abs(zt.mean(axis=0) - 1) <= band)

    def test_refinement_drift(self):
        f = lambda g: -0.2 * (1 - np.abs(2 * g - 1))
        ests = []
        # Both grids contain the hat knots; coarser grids that miss them are biased low.
        for m in (50, 100):
            gp = hat_process(m)
            ests.append(functional_thinned_dnorm(gp, GaussianCopulaProcess(gp.grid), 0.5, f(gp.grid), N,
                                                 stream(14, m)))
        assert abs(ests[0].value - ests[1].value) <= 4 * np.hypot(ests[0].std_error, ests[1].std_error)


class TestProjection:
    def test_two_point_projection_is_multivariate(self):
        gp = make_basis_generator_process(linear_basis(uniform_grid(1)), coin_atoms(), uniform_grid(1))
        V = sample_gpp(gp, -0.5, stream(15), 1000).paths
        from ptcopula.gpd_copula import gpp_transform, sample_generator  # noqa: F401
        rng = stream(15)
        U = rng.random(1000)
        z = gp.sample(rng, 1000)
        np.testing.assert_array_equal(V, gpp_transform(z, U, -0.5))

    def test_independence_copula_dims(self):
        assert IndependenceCopula(2).dim == 2 and make_constant_generator(2).dim == 2
        assert GpdCopulaModel(make_constant_generator(2)).dim == 2
