"""Statistical checks with pass/fail reports.

Two-sided Monte Carlo comparisons use bands of four combined standard
errors; uniformity is tested with the Kolmogorov-Smirnov statistic at level
``alpha = 0.01``. Every check is reproducible from its ``(seed, n, config)``.
"""
import json
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy import stats

from . import kernels
from .errors import ConfigurationError, DomainError, InsufficientDataError
from .functional import (
    FunctionalPTConfig,
    GridPath,
    functional_dnorm,
    functional_pt_sample,
    functional_thinned_dnorm,
    sample_gpp,
)
from .gpd_copula import GpdCopulaModel, sample_gpd_copula
from .pt import _threshold, piece_together
from .rng import stream

N_SE = 4.0
KS_ALPHA = 0.01
MIN_KS_SAMPLES = 1000


@dataclass
class CheckReport:
    """Outcome of one check: ``passed`` iff ``statistic`` is within ``band``.

    For KS checks ``statistic`` is the KS distance and ``band`` the critical
    value (pass iff ``statistic <= band``). For pointwise agreement checks
    ``statistic`` is the fraction of points inside their 4-SE band and
    ``band`` the required fraction (pass iff ``statistic >= band``).
    """

    name: str
    statistic: float
    band: float
    passed: bool
    n_used: int
    seed: Optional[int] = None
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return _plain(asdict(self))

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.name}: statistic={self.statistic:.6g} band={self.band:.6g} n={self.n_used}"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def reports_to_json(reports):
    """Serialize reports to a deterministic JSON document."""
    doc = {
        "passed": all(r.passed for r in reports),
        "reports": [r.to_dict() for r in reports],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# -- uniformity ----------------------------------------------------------------


def ks_uniform(x, alpha=KS_ALPHA):
    """KS distance of ``x`` from uniform(0, 1) and the level-``alpha`` critical value."""
    x = np.asarray(x, dtype=float).ravel()
    stat = stats.kstest(x, "uniform").statistic
    return float(stat), float(stats.kstwo.ppf(1.0 - alpha, x.size))


def margin_uniformity(samples, alpha=KS_ALPHA, name="margin", seed=None):
    """One KS report per column of ``samples`` (matrix or :class:`GridPath`)."""
    if isinstance(samples, GridPath):
        samples = samples.paths
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    n = samples.shape[0]
    if n < MIN_KS_SAMPLES:
        raise InsufficientDataError(f"uniformity check needs >= {MIN_KS_SAMPLES} samples, got {n}")
    reports = []
    for j in range(samples.shape[1]):
        stat, crit = ks_uniform(samples[:, j], alpha)
        reports.append(CheckReport(f"{name}[{j}]", stat, crit, stat <= crit, n, seed, {"alpha": alpha}))
    return reports


# -- pointwise CDF agreement -------------------------------------------------------


def cdf_agreement(samples, points, targets, name, min_pass_fraction=1.0, seed=None):
    """Compare empirical ``P(X <= x)`` with target values at each point.

    ``targets`` are :class:`~ptcopula.dnorm.MCEstimate`-like objects (``value``
    and ``std_error``). The band at each point is four times
    ``sqrt(p(1-p)/n + se_target^2)`` with ``p`` the target value.
    """
    if isinstance(samples, GridPath):
        samples = samples.paths
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    points = np.atleast_2d(np.asarray(points, dtype=float))
    n = samples.shape[0]
    emp = kernels.count_dominated(samples, points) / n
    tv = np.array([t.value for t in targets], dtype=float)
    tse = np.array([t.std_error for t in targets], dtype=float)
    p = np.clip(tv, 0.0, 1.0)
    se = np.sqrt(p * (1.0 - p) / n + tse ** 2)
    diff = emp - tv
    ok = np.abs(diff) <= N_SE * se
    frac = float(ok.mean())
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, diff / se, np.where(diff == 0, 0.0, np.inf))
    details = {
        "points": points,
        "empirical": emp,
        "target": tv,
        "target_se": tse,
        "band_se": se,
        "point_pass": ok,
        "max_abs_z": float(np.max(np.abs(z))),
    }
    return CheckReport(name, frac, min_pass_fraction, frac >= min_pass_fraction, n, seed, details)


def upper_tail_agreement(samples, norm_evaluator, x_grid, exact_region=None, seed=0,
                         min_pass_fraction=0.95, name="upper_tail"):
    """Empirical CDF against ``1 - ||x - 1||`` on points near one.

    ``norm_evaluator(offset, rng)`` returns an estimate of the tail D-norm at
    ``offset = x - 1``; point ``k`` is evaluated on stream ``(seed, k)``.
    """
    x_grid = np.atleast_2d(np.asarray(x_grid, dtype=float))
    if exact_region is not None:
        corner = np.broadcast_to(np.asarray(exact_region, dtype=float), x_grid.shape[1:])
        if (corner >= 1.0).all():
            raise ConfigurationError("the exact GPD region is empty")
        if (x_grid < corner).any():
            raise DomainError(f"grid points fall below the exact region corner {corner}")
    targets = []
    for k, x in enumerate(x_grid):
        est = norm_evaluator(x - 1.0, stream(seed, k))
        targets.append(_Target(1.0 - est.value, est.std_error))
    return cdf_agreement(samples, x_grid, targets, name, min_pass_fraction, seed)


def lower_region_agreement(samples, copula_cdf, x_grid, seed=None, name="lower_region"):
    """Empirical CDF against the given copula's CDF on ``[0, u]``."""
    x_grid = np.atleast_2d(np.asarray(x_grid, dtype=float))
    targets = [_Target(float(copula_cdf(x)), 0.0) for x in x_grid]
    return cdf_agreement(samples, x_grid, targets, name, 1.0, seed)


@dataclass(frozen=True)
class _Target:
    value: float
    std_error: float


# -- POT conditional agreement -------------------------------------------------------


def pot_conditional_agreement(copula, gen, u, v_grid, n=100_000, seed=0, exact=True, M=None,
                              name="pot_conditional"):
    """Compare ``P(U > v)`` with ``P(Y_j > u_j + v_j (1 - u_j) for all j | U > u)``.

    ``U`` follows ``copula``; ``Y`` is the PT vector built from an independent
    copy of ``U`` and a GPD-copula with generator ``gen``. Both sides are
    estimated on separate streams ``(seed, 0)`` and ``(seed, 1)`` and compared
    with a pooled two-proportion band.

    With ``exact=True`` (``copula`` is the GPD-copula of ``gen``) every point
    must agree within four standard errors. Otherwise the discrepancy is only
    monitored: the report passes iff the absolute discrepancy does not grow
    as ``v`` approaches one.
    """
    u = _threshold(u, copula.dim)
    v_grid = np.atleast_2d(np.asarray(v_grid, dtype=float))
    gpd = GpdCopulaModel(gen, M)

    U = copula.sample(stream(seed, 0), n)
    lhs = kernels.count_exceeding(U, v_grid) / n

    rng = stream(seed, 1)
    U2 = copula.sample(rng, n)
    V = sample_gpd_copula(gpd, rng, n)
    Y = piece_together(U2, V, u)
    cond = np.all(U2 > u, axis=1)
    m = int(cond.sum())
    if m == 0:
        raise InsufficientDataError(
            f"no joint exceedance of u={u} among {n} draws; increase n", code="increase-n"
        )
    rhs = kernels.count_exceeding(Y[cond], u + v_grid * (1.0 - u)) / m

    pooled = (lhs * n + rhs * m) / (n + m)
    se = np.sqrt(pooled * (1.0 - pooled) * (1.0 / n + 1.0 / m))
    diff = lhs - rhs
    ok = np.abs(diff) <= N_SE * se
    details = {
        "v_grid": v_grid,
        "lhs": lhs,
        "rhs": rhs,
        "band_se": se,
        "point_pass": ok,
        "n_conditional": m,
        "asserted": bool(exact),
    }
    if exact:
        frac = float(ok.mean())
        return CheckReport(name, frac, 1.0, frac >= 1.0, n, seed, details)
    order = np.argsort(-np.max(1.0 - v_grid, axis=1), kind="stable")
    disc = np.abs(diff)[order]
    details["discrepancy_toward_one"] = disc
    trend = bool(np.all(np.diff(disc) <= N_SE * se[order][1:]))
    return CheckReport(name, float(disc[-1]), float(disc[0]), trend, n, seed, details)


# -- functional checks ------------------------------------------------------------------


def gpp_lower_tail_agreement(gen_process, M, test_functions, n=100_000, seed=0, n_norm=100_000,
                             name="gpp_lower_tail"):
    """``P(V <= f)`` against ``1 - E max_t |f(t)| Z_t`` for GPP paths."""
    V = sample_gpp(gen_process, M, stream(seed, 0), n)
    fs = np.atleast_2d(np.asarray(test_functions, dtype=float))
    targets = []
    for k, f in enumerate(fs):
        est = functional_dnorm(gen_process, f, n_norm, stream(seed, 1, k))
        targets.append(_Target(1.0 - est.value, est.std_error))
    return cdf_agreement(V, fs, targets, name, 1.0, seed)


def functional_tail_agreement(config: FunctionalPTConfig, test_functions, n=100_000, seed=0,
                              n_norm=100_000, name="functional_tail"):
    """PT-process path CDF at ``1 + f`` against ``1 - ||f||`` (thinned norm)."""
    fs = np.atleast_2d(np.asarray(test_functions, dtype=float))
    bound = config.tail_bound()
    if (np.abs(fs).max(axis=1) >= bound).any() or (fs > 0).any():
        raise DomainError(f"test functions must be nonpositive with sup-norm < {bound:.6g}")
    Y = functional_pt_sample(config, stream(seed, 0), n)
    targets = []
    for k, f in enumerate(fs):
        est = functional_thinned_dnorm(
            config.gen_process, config.copula_process, config.u, f, n_norm, stream(seed, 1, k)
        )
        targets.append(_Target(1.0 - est.value, est.std_error))
    return cdf_agreement(Y, 1.0 + fs, targets, name, 1.0, seed)
