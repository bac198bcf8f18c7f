"""Univariate piecing-together and semiparametric high-quantile estimation.

The pieced distribution function keeps a base CDF ``F`` below a threshold
``x0`` and continues it with a GPD tail above:

    F*(x) = F(x)                               for x < x0
          = {1 - F(x0)} Q(x) + F(x0)           for x >= x0
"""
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from .errors import DomainError, InsufficientDataError

MIN_EXCEEDANCES = 30
_GAMMA_ZERO = 1e-9


def gpd_cdf(x, gamma, mu=0.0, sigma=1.0):
    """GPD distribution function with shape ``gamma``, location ``mu``, scale ``sigma``."""
    if not sigma > 0:
        raise DomainError(f"GPD scale must be positive, got {sigma}", code="invalid-parameter")
    z = (np.asarray(x, dtype=float) - mu) / sigma
    zc = np.maximum(z, 0.0)
    if abs(gamma) < _GAMMA_ZERO:
        out = -np.expm1(-zc)
    else:
        t = gamma * zc
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(t > -1.0, -np.expm1(-np.log1p(np.maximum(t, -1.0)) / gamma), 1.0)
    return np.where(z < 0, 0.0, out)


def gpd_ppf(q, gamma, mu=0.0, sigma=1.0):
    """Inverse of :func:`gpd_cdf` on ``[0, 1)``."""
    if not sigma > 0:
        raise DomainError(f"GPD scale must be positive, got {sigma}", code="invalid-parameter")
    q = np.asarray(q, dtype=float)
    if abs(gamma) < _GAMMA_ZERO:
        return mu - sigma * np.log1p(-q)
    return mu + sigma * np.expm1(-gamma * np.log1p(-q)) / gamma


def standard_gpd_params(family, alpha=None):
    """``(gamma, mu, sigma)`` of the standardized GPD families.

    ``pareto``: ``1 - x^-alpha`` on ``x >= 1``; ``beta``: ``1 - (-x)^alpha`` on
    ``[-1, 0]``; ``exponential``: ``1 - exp(-x)`` on ``x >= 0``.
    """
    if family == "exponential":
        return 0.0, 0.0, 1.0
    if alpha is None or not alpha > 0:
        raise DomainError(f"{family} GPD needs alpha > 0", code="invalid-parameter")
    if family == "pareto":
        return 1.0 / alpha, 1.0, 1.0 / alpha
    if family == "beta":
        return -1.0 / alpha, -1.0, 1.0 / alpha
    raise DomainError(f"unknown standard GPD family {family!r}", code="invalid-parameter")


class EmpiricalCDF:
    """Right-continuous step function ``F_n(x) = #{X_i <= x} / n``."""

    def __init__(self, data):
        self.sorted = np.sort(np.asarray(data, dtype=float).ravel())
        if self.sorted.size == 0 or not np.isfinite(self.sorted).all():
            raise InsufficientDataError("empirical CDF needs finite, nonempty data")

    def __call__(self, x):
        return np.searchsorted(self.sorted, x, side="right") / self.sorted.size

    def ppf(self, p):
        """Smallest data point ``x`` with ``F_n(x) >= p``."""
        n = self.sorted.size
        k = np.ceil(np.asarray(p, dtype=float) * n).astype(int) - 1
        return self.sorted[np.clip(k, 0, n - 1)]


@dataclass(frozen=True)
class UnivariatePT:
    base_cdf: Callable
    x0: float
    gamma: float
    mu: float
    sigma: float
    base_ppf: Optional[Callable] = None

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"GPD scale must be positive, got {self.sigma}", code="invalid-parameter")
        if not self.F0 < 1:
            raise DomainError(f"F(x0) = {self.F0} must be < 1")

    @property
    def F0(self):
        return float(self.base_cdf(self.x0))

    def cdf(self, x):
        return univariate_pt(self, x)

    def ppf(self, p):
        """Quantile function of ``F*``; levels at or below ``F(x0)`` use ``base_ppf``."""
        p = np.asarray(p, dtype=float)
        above = p > self.F0
        out = np.empty(p.shape)
        if above.any():
            out[above] = high_quantile(self, p[above])
        if (~above).any():
            if self.base_ppf is None:
                out[~above] = np.nan
            else:
                out[~above] = self.base_ppf(p[~above])
        return out if out.ndim else float(out)

    @classmethod
    def from_data(cls, data, x0, min_exceedances=MIN_EXCEEDANCES):
        """Empirical base CDF with a fitted GPD tail above ``x0``."""
        fit = fit_gpd_tail(data, x0, min_exceedances)
        ecdf = EmpiricalCDF(data)
        return cls(ecdf, float(x0), fit.gamma, fit.mu, fit.sigma, ecdf.ppf)


def univariate_pt(pt, x):
    """Evaluate the pieced CDF ``F*`` at ``x``."""
    x = np.asarray(x, dtype=float)
    F0 = pt.F0
    tail = (1.0 - F0) * gpd_cdf(x, pt.gamma, pt.mu, pt.sigma) + F0
    out = np.where(x < pt.x0, pt.base_cdf(x), tail)
    return out if out.ndim else float(out)


def high_quantile(pt, p):
    """Solve ``F*(x) = p`` for a level above ``F(x0)`` through the GPD tail."""
    p = np.asarray(p, dtype=float)
    F0 = pt.F0
    if (p <= F0).any() or (p >= 1).any():
        raise DomainError(
            f"level must lie in (F(x0), 1) = ({F0:.6g}, 1); use the base quantile below F(x0)",
            code="below-threshold-level",
        )
    out = gpd_ppf((p - F0) / (1.0 - F0), pt.gamma, pt.mu, pt.sigma)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class TailFit:
    gamma: float
    mu: float
    sigma: float
    method: str
    n_exceedances: int

    def as_tuple(self):
        return self.gamma, self.mu, self.sigma


def pwm_fit(excesses):
    """Probability-weighted-moment estimates ``(gamma, sigma)`` of Hosking and Wallis."""
    y = np.sort(np.asarray(excesses, dtype=float))
    n = y.size
    a0 = y.mean()
    a1 = np.sum((n - np.arange(1, n + 1)) / (n - 1.0) * y) / n
    gamma = 2.0 - a0 / (a0 - 2.0 * a1)
    sigma = 2.0 * a0 * a1 / (a0 - 2.0 * a1)
    return float(gamma), float(sigma)


def gpd_negloglik(params, excesses):
    gamma, log_sigma = params
    sigma = np.exp(log_sigma)
    y = excesses / sigma
    if gamma <= -1.0:
        return np.inf
    if abs(gamma) < _GAMMA_ZERO:
        return excesses.size * log_sigma + y.sum()
    t = 1.0 + gamma * y
    if (t <= 0).any():
        return np.inf
    return excesses.size * log_sigma + (1.0 + 1.0 / gamma) * np.log(t).sum()


def fit_gpd_tail(data, x0, min_exceedances=MIN_EXCEEDANCES):
    """Fit a GPD to the excesses over ``x0``; ``mu`` is fixed at ``x0``.

    Maximum likelihood (Nelder-Mead on ``(gamma, log sigma)``, started at the
    PWM estimates). Falls back to PWM when the optimizer fails or ends at
    ``gamma <= -1``.
    """
    data = np.asarray(data, dtype=float).ravel()
    if not np.isfinite(data).all():
        raise InsufficientDataError("data contain non-finite values")
    excesses = data[data > x0] - x0
    n_exc = int(excesses.size)
    if n_exc < min_exceedances:
        raise InsufficientDataError(
            f"{n_exc} exceedances above x0={x0}; at least {min_exceedances} required"
        )
    g0, s0 = pwm_fit(excesses)
    if not (np.isfinite(g0) and s0 > 0):
        g0, s0 = 0.1, float(excesses.mean())
    start = np.array([g0, np.log(s0)])
    if not np.isfinite(gpd_negloglik(start, excesses)):
        start = np.array([0.1, np.log(excesses.mean())])
    res = optimize.minimize(
        gpd_negloglik,
        start,
        args=(excesses,),
        method="Nelder-Mead",
        options={"xatol": 1e-8, "fatol": 1e-10, "maxiter": 4000},
    )
    gamma, log_sigma = res.x
    if res.success and np.isfinite(res.fun) and gamma > -1.0 + 1e-6:
        return TailFit(float(gamma), float(x0), float(np.exp(log_sigma)), "mle", n_exc)
    return TailFit(g0, float(x0), s0, "pwm", n_exc)
