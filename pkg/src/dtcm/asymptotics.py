"""Continuous, Gaussian, and strong-coupling limits of the exact solution.

All approximations here are restricted to N_B = 0 and 0 < x < 1.  Continuous
curves are normalized by the discrete sum over integer nu in 0..2S (the
comparisons that matter are against the discrete exact points, and the
normalization convention is otherwise open).  Regime thresholds such as
g vs 1/(2S) are advisory; formulas are evaluated wherever their arithmetic
is defined so that their breakdown outside the intended regime is visible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .distribution import Distribution
from .exact import ModelParams
from .logdomain import log1mexp, stable_cumsum
from .qspecial import DEFAULT_TOL, log_q_pochhammer_infinite, q_pochhammer_infinite

__all__ = [
    "ContinuousCurve",
    "GaussianSummary",
    "forward_continuous",
    "forward_continuous_curve",
    "forward_continuous_log_derivative",
    "forward_ode_rhs",
    "forward_gaussian",
    "inverse_continuous",
    "inverse_continuous_curve",
    "inverse_ode_rhs",
    "inverse_gaussian",
    "forward_largeg_euler",
    "euler_offset_mean",
    "forward_largeg_mean",
    "euler_truncated_tail",
    "inverse_largeg",
    "comparison_altland_forward",
    "comparison_itin_forward",
    "comparison_inverse_linear",
    "coupling_regime",
    "EULER_GAMMA",
]

EULER_GAMMA = 0.5772156649015329


def _require_continuum(params: ModelParams) -> None:
    if params.nb != 0:
        raise ValueError("continuum approximations are defined for N_B = 0 only")
    if params.g == 0.0:
        raise ValueError("continuum approximations require g > 0 (x < 1)")


def coupling_regime(params: ModelParams) -> str:
    """Advisory regime label: 'weak' below g = 1/(2S), 'strong' above."""
    return "weak" if params.g < 1.0 / params.two_s else "strong"


@dataclass(frozen=True)
class ContinuousCurve:
    """Unnormalized log-density over real nu plus its discrete normalizer."""

    two_s: int
    process: str
    _log_unnormalized: object
    log_norm: float

    def log_density(self, nu):
        return self._log_unnormalized(np.asarray(nu, dtype=float)) - self.log_norm

    def density(self, nu):
        out = np.exp(self.log_density(nu))
        return float(out) if np.ndim(nu) == 0 else out

    def grid(self) -> np.ndarray:
        """Normalized density sampled on the integers 0..2S."""
        return np.exp(self.log_density(np.arange(self.two_s + 1, dtype=float)))

    def argmax(self) -> int:
        return int(np.argmax(self.log_density(np.arange(self.two_s + 1, dtype=float))))


def _normalize(two_s: int, process: str, log_unnormalized) -> ContinuousCurve:
    values = log_unnormalized(np.arange(two_s + 1, dtype=float))
    m = float(np.max(values))
    log_norm = m + math.log(float(np.sum(np.exp(values - m))))
    return ContinuousCurve(two_s, process, log_unnormalized, log_norm)


@dataclass(frozen=True)
class GaussianSummary:
    """Mean and variance of a Gaussian fit, reported unclipped.

    within_domain flags whether the mean landed inside [0, 2S]; a mean
    outside the physical range is the diagnostic that the fit has hit a
    boundary, so it is never clipped away.
    """

    mean: float
    variance: float
    process: str
    within_domain: bool

    def density(self, nu):
        sigma2 = self.variance
        return np.exp(-((np.asarray(nu, dtype=float) - self.mean) ** 2) / (2.0 * sigma2)) / math.sqrt(
            2.0 * math.pi * sigma2
        )


# ---------------------------------------------------------------------------
# forward process, continuous and Gaussian limits
# ---------------------------------------------------------------------------


@lru_cache(maxsize=128)
def forward_continuous_curve(params: ModelParams) -> ContinuousCurve:
    """Continuous approximation of the forward distribution.

    log-density nu * 2(1-x)/(1+x) - 4x/((1+x) log x) * log(1+x - x**(2S+1/2-nu)),
    normalized over the integer grid.  Apart from normalization the shape
    does not depend on S.
    """
    _require_continuum(params)
    x, lx = params.x.x, params.x.log_x
    two_s = params.two_s
    slope = 2.0 * (1.0 - x) / (1.0 + x)
    power = -4.0 * x / ((1.0 + x) * lx)

    def log_unnormalized(nu):
        return slope * nu + power * np.log(1.0 + x - np.exp((two_s + 0.5 - nu) * lx))

    return _normalize(two_s, "forward-continuous", log_unnormalized)


def forward_continuous(params: ModelParams, nu: float) -> float:
    """Normalized continuous forward density at real nu."""
    return float(forward_continuous_curve(params).density(nu))


def forward_continuous_log_derivative(params: ModelParams, nu: float) -> float:
    """d/dnu of the continuous forward log-density (analytic)."""
    _require_continuum(params)
    x, lx = params.x.x, params.x.log_x
    two_s = params.two_s
    slope = 2.0 * (1.0 - x) / (1.0 + x)
    power = -4.0 * x / ((1.0 + x) * lx)
    xp = math.exp((two_s + 0.5 - nu) * lx)
    return slope + power * xp * lx / (1.0 + x - xp)


def forward_ode_rhs(params: ModelParams, nu: float) -> float:
    """Log-derivative the continuous forward curve must satisfy at nu.

    Continuum form of the exact one-step recursion: in the flipped index
    f = 2S - nu the midpoint rule reads dlogP/df at f + 1/2 equal to
    2*(2x/(x + 1 - x**(f+1)) - 1); here it is mapped back to nu.
    """
    _require_continuum(params)
    x, lx = params.x.x, params.x.log_x
    xp = math.exp((params.two_s + 0.5 - nu) * lx)
    return -2.0 * (2.0 * x / (x + 1.0 - xp) - 1.0)


def forward_gaussian(params: ModelParams) -> GaussianSummary:
    """Gaussian fit of the forward distribution (known to be crude).

    mean = 2S - log(1-x)/log x, variance = -x/((1-x) log x).  The underlying
    distribution is broad and asymmetric, so this is offered for comparison
    rather than accuracy.
    """
    _require_continuum(params)
    lx = params.x.log_x
    x = params.x.x
    mean = params.two_s - log1mexp(lx) / lx
    variance = -x / ((-math.expm1(lx)) * lx)
    return GaussianSummary(mean, variance, "forward", 0.0 <= mean <= params.two_s)


# ---------------------------------------------------------------------------
# inverse process, continuous and Gaussian limits
# ---------------------------------------------------------------------------


def _inverse_radicand(params: ModelParams) -> float:
    x = params.x.x
    two_s = params.two_s
    return 4.0 - 4.0 * x ** (two_s + 1) - x ** (2 * two_s + 1)


@lru_cache(maxsize=128)
def inverse_continuous_curve(params: ModelParams) -> ContinuousCurve:
    """Closed-form solution of the continuum limit of the inverse recursion.

    An exponential-of-arctan factor times a power of the quadratic
    1 - x**(nu+2S+1/2) + x**(2 nu) - 2 x**(nu+1/2) + x**(2 nu + 1);
    requires the radicand 4 - 4x**(2S+1) - x**(4S+1) to be positive, which
    fails once x**(2S+1) exceeds sqrt(5) - 2 (small S at weak coupling).
    """
    _require_continuum(params)
    x, lx = params.x.x, params.x.log_x
    two_s = params.two_s
    radicand = _inverse_radicand(params)
    if radicand <= 0.0:
        raise ValueError(
            "inverse continuous solution undefined: 4 - 4x^(2S+1) - x^(4S+1) = "
            f"{radicand} is not positive at g={params.g}, 2S={two_s}"
        )
    root = math.sqrt(radicand)
    sx = math.sqrt(x)
    c = x ** (two_s + 0.5)
    arctan_scale = 4.0 * (c + 2.0 * c * x - 2.0 * sx) / ((1.0 + x) * root * lx)
    power = 2.0 / ((1.0 + x) * lx)

    def log_unnormalized(nu):
        w = np.exp(nu * lx)
        arg = (c - 2.0 * w * x - 2.0 * w + 2.0 * sx) / root
        base = 1.0 - w * c + w * w - 2.0 * w * sx + w * w * x
        return -2.0 * nu + arctan_scale * np.arctan(arg) + power * np.log(base)

    return _normalize(two_s, "inverse-continuous", log_unnormalized)


def inverse_continuous(params: ModelParams, nu: float) -> float:
    """Normalized continuous inverse density at real nu."""
    return float(inverse_continuous_curve(params).density(nu))


def inverse_ode_rhs(params: ModelParams, nu: float) -> float:
    """Log-derivative of the continuous inverse curve at midpoint nu + 1/2.

    Continuum form of the exact inverse recursion ratio
    (x**(2 nu + 1) - x**(2S + nu + 1)) / (1 - x**(nu+1))**2.
    """
    _require_continuum(params)
    x = params.x.x
    two_s = params.two_s
    r = x ** (2 * nu + 1) - x ** (two_s + nu + 1)
    q = 1.0 - x ** (nu + 1)
    return 2.0 * (2.0 * r / (r + q * q) - 1.0)


def inverse_gaussian(params: ModelParams) -> GaussianSummary:
    """Gaussian fit of the inverse distribution (accurate over a wide range).

    mean = -log(2 - x**2S)/log x, variance = -(1-x**2S)**2/((2-x**2S)**2 log x).
    """
    _require_continuum(params)
    lx = params.x.log_x
    u = math.exp(params.two_s * lx)
    mean = -math.log(2.0 - u) / lx
    variance = -((1.0 - u) ** 2) / (((2.0 - u) ** 2) * lx)
    return GaussianSummary(mean, variance, "inverse", 0.0 <= mean <= params.two_s)


# ---------------------------------------------------------------------------
# strong-coupling limits
# ---------------------------------------------------------------------------


def forward_largeg_euler(params: ModelParams, tol: float = DEFAULT_TOL) -> Distribution:
    """Euler-distribution limit of the forward process, over nu.

    In the flipped index f = 2S - nu the forward distribution tends to the
    Euler distribution x**f (x; x)_inf / (x; x)_f on f >= 0; here it is cut
    at f = 2S and renormalized.  The dropped mass is exponentially small in
    the intended regime g > 1/(2S) (see euler_truncated_tail).
    """
    _require_continuum(params)
    lx = params.x.log_x
    two_s = params.two_s
    log_inf = log_q_pochhammer_infinite(lx, lx, tol)
    f = np.arange(two_s + 1, dtype=float)
    cum = np.concatenate(([0.0], stable_cumsum(log1mexp(np.arange(1, two_s + 1, dtype=float) * lx))))
    log_over_f = f * lx + log_inf - cum
    m = float(np.max(log_over_f))
    log_total = m + math.log(float(np.sum(np.exp(log_over_f - m))))
    logp = (log_over_f - log_total)[::-1].copy()
    return Distribution(logp, process="forward-largeg", params=params)


def euler_truncated_tail(params: ModelParams, tol: float = DEFAULT_TOL) -> float:
    """Euler-distribution mass beyond the physical cut f = 2S."""
    _require_continuum(params)
    lx = params.x.log_x
    two_s = params.two_s
    log_inf = log_q_pochhammer_infinite(lx, lx, tol)
    f = np.arange(two_s + 1, dtype=float)
    cum = np.concatenate(([0.0], stable_cumsum(log1mexp(np.arange(1, two_s + 1, dtype=float) * lx))))
    kept = float(np.sum(np.exp(f * lx + log_inf - cum)))
    return 1.0 - kept


def euler_offset_mean(params: ModelParams, tol: float = DEFAULT_TOL) -> float:
    """Mean of the untruncated Euler distribution, sum_{j>=1} 1/(x**-j - 1).

    Summed directly as sum x**j/(1 - x**j) with the geometric tail bound
    x**(J+1)/(1-x)**2 <= tol; this sidesteps the base-greater-than-one
    continuation question for the q-digamma restatement of the same number.
    """
    _require_continuum(params)
    x = params.x.x
    bound = (1.0 - x) ** 2
    total = 0.0
    j = 1
    xj = x
    while xj / bound > tol:
        total += xj / (1.0 - xj)
        j += 1
        xj = math.exp(j * params.x.log_x)
    return total


def forward_largeg_mean(params: ModelParams, tol: float = DEFAULT_TOL) -> float:
    """Mean boson yield of the forward process in the strong-coupling limit,
    2S minus the untruncated Euler mean."""
    return params.two_s - euler_offset_mean(params, tol)


def inverse_largeg(params: ModelParams, nu: int) -> float:
    """Strong-coupling limit of the inverse distribution at nu.

    x**(nu**2) (x; x)_inf / ((x; x)_nu)**2, valid where the surviving boson
    number is of order one.
    """
    _require_continuum(params)
    x, lx = params.x.x, params.x.log_x
    log_inf = log_q_pochhammer_infinite(lx, lx)
    log_poch = float(np.sum(log1mexp(np.arange(1, nu + 1, dtype=float) * lx))) if nu else 0.0
    return math.exp(nu * nu * lx + log_inf - 2.0 * log_poch)


# ---------------------------------------------------------------------------
# prior-literature comparison formulas
# ---------------------------------------------------------------------------


def comparison_altland_forward(params: ModelParams) -> float:
    """Kinetic-theory estimate of the forward boson yield, weak coupling.

    n_b = 2S (x**-2S - 1) / (x**-2S + 2S), evaluated in the overflow-free
    form 2S (1 - x**2S) / (1 + 2S x**2S); intended for g < 1/(2S).
    """
    _require_continuum(params)
    two_s = params.two_s
    u = math.exp(two_s * params.x.log_x)
    return two_s * (-math.expm1(two_s * params.x.log_x)) / (1.0 + two_s * u)


def comparison_itin_forward(params: ModelParams) -> float:
    """Painleve-II asymptotics for the forward boson yield, strong coupling.

    n_b = 2S - (log(-log x) - gamma)/log x; intended for g > 1/(2S).
    """
    _require_continuum(params)
    lx = params.x.log_x
    return params.two_s - (math.log(-lx) - EULER_GAMMA) / lx


def comparison_inverse_linear(params: ModelParams) -> float:
    """Surviving boson number of the inverse process, linear in 1/g**2.

    n_b = log 2 / (2 pi g**2) = -log 2 / log x, the x**2S -> 0 limit of the
    inverse Gaussian mean.
    """
    _require_continuum(params)
    return -math.log(2.0) / params.x.log_x
