"""Numerically stable q-special functions in linear and log domain.

The deformation parameter throughout is x = exp(-2*pi*g**2) for a spin-boson
coupling g, so 0 < x <= 1 and x -> 1 is the weak-coupling limit.  All
cancellation-prone quantities (1 - x**k and friends) are formed from the
stored log of x via expm1, never from x itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .distribution import Distribution
from .logdomain import log1mexp, stable_cumsum

__all__ = [
    "DEFAULT_TOL",
    "QParam",
    "QBinomialDistSpec",
    "q_pochhammer",
    "log_q_pochhammer",
    "q_pochhammer_infinite",
    "log_q_pochhammer_infinite",
    "q_binomial",
    "log_q_binomial",
    "q_digamma",
    "q_binomial_distribution",
]

DEFAULT_TOL = 1e-14

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class QParam:
    """Deformation parameter x together with its exact natural log.

    log_x is stored alongside x rather than recomputed because consumers
    need k*log(x) for huge k: for couplings g ~ 1e-3 the value of x rounds
    to within a few ulp of 1 and log(x) recomputed from it would lose every
    significant digit.  x == 1 (log_x == 0) is the undeformed limit and is
    handled by analytic limits wherever a formula divides by log x.
    """

    x: float
    log_x: float

    def __post_init__(self):
        if not (0.0 <= self.x <= 1.0):
            raise ValueError(f"deformation parameter must lie in (0, 1], got {self.x}")
        if self.x == 0.0 and self.log_x > -700.0:
            # x is mathematically positive for any finite coupling; exact
            # zero is accepted only as double-precision underflow of exp
            raise ValueError("deformation parameter must be positive")
        if self.log_x > 0.0:
            raise ValueError(f"log of deformation parameter must be <= 0, got {self.log_x}")

    @classmethod
    def from_coupling(cls, g: float) -> "QParam":
        """x = exp(-2*pi*g**2); log_x is exact by construction."""
        if g < 0:
            raise ValueError(f"coupling must be >= 0, got {g}")
        log_x = -_TWO_PI * g * g
        return cls(math.exp(log_x), log_x)

    @classmethod
    def from_x(cls, x: float) -> "QParam":
        return cls(x, math.log(x))

    @property
    def is_unit(self) -> bool:
        return self.log_x == 0.0


def q_pochhammer(a: float, q: float, k: int) -> float:
    """Finite q-Pochhammer symbol (a; q)_k = prod_{i=0}^{k-1} (1 - a q^i).

    k = 0 is the empty product.  Linear-domain evaluation; use
    log_q_pochhammer when the result can underflow.
    """
    if k < 0:
        raise ValueError(f"order must be >= 0, got {k}")
    if k == 0:
        return 1.0
    return float(np.prod(1.0 - a * np.power(q, np.arange(k), dtype=float)))


def log_q_pochhammer(log_a: float, log_q: float, k: int) -> float:
    """log (a; q)_k from log a and log q.

    Each factor log(1 - exp(log_a + i*log_q)) goes through the
    cancellation-safe log1mexp path.  A factor that is exactly zero makes
    the result -inf (returned, not raised); a negative factor is a domain
    error since its log is undefined.
    """
    if k < 0:
        raise ValueError(f"order must be >= 0, got {k}")
    if log_a > 0.0 or log_q > 0.0:
        raise ValueError("log_q_pochhammer requires log_a <= 0 and log_q <= 0")
    if k == 0:
        return 0.0
    t = log_a + np.arange(k, dtype=float) * log_q
    return math.fsum(log1mexp(t))


def q_pochhammer_infinite(a: float, q: float, tol: float = DEFAULT_TOL) -> float:
    """Infinite product (a; q)_inf, truncated with a guaranteed tail bound.

    For 0 <= a < 1 and 0 < q < 1 the log of the dropped tail is bounded in
    magnitude by a*q^K / (1-q) at truncation index K, so iteration stops
    once that bound falls below tol; the relative truncation error is then
    below tol.
    """
    if tol <= 0.0:
        raise ValueError(f"tol must be > 0, got {tol}")
    if not (0.0 < q < 1.0):
        raise ValueError(f"base must lie in (0, 1), got {q}")
    if not (0.0 <= a < 1.0):
        raise ValueError(f"argument must lie in [0, 1), got {a}")
    if a == 0.0:
        return 1.0
    prod = 1.0
    term = a
    while term / (1.0 - q) > tol:
        prod *= 1.0 - term
        term *= q
    return prod


def log_q_pochhammer_infinite(log_a: float, log_q: float, tol: float = DEFAULT_TOL) -> float:
    """log (a; q)_inf with the same geometric tail bound as the linear form."""
    if tol <= 0.0:
        raise ValueError(f"tol must be > 0, got {tol}")
    if log_q >= 0.0:
        raise ValueError("log_q_pochhammer_infinite requires log_q < 0")
    if log_a > 0.0:
        raise ValueError("log_q_pochhammer_infinite requires log_a <= 0")
    one_minus_q = -math.expm1(log_q)
    total = 0.0
    t = log_a
    while math.exp(t) / one_minus_q > tol:
        total += log1mexp(t)
        t += log_q
    return total


def _log_euler_factorial(log_q: float, m: int) -> float:
    """log (q; q)_m, the q-analogue factorial building block."""
    if m == 0:
        return 0.0
    return math.fsum(log1mexp(np.arange(1, m + 1, dtype=float) * log_q))


def _log_binomial(n: int, k: int) -> float:
    return float(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1))


def log_q_binomial(n: int, k: int, x: QParam) -> float:
    """log of the Gaussian binomial coefficient [n k]_x.

    Exactly symmetric under k <-> n-k: the denominator is formed as the
    commutative sum log(x;x)_k + log(x;x)_{n-k} before subtraction.
    """
    if k < 0 or k > n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    if x.is_unit:
        return _log_binomial(n, k)
    lq = x.log_x
    return _log_euler_factorial(lq, n) - (
        _log_euler_factorial(lq, k) + _log_euler_factorial(lq, n - k)
    )


def q_binomial(n: int, k: int, x: QParam) -> float:
    """Gaussian binomial coefficient [n k]_x; ordinary binomial at x = 1."""
    if x.is_unit:
        return float(math.comb(n, k)) if 0 <= k <= n else _raise_qbinom(n, k)
    return math.exp(log_q_binomial(n, k, x))


def _raise_qbinom(n, k):
    raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")


def q_digamma(q: float, z: float, tol: float = DEFAULT_TOL) -> float:
    """q-digamma psi_q(z) = log(q) * sum_{n>=0} q^(n+z)/(1-q^(n+z)) - log(1-q).

    Convergent form only: 0 < q < 1, z > 0.  The series is summed until the
    geometric tail bound drops below tol.
    """
    if not (0.0 < q < 1.0):
        raise ValueError(f"base must lie in (0, 1), got {q}")
    if z <= 0.0:
        raise ValueError(f"argument must be > 0, got {z}")
    if tol <= 0.0:
        raise ValueError(f"tol must be > 0, got {tol}")
    log_q = math.log(q)
    # tail of sum_{n>N} q^(n+z)/(1-q^(n+z)) <= q^(N+1+z) / ((1-q^z)(1-q));
    # solve |log q| * bound <= tol for the term count, then sum vectorized.
    denom = (1.0 - q ** z) * (1.0 - q)
    n_terms = int(math.ceil((math.log(tol * denom / abs(log_q)) - z * log_q) / log_q)) + 1
    n_terms = max(n_terms, 1)
    e = np.exp((np.arange(n_terms, dtype=float) + z) * log_q)
    series = float(np.sum(e / (1.0 - e)))
    return log_q * series - math.log1p(-q)


@dataclass(frozen=True)
class QBinomialDistSpec:
    """Parameters of the q-deformed binomial distribution B_k^n(tau; q).

    Optional log_tau/log_q let callers that know the logs exactly (e.g.
    tau = x**m with known log x) bypass the roundtrip through the linear
    values.
    """

    n: int
    tau: float
    q: float
    log_tau: float | None = None
    log_q: float | None = None

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"trial count must be >= 0, got {self.n}")
        if not (0.0 < self.tau <= 1.0):
            raise ValueError(f"tau must lie in (0, 1], got {self.tau}")
        if not (0.0 < self.q <= 1.0):
            raise ValueError(f"q must lie in (0, 1], got {self.q}")
        if self.log_tau is None:
            object.__setattr__(self, "log_tau", math.log(self.tau))
        if self.log_q is None:
            object.__setattr__(self, "log_q", math.log(self.q))


def q_binomial_distribution(spec: QBinomialDistSpec) -> Distribution:
    """Full q-deformed binomial distribution over k = 0..n.

    B_k^n(tau; q) = [n k]_q tau^k (tau; q)_{n-k}, evaluated in log domain
    with O(n) prefix sums so that n ~ 1e4 stays exact to ~1e-12 in the
    normalization.  q = 1 reduces to the ordinary binomial(n, tau).
    """
    n, log_tau, log_q = spec.n, spec.log_tau, spec.log_q
    k = np.arange(n + 1)
    if log_q == 0.0:
        if log_tau == 0.0:
            logp = np.full(n + 1, -np.inf)
            logp[n] = 0.0
        else:
            log1m_tau = log1mexp(log_tau)
            logp = (
                gammaln(n + 1)
                - gammaln(k + 1)
                - gammaln(n - k + 1)
                + k * log_tau
                + (n - k) * log1m_tau
            )
        return Distribution(logp, process="q-binomial", params=spec)

    # log (q;q)_m and log (tau;q)_m prefix tables, m = 0..n
    with np.errstate(invalid="ignore"):
        cum_qq = np.concatenate(
            ([0.0], stable_cumsum(log1mexp(np.arange(1, n + 1, dtype=float) * log_q)))
        )
        cum_tau = np.concatenate(
            ([0.0], stable_cumsum(log1mexp(log_tau + np.arange(n, dtype=float) * log_q)))
        )
    log_qbinom = cum_qq[n] - cum_qq[k] - cum_qq[n - k]
    logp = log_qbinom + k * log_tau + cum_tau[n - k]
    return Distribution(logp, process="q-binomial", params=spec)
