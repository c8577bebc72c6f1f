"""Log-domain probability arithmetic.

Everything downstream works with natural-log probabilities until the output
boundary, because quantities like x**((N_B+1)*(2S-nu)) underflow doubles
long before S reaches the sizes the closed forms are meant for.
"""

from __future__ import annotations

import numpy as np

__all__ = ["log1mexp", "logsumexp_shifted", "stable_cumsum"]

_LOG_HALF = -0.6931471805599453


def log1mexp(t):
    """log(1 - exp(t)) for t <= 0, without cancellation.

    Follows the standard two-branch rule: log(-expm1(t)) near zero,
    log1p(-exp(t)) for t < -log 2.  t == 0 maps to -inf (the factor is
    exactly zero); t > 0 is a domain error.  Accepts scalars or arrays.
    """
    arr = np.asarray(t, dtype=float)
    if np.any(arr > 0.0):
        raise ValueError("log1mexp requires t <= 0")
    with np.errstate(divide="ignore"):
        out = np.where(
            arr < _LOG_HALF,
            np.log1p(-np.exp(np.minimum(arr, 0.0))),
            np.log(-np.expm1(np.maximum(arr, _LOG_HALF))),
        )
    if np.isscalar(t) or np.ndim(t) == 0:
        return float(out)
    return out


def stable_cumsum(values: np.ndarray) -> np.ndarray:
    """Cumulative sum in extended precision.

    Prefix sums of ~1e4 log factors must stay good to ~1e-12 absolute for
    the distribution normalizations; plain float64 cumsum drifts an order
    of magnitude above that.  On platforms where long double is plain
    double this degrades gracefully to the ordinary cumsum.
    """
    return np.cumsum(np.asarray(values, dtype=np.longdouble)).astype(float)


def logsumexp_shifted(logp, weights=None):
    """Sum of weights*exp(logp) computed with the max-shift trick.

    Returns the linear-domain total (not its log); -inf entries contribute
    zero.  Used for normalization checks and moments of log-stored
    distributions.
    """
    logp = np.asarray(logp, dtype=float)
    m = np.max(logp)
    if np.isneginf(m):
        return 0.0
    scaled = np.exp(logp - m)
    if weights is not None:
        scaled = scaled * np.asarray(weights, dtype=float)
    return float(np.exp(m) * np.sum(scaled))
