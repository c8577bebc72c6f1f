"""Discrete probability distributions stored as log-probabilities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .logdomain import logsumexp_shifted

__all__ = ["Distribution"]


@dataclass
class Distribution:
    """Probabilities over an integer index 0..n, kept in log domain.

    Entries are finite or -inf, never NaN.  Moments are taken by direct
    summation over the support (max-shifted, so a distribution whose
    largest weight is far below 1 in linear domain still sums cleanly).
    """

    logp: np.ndarray
    process: str = ""
    params: object = None

    def __post_init__(self):
        self.logp = np.asarray(self.logp, dtype=float)
        if self.logp.ndim != 1 or self.logp.size == 0:
            raise ValueError("log-probability vector must be one-dimensional and non-empty")
        if np.any(np.isnan(self.logp)) or np.any(np.isposinf(self.logp)):
            raise ValueError("log probabilities must be finite or -inf")

    def __len__(self) -> int:
        return self.logp.size

    def __getitem__(self, nu: int) -> float:
        return float(np.exp(self.logp[nu]))

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.logp.size)

    def probabilities(self) -> np.ndarray:
        return np.exp(self.logp)

    def total(self) -> float:
        return logsumexp_shifted(self.logp)

    def normalization_error(self) -> float:
        return abs(self.total() - 1.0)

    def mean(self) -> float:
        return logsumexp_shifted(self.logp, self.support) / self.total()

    def variance(self) -> float:
        m = self.mean()
        second = logsumexp_shifted(self.logp, self.support.astype(float) ** 2) / self.total()
        return second - m * m

    def argmax(self) -> int:
        return int(np.argmax(self.logp))

    def mode(self) -> int:
        return self.argmax()
