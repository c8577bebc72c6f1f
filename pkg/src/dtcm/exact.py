"""Exact transition probabilities for the linearly chirped spin-boson sweep.

A diabatic state is a bit vector of spin projections, index 1 carrying the
largest level splitting.  As the chirp crosses each splitting (rightmost
spin first), the spin either stays or flips, contributing a survival factor
p_k = exp(-2*pi*g**2*(N_B + k)) or a flip factor q_k = 1 - p_k, where k - 1
counts the down spins among the other spins at that moment.  The product of
the per-spin factors is the state-to-state transition probability; this
module builds those monomials symbolically, evaluates them in log domain,
and provides the closed forms for the two fully polarized initial states
together with brute-force evaluations used as oracles.
"""

from __future__ import annotations

import math
import os
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, NamedTuple

import numpy as np

from .distribution import Distribution
from .logdomain import log1mexp, stable_cumsum
from .qspecial import QParam

__all__ = [
    "SpinConfig",
    "ModelParams",
    "Factor",
    "Monomial",
    "transition_monomial",
    "transition_probability",
    "transition_probabilities_from",
    "enumerate_configs",
    "forward_distribution",
    "inverse_distribution",
    "forward_distribution_rawsum",
    "inverse_distribution_rawsum",
    "partition_function",
    "partition_function_bruteforce",
    "verify_complement_symmetry",
    "max_bruteforce_ns",
]

DEFAULT_MAX_BRUTEFORCE_NS = 12
MAX_RAWSUM_TWO_S = 30
BRUTEFORCE_ENV_VAR = "DTCM_MAX_BRUTEFORCE_NS"

STAY = "stay"
FLIP = "flip"
_SYMBOL = {STAY: "p", FLIP: "q"}
# flip factors sort before stay factors at equal subscript, so the worked
# three-spin example renders as q2*p2*q3
_KIND_ORDER = {FLIP: 0, STAY: 1}


def max_bruteforce_ns() -> int:
    """Enumeration guard on the spin count; 2**ns states get enumerated."""
    value = os.environ.get(BRUTEFORCE_ENV_VAR)
    if value is None:
        return DEFAULT_MAX_BRUTEFORCE_NS
    return int(value)


@dataclass(frozen=True)
class SpinConfig:
    """Spin projections sigma_1..sigma_ns as a bit tuple (1 = up).

    The index order fixes the splitting order: smaller index, larger
    splitting.  Exact degeneracy of splittings is outside the solved model;
    only the strict ordering enters the engine.
    """

    bits: tuple

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if not bits:
            raise ValueError("spin configuration must contain at least one spin")
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"spin projections must be 0 or 1, got {self.bits}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_string(cls, s: str) -> "SpinConfig":
        if not s or any(c not in "01" for c in s):
            raise ValueError(f"spin configuration string must be nonempty over 0/1, got {s!r}")
        return cls(tuple(int(c) for c in s))

    @classmethod
    def all_up(cls, ns: int) -> "SpinConfig":
        return cls((1,) * ns)

    @classmethod
    def all_down(cls, ns: int) -> "SpinConfig":
        return cls((0,) * ns)

    @property
    def ns(self) -> int:
        return len(self.bits)

    @property
    def n_up(self) -> int:
        return sum(self.bits)

    @property
    def nu(self) -> int:
        """Number of down spins, the coarse-grained state index."""
        return self.ns - self.n_up

    def complement(self) -> "SpinConfig":
        return SpinConfig(tuple(1 - b for b in self.bits))

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


@dataclass(frozen=True)
class ModelParams:
    """Coupling g, boson count N_B of the all-up state, and spin count N_s.

    The level splittings themselves are not parameters: the exact solution
    depends only on their strict ordering, which SpinConfig indexing fixes.
    """

    g: float
    nb: int = 0
    ns: int = 1

    def __post_init__(self):
        if self.g < 0:
            raise ValueError(f"coupling must be >= 0, got {self.g}")
        if self.nb < 0:
            raise ValueError(f"boson count must be >= 0, got {self.nb}")
        if self.ns < 1:
            raise ValueError(f"spin count must be >= 1, got {self.ns}")

    @cached_property
    def x(self) -> QParam:
        return QParam.from_coupling(self.g)

    @property
    def s(self) -> float:
        return 0.5 * self.ns

    @property
    def two_s(self) -> int:
        return self.ns

    def log_p(self, k: int) -> float:
        """log of the survival probability at crossing index k."""
        return (self.nb + k) * self.x.log_x

    def log_q(self, k: int) -> float:
        """log of the flip probability at crossing index k; -inf at g = 0."""
        return log1mexp(self.log_p(k))

    def p(self, k: int) -> float:
        return math.exp(self.log_p(k))

    def q(self, k: int) -> float:
        return -math.expm1(self.log_p(k))


class Factor(NamedTuple):
    k: int
    kind: str


@dataclass(frozen=True)
class Monomial:
    """Symbolic transition probability: one stay/flip factor per spin.

    The factor list is chronological (rightmost spin first).  Kept symbolic
    so that symmetry checks are exact multiset comparisons and a single
    monomial can be re-evaluated across couplings.
    """

    steps: tuple

    def __post_init__(self):
        steps = tuple(Factor(int(k), kind) for k, kind in self.steps)
        if any(f.kind not in (STAY, FLIP) for f in steps):
            raise ValueError("factor kind must be 'stay' or 'flip'")
        object.__setattr__(self, "steps", steps)

    def factors(self) -> Counter:
        """Multiset of (k, kind) pairs."""
        return Counter(self.steps)

    def same_factors(self, other: "Monomial") -> bool:
        return self.factors() == other.factors()

    def reindexed(self, ns: int) -> Counter:
        """Multiset with every subscript k replaced by ns + 1 - k."""
        return Counter(Factor(ns + 1 - f.k, f.kind) for f in self.steps)

    def log_value(self, params: ModelParams) -> float:
        total = 0.0
        for k, kind in self.steps:
            total += params.log_p(k) if kind == STAY else params.log_q(k)
        return total

    def value(self, params: ModelParams) -> float:
        return math.exp(self.log_value(params))

    def __str__(self) -> str:
        ordered = sorted(self.factors().items(), key=lambda it: (it[0].k, _KIND_ORDER[it[0].kind]))
        parts = []
        for factor, power in ordered:
            name = f"{_SYMBOL[factor.kind]}{factor.k}"
            parts.append(name if power == 1 else f"{name}^{power}")
        return "*".join(parts)


def _check_pair(initial: SpinConfig, final: SpinConfig, params: ModelParams) -> None:
    if initial.ns != final.ns:
        raise ValueError(
            f"initial and final configurations differ in length: {initial.ns} vs {final.ns}"
        )
    if initial.ns != params.ns:
        raise ValueError(f"configurations have {initial.ns} spins, parameters say {params.ns}")


def transition_monomial(initial: SpinConfig, final: SpinConfig, params: ModelParams) -> Monomial:
    """Run the spin-flip bookkeeping from the rightmost spin to the left.

    Spin i contributes a stay factor if its projection is unchanged and a
    flip factor otherwise; the subscript is one plus the number of down
    spins among the others at that step, i.e.
    k_i = ns - sum_{j<i} initial_j - sum_{j>i} final_j.
    The result does not depend on g; couplings enter only at evaluation.
    """
    _check_pair(initial, final, params)
    ns = params.ns
    bi, bf = initial.bits, final.bits
    prefix_initial = [0] * (ns + 1)
    for j in range(ns):
        prefix_initial[j + 1] = prefix_initial[j] + bi[j]
    suffix_final = [0] * (ns + 1)
    for j in range(ns - 1, -1, -1):
        suffix_final[j] = suffix_final[j + 1] + bf[j]
    steps = []
    for i in range(ns, 0, -1):
        k = ns - prefix_initial[i - 1] - suffix_final[i]
        steps.append(Factor(k, STAY if bi[i - 1] == bf[i - 1] else FLIP))
    return Monomial(tuple(steps))


def transition_probability(initial: SpinConfig, final: SpinConfig, params: ModelParams) -> float:
    """Evaluate the transition monomial; at g = 0 this is 1 iff final == initial."""
    return transition_monomial(initial, final, params).value(params)


def enumerate_configs(ns: int) -> list:
    """All 2**ns spin configurations in lexicographic bit order."""
    codes = np.arange(2 ** ns)
    bits = (codes[:, None] >> np.arange(ns - 1, -1, -1)) & 1
    return [SpinConfig(tuple(int(b) for b in row)) for row in bits]


def transition_probabilities_from(
    initial: SpinConfig, params: ModelParams, limit: int | None = None
) -> np.ndarray:
    """Transition probabilities from one initial state to every final state.

    Vectorized evaluation of the same per-spin factors as
    transition_probability, returned in lexicographic final-state order.
    Guarded by the enumeration limit (DTCM_MAX_BRUTEFORCE_NS overrides).
    """
    _check_pair(initial, initial, params)
    ns = params.ns
    cap = max_bruteforce_ns() if limit is None else limit
    if ns > cap:
        raise ValueError(
            f"enumeration over 2**{ns} final states exceeds the guard ({cap}); "
            f"set {BRUTEFORCE_ENV_VAR} or pass a larger limit to override"
        )
    codes = np.arange(2 ** ns)
    finals = ((codes[:, None] >> np.arange(ns - 1, -1, -1)) & 1).astype(np.int64)
    bi = np.asarray(initial.bits, dtype=np.int64)

    prefix_initial = np.concatenate(([0], np.cumsum(bi)))[:ns]
    suffix_final = np.zeros_like(finals)
    suffix_final[:, :-1] = np.cumsum(finals[:, :0:-1], axis=1)[:, ::-1]
    k = ns - prefix_initial[None, :] - suffix_final

    log_stay = (params.nb + k) * params.x.log_x
    log_flip = log1mexp(log_stay)
    logp = np.where(finals == bi[None, :], log_stay, log_flip).sum(axis=1)
    return np.exp(logp)


def _cum_log_one_minus_pow(log_x: float, top: int) -> np.ndarray:
    """cum[m] = sum_{i=1}^{m} log(1 - x**i), m = 0..top."""
    out = np.zeros(top + 1)
    if top > 0:
        out[1:] = stable_cumsum(log1mexp(np.arange(1, top + 1, dtype=float) * log_x))
    return out


def _point_mass(two_s: int, at: int, process: str, params: ModelParams) -> Distribution:
    logp = np.full(two_s + 1, -np.inf)
    logp[at] = 0.0
    return Distribution(logp, process=process, params=params)


def forward_distribution(params: ModelParams) -> Distribution:
    """Distribution of the number of flipped spins nu starting all-up.

    Closed form [2S nu]_x * x**((N_B+1)(2S-nu)) * (x**(N_B+1); x)_nu,
    assembled in log domain from prefix sums so the cost is linear in S.
    """
    two_s = params.two_s
    if params.g == 0.0:
        return _point_mass(two_s, 0, "forward", params)
    lx = params.x.log_x
    cum = _cum_log_one_minus_pow(lx, params.nb + two_s)
    nu = np.arange(two_s + 1)
    log_qbinom = cum[two_s] - cum[nu] - cum[two_s - nu]
    log_poch = cum[params.nb + nu] - cum[params.nb]
    logp = log_qbinom + (params.nb + 1) * (two_s - nu) * lx + log_poch
    return Distribution(logp, process="forward", params=params)


def inverse_distribution(params: ModelParams) -> Distribution:
    """Distribution of the remaining down spins nu starting all-down.

    Closed form [2S nu]_x * x**((N_B+nu) nu) * (x**(N_B+nu+1); x)_{2S-nu};
    the all-down initial state holds N_B + 2S bosons.
    """
    two_s = params.two_s
    if params.g == 0.0:
        return _point_mass(two_s, two_s, "inverse", params)
    lx = params.x.log_x
    cum = _cum_log_one_minus_pow(lx, params.nb + two_s)
    nu = np.arange(two_s + 1)
    log_qbinom = cum[two_s] - cum[nu] - cum[two_s - nu]
    log_poch = cum[params.nb + two_s] - cum[params.nb + nu]
    logp = log_qbinom + (params.nb + nu) * nu * lx + log_poch
    return Distribution(logp, process="inverse", params=params)


def _compositions(total: int, parts: int) -> Iterator[tuple]:
    """All tuples of `parts` nonnegative integers summing to `total`."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _check_rawsum_guard(two_s: int, limit: int | None) -> None:
    cap = MAX_RAWSUM_TWO_S if limit is None else limit
    if two_s > cap:
        raise ValueError(
            f"raw composition sum over 2S = {two_s} exceeds the guard ({cap}); "
            "pass a larger limit to override"
        )


def forward_distribution_rawsum(params: ModelParams, limit: int | None = None) -> Distribution:
    """Forward distribution straight from the multi-sum over compositions.

    P(nu) = prod_{k=1}^{nu} (1 - p_k) * sum over occupation patterns
    (i_1..i_{nu+1} >= 0, sum = 2S - nu) of prod_r p_r**i_r.  Exponentially
    many terms; this exists as an independent oracle for the closed form.
    """
    two_s = params.two_s
    _check_rawsum_guard(two_s, limit)
    if params.g == 0.0:
        return _point_mass(two_s, 0, "forward-rawsum", params)
    lx = params.x.log_x
    logp = np.empty(two_s + 1)
    for nu in range(two_s + 1):
        prefactor = float(
            np.sum(log1mexp((params.nb + np.arange(1, nu + 1, dtype=float)) * lx))
        )
        weights = params.nb + np.arange(1, nu + 2, dtype=float)
        exponents = [
            float(np.dot(comp, weights)) for comp in _compositions(two_s - nu, nu + 1)
        ]
        terms = np.asarray(exponents) * lx
        m = terms.max()
        logp[nu] = prefactor + m + math.log(np.sum(np.exp(terms - m)))
    return Distribution(logp, process="forward-rawsum", params=params)


def inverse_distribution_rawsum(params: ModelParams, limit: int | None = None) -> Distribution:
    """Inverse distribution from the multi-sum over compositions (oracle)."""
    two_s = params.two_s
    _check_rawsum_guard(two_s, limit)
    if params.g == 0.0:
        return _point_mass(two_s, two_s, "inverse-rawsum", params)
    lx = params.x.log_x
    logp = np.empty(two_s + 1)
    for nu in range(two_s + 1):
        prefactor = float(
            np.sum(log1mexp((params.nb + np.arange(nu + 1, two_s + 1, dtype=float)) * lx))
        )
        weights = params.nb + np.arange(nu, two_s + 1, dtype=float)
        exponents = [float(np.dot(comp, weights)) for comp in _compositions(nu, two_s - nu + 1)]
        terms = np.asarray(exponents) * lx
        m = terms.max()
        logp[nu] = prefactor + m + math.log(np.sum(np.exp(terms - m)))
    return Distribution(logp, process="inverse-rawsum", params=params)


def partition_function(n_bosons: int, n_levels: int, x: QParam) -> float:
    """Canonical partition function of free bosons on equidistant levels.

    Z_N = prod_{k=1}^{N} (1 - x**(k+n-1)) / (1 - x**k) with x the Boltzmann
    factor of the level spacing; the x -> 1 limit is the composition count
    binomial(N+n-1, N).
    """
    if n_bosons < 0:
        raise ValueError(f"boson count must be >= 0, got {n_bosons}")
    if n_levels < 1:
        raise ValueError(f"level count must be >= 1, got {n_levels}")
    if x.is_unit:
        return float(math.comb(n_bosons + n_levels - 1, n_bosons))
    lx = x.log_x
    k = np.arange(1, n_bosons + 1, dtype=float)
    ratios = np.expm1((k + n_levels - 1) * lx) / np.expm1(k * lx)
    return float(np.prod(ratios))


def partition_function_bruteforce(n_bosons: int, n_levels: int, x: QParam) -> float:
    """Composition-sum evaluation of the partition function (oracle)."""
    total = 0.0
    level_energies = np.arange(n_levels, dtype=float)
    for comp in _compositions(n_bosons, n_levels):
        total += math.exp(float(np.dot(comp, level_energies)) * x.log_x)
    return total


def verify_complement_symmetry(
    initial: SpinConfig, final: SpinConfig, params: ModelParams
) -> bool:
    """Check the complement symmetry of the solution symbolically.

    Flipping every spin in both states must reproduce the same monomial
    with each subscript k replaced by ns + 1 - k; the comparison is exact
    multiset equality, no numerics involved.
    """
    direct = transition_monomial(initial, final, params)
    swapped = transition_monomial(initial.complement(), final.complement(), params)
    return direct.reindexed(params.ns) == swapped.factors()
