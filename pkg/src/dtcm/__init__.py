"""Exact and asymptotic transition probabilities of a linearly chirped
spin-boson sweep, with a brute-force Schrodinger-equation validator."""

__version__ = "0.1.0"

from .distribution import Distribution
from .exact import (
    ModelParams,
    Monomial,
    SpinConfig,
    forward_distribution,
    inverse_distribution,
    partition_function,
    transition_monomial,
    transition_probability,
    verify_complement_symmetry,
)
from .qspecial import (
    QBinomialDistSpec,
    QParam,
    q_binomial,
    q_binomial_distribution,
    q_digamma,
    q_pochhammer,
    q_pochhammer_infinite,
)

__all__ = [
    "__version__",
    "Distribution",
    "ModelParams",
    "Monomial",
    "SpinConfig",
    "QBinomialDistSpec",
    "QParam",
    "forward_distribution",
    "inverse_distribution",
    "partition_function",
    "transition_monomial",
    "transition_probability",
    "verify_complement_symmetry",
    "q_binomial",
    "q_binomial_distribution",
    "q_digamma",
    "q_pochhammer",
    "q_pochhammer_infinite",
]
