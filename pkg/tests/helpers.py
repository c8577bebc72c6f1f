"""Shared independent oracles for the test suite.

Everything here recomputes expected values by brute force or extended
precision, deliberately avoiding the code paths under test.
"""

import math
from itertools import product

import numpy as np
from mpmath import mp, mpf

mp.dps = 50


def mp_q_pochhammer_infinite(a, q, terms=400):
    """(a; q)_inf by direct high-precision product."""
    a, q = mpf(str(a)), mpf(str(q))
    prod = mpf(1)
    for i in range(terms):
        prod *= 1 - a * q**i
    return float(prod)


def mp_q_digamma(q, z, terms=5000):
    """q-digamma by direct high-precision series summation."""
    q, z = mpf(str(q)), mpf(str(z))
    s = mpf(0)
    for n in range(terms):
        s += q ** (n + z) / (1 - q ** (n + z))
    return float(mp.log(q) * s - mp.log(1 - q))


def bruteforce_monomial_steps(initial_bits, final_bits):
    """Spin-flip bookkeeping, written independently: walk spins right to
    left, counting down spins among the untouched ones."""
    ns = len(initial_bits)
    state = list(initial_bits)
    steps = []
    for i in range(ns - 1, -1, -1):
        downs_elsewhere = sum(1 for j, b in enumerate(state) if j != i and b == 0)
        k = 1 + downs_elsewhere
        kind = "stay" if initial_bits[i] == final_bits[i] else "flip"
        steps.append((k, kind))
        state[i] = final_bits[i]
    return steps


def bruteforce_probability(initial_bits, final_bits, g, nb=0):
    """Product of survival/flip factors in extended precision."""
    gm = mpf(str(g))
    total = mpf(1)
    for k, kind in bruteforce_monomial_steps(initial_bits, final_bits):
        p = mp.e ** (-2 * mp.pi * gm**2 * (nb + k))
        total *= p if kind == "stay" else (1 - p)
    return float(total)


def bruteforce_polarized(ns, g, nb, process):
    """Distribution over nu by enumerating every final state."""
    initial = (1,) * ns if process == "forward" else (0,) * ns
    out = np.zeros(ns + 1)
    for final in product((0, 1), repeat=ns):
        out[final.count(0)] += bruteforce_probability(initial, final, g, nb)
    return out
