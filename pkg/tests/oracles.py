"""Independent reference implementations used as test oracles.

Everything here is deliberately naive (exact rational arithmetic, full
enumeration, textbook formulas) and shares no code with the library paths it
checks.
"""

from fractions import Fraction
from itertools import combinations
from math import comb, factorial

import numpy as np


def shapley_p_exact(n):
    """p_s = (s-1)!(n-s)!/n! as exact fractions."""
    return [Fraction(1, n * comb(n - 1, s - 1)) for s in range(1, n + 1)]


def beta_p_exact(alpha, beta, n):
    """Beta-kernel p_s for integer alpha, beta >= 1, as exact fractions.

    B(beta+s-1, alpha+n-s) / B(beta, alpha) with integer arguments reduces to
    factorial ratios.
    """

    def beta_int(a, b):
        return Fraction(factorial(a - 1) * factorial(b - 1),
                        factorial(a + b - 1))

    return [beta_int(beta + s - 1, alpha + n - s) / beta_int(beta, alpha)
            for s in range(1, n + 1)]


def wb_p_exact(a_num, a_den, n):
    """Weighted-Banzhaf p_s for a rational parameter a = a_num/a_den."""
    a = Fraction(a_num, a_den)
    return [a ** (s - 1) * (1 - a) ** (n - s) for s in range(1, n + 1)]


def probabilistic_value_direct(n, utility, p):
    """Marginal-contribution definition, straight subset enumeration.

    `utility` maps a frozenset of 0-based players to a number; `p` is indexed
    p[s-1] for coalition size s.
    """
    players = range(n)
    phi = []
    for i in players:
        rest = [j for j in players if j != i]
        acc = 0.0
        for r in range(n):
            for combo in combinations(rest, r):
                s = frozenset(combo)
                acc += float(p[r]) * (utility(s | {i}) - utility(s))
        phi.append(acc)
    return np.array(phi)


def d_direct(m, q):
    """Convergence functional, written exactly as displayed."""
    n = len(m)
    total = 0.0
    for s in range(2, n - 1):
        total += (n / q[s - 2]) * (m[s - 1] ** 2 / s + m[s] ** 2 / (n - s))
    return total


def gamma_direct(q, n):
    vals = []
    for s in range(2, n - 1):
        vals.append(min(q[s - 2] * s / n, q[s - 2] * (n - s) / n))
    return min(vals)


def mean_d_direct(q, n):
    lead = 1.0
    for k in range(1, n):
        lead *= k / (2.0 + k)
    total = 0.0
    for s in range(2, n - 1):
        total += (n / q[s - 2]) * (1.0 / s + 1.0 / (n - s))
    return lead * total


def random_simplex(rng, k):
    x = rng.exponential(size=k)
    return x / x.sum()
