"""Exact null distributions for rank statistics.

Each distribution is kept as integer frequency counts so that tail
probabilities are exact ratios until the final division.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from ..errors import DomainError
from .distributions import normal_sf

SIGNED_RANK_MAX_N = 30
MANN_WHITNEY_MAX_CELLS = 400
SPEARMAN_EXACT_MAX_N = 9


@lru_cache(maxsize=None)
def signed_rank_counts(n: int) -> tuple[int, ...]:
    """Frequencies of V = 0..n(n+1)/2 over the 2**n sign patterns."""
    if not 1 <= n <= SIGNED_RANK_MAX_N:
        raise DomainError(
            f"exact signed-rank distribution needs 1 <= n <= {SIGNED_RANK_MAX_N}, got {n}"
        )
    counts = [1]
    for rank in range(1, n + 1):
        grown = counts + [0] * rank
        for v, c in enumerate(counts):
            grown[v + rank] += c
        counts = grown
    return tuple(counts)


def signed_rank_null_cdf(n: int, v: float) -> float:
    """P(V <= v) for the Wilcoxon signed-rank statistic without ties."""
    counts = signed_rank_counts(n)
    top = math.floor(v)
    if top < 0:
        return 0.0
    if top >= len(counts) - 1:
        return 1.0
    return sum(counts[: top + 1]) / 2**n


@lru_cache(maxsize=None)
def mann_whitney_counts(n1: int, n2: int) -> tuple[int, ...]:
    """Frequencies of U = 0..n1*n2 over the C(n1+n2, n1) arrangements.

    These are the coefficients of the Gaussian binomial
    prod_{i=1..n1} (1 - q**(n2+i)) / (1 - q**i).
    """
    if n1 < 1 or n2 < 1:
        raise DomainError("group sizes must be positive")
    if n1 * n2 > MANN_WHITNEY_MAX_CELLS:
        raise DomainError(
            f"exact Mann-Whitney distribution needs n1*n2 <= {MANN_WHITNEY_MAX_CELLS}, "
            f"got {n1 * n2}"
        )
    size = n1 * n2 + 1
    poly = [0] * size
    poly[0] = 1
    for i in range(1, n1 + 1):
        shift = n2 + i
        for d in range(size - 1, shift - 1, -1):
            poly[d] -= poly[d - shift]
        # exact division by (1 - q**i)
        for d in range(i, size):
            poly[d] += poly[d - i]
    return tuple(poly)


def mann_whitney_null_cdf(n1: int, n2: int, u: float) -> float:
    """P(U <= u) for the Mann-Whitney statistic without ties."""
    counts = mann_whitney_counts(n1, n2)
    top = math.floor(u)
    if top < 0:
        return 0.0
    if top >= n1 * n2:
        return 1.0
    return sum(counts[: top + 1]) / math.comb(n1 + n2, n1)


@lru_cache(maxsize=None)
def spearman_counts(n: int) -> tuple[int, ...]:
    """Frequencies of S = sum of squared rank differences over all n! permutations.

    Dynamic programme over the set of already-used ranks, so the cost is
    2**n * n vector shifts rather than n! enumerations.
    """
    if not 1 <= n <= SPEARMAN_EXACT_MAX_N:
        raise DomainError(f"exact Spearman distribution needs n <= {SPEARMAN_EXACT_MAX_N}")
    s_max = n * (n * n - 1) // 3
    table = np.zeros((1 << n, s_max + 1), dtype=np.int64)
    table[0, 0] = 1
    popcount = [bin(m).count("1") for m in range(1 << n)]
    for mask in range(1 << n):
        row = table[mask]
        if not row.any():
            continue
        position = popcount[mask]
        for value in range(n):
            bit = 1 << value
            if mask & bit:
                continue
            step = (position - value) ** 2
            table[mask | bit, step:] += row[: s_max + 1 - step]
    return tuple(int(c) for c in table[(1 << n) - 1])


_EDGEWORTH = (
    0.2274, 0.2531, 0.1745, 0.0758, 0.1033, 0.3932,
    0.0879, 0.0151, 0.0072, 0.0831, 0.0131, 4.6e-4,
)


def _spearman_upper_edgeworth(n: int, js: int) -> float:
    c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12 = _EDGEWORTH
    b = 1.0 / n
    x = (6.0 * (js - 1) * b / (n * n - 1.0) - 1.0) * math.sqrt(1.0 / b - 1.0)
    y = x * x
    u = x * b * (
        c1 + b * (c2 + c3 * b)
        + y * (-c4 + b * (c5 + c6 * b)
               - y * b * (c7 + c8 * b - y * (c9 - c10 * b + y * b * (c11 - c12 * y))))
    )
    return min(1.0, max(0.0, u / math.exp(y / 2.0) + normal_sf(x)))


def spearman_upper_prob(n: int, s: float) -> float:
    """P(S >= s) under independence (small S means positive rho)."""
    if n < 3:
        raise DomainError(f"Spearman tail probability needs n >= 3, got {n}")
    s_max = n * (n * n - 1) // 3
    if s <= 0:
        return 1.0
    if s > s_max:
        return 0.0
    js = math.ceil(s)
    if js % 2:
        js += 1  # S is always even
    if n <= SPEARMAN_EXACT_MAX_N:
        counts = spearman_counts(n)
        return sum(counts[js:]) / math.factorial(n)
    return _spearman_upper_edgeworth(n, js)


def spearman_tail_prob(n: int, s: float) -> float:
    """P(S <= s): the upper tail of rho at the observed S = sum d**2."""
    if n < 3:
        raise DomainError(f"Spearman tail probability needs n >= 3, got {n}")
    if s < 0:
        return 0.0
    if n <= SPEARMAN_EXACT_MAX_N:
        counts = spearman_counts(n)
        return sum(counts[: math.floor(s) + 1]) / math.factorial(n)
    next_even = 2 * (math.floor(s) // 2) + 2
    return 1.0 - spearman_upper_prob(n, next_even)
