"""Independent reference implementations the tests check against.

These stay deliberately naive and separate from the package: full-matrix DP
for edit distance, brute-force window scans for winnowing, direct likelihood
evaluation for deviance, and mpmath for chi-square tails.
"""

from __future__ import annotations

import math

import mpmath


def levenshtein_dp(a: str, b: str) -> int:
    """Full O(nm) dynamic-programming table, no optimizations."""
    n, m = len(a), len(b)
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        table[i][0] = i
    for j in range(m + 1):
        table[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            table[i][j] = min(
                table[i - 1][j] + 1,
                table[i][j - 1] + 1,
                table[i - 1][j - 1] + cost,
            )
    return table[n][m]


def brute_force_winnow(hashes: list[int], w: int) -> set[tuple[int, int]]:
    """Minimum of every length-w window, rightmost tie; one truncated window
    when fewer than w hashes exist."""
    if not hashes:
        return set()
    selected = set()
    windows = max(1, len(hashes) - w + 1)
    for start in range(windows):
        window = hashes[start : start + w]
        best_val = min(window)
        best_pos = max(i for i, h in enumerate(window, start=start) if h == best_val)
        selected.add((best_val, best_pos))
    return selected


def kgram_set(tokens: list[str], k: int) -> set[tuple[str, ...]]:
    return {tuple(tokens[i : i + k]) for i in range(len(tokens) - k + 1)}


def chi2_sf_mp(x: float, df: int) -> float:
    """Upper-tail chi-square probability via the regularized incomplete gamma."""
    if df == 0:
        return 1.0
    return float(
        mpmath.gammainc(mpmath.mpf(df) / 2, mpmath.mpf(x) / 2, mpmath.inf, regularized=True)
    )


def direct_binomial_deviance(y, mu) -> float:
    """-2 * log-likelihood for binary outcomes, summed term by term."""
    total = 0.0
    for yi, mi in zip(y, mu):
        mi = min(max(mi, 1e-12), 1 - 1e-12)
        total += yi * math.log(mi) + (1 - yi) * math.log(1 - mi)
    return -2.0 * total


def two_by_two_logit(n0: int, k0: int, n1: int, k1: int) -> tuple[float, float]:
    """Closed-form logistic coefficients for a binary predictor.

    Group x=0 has k0 successes of n0; group x=1 has k1 of n1. The MLE fits
    each group's probability exactly: b0 = logit(k0/n0), b1 = logit(k1/n1) - b0.
    """
    p0 = k0 / n0
    p1 = k1 / n1
    b0 = math.log(p0 / (1 - p0))
    return b0, math.log(p1 / (1 - p1)) - b0
