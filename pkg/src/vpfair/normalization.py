"""Normalizing constants and the exhaustive small-N maximum oracle."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .kernels import BINOMIAL_METRICS, binomial_raw_sum, discounts


@dataclass(frozen=True)
class BlockPermutation:
    """All protected items stacked contiguously at the top or the bottom."""

    n_protected: int
    n_unprotected: int
    protected_first: bool

    @property
    def mask(self) -> np.ndarray:
        p = np.ones(self.n_protected, dtype=bool)
        u = np.zeros(self.n_unprotected, dtype=bool)
        return np.concatenate([p, u] if self.protected_first else [u, p])


def z_binomial(metric: str, n: int, s_p: int, base: float = 2.0, epsilon: float = 0.001) -> float:
    """Discounted raw sum of the more unfair of the two block permutations.

    Returns 0 when every item, or no item, is protected.
    """
    if metric not in BINOMIAL_METRICS:
        raise ValueError(f"unknown binomial metric {metric!r}")
    if not 0 <= s_p <= n:
        raise ValueError(f"protected count {s_p} outside 0..{n}")
    if s_p in (0, n):
        return 0.0
    return max(
        binomial_raw_sum(metric, BlockPermutation(s_p, n - s_p, first).mask, base=base, epsilon=epsilon)
        for first in (True, False)
    )


def z_multinomial(n: int) -> float:
    """Sum of per-rank discounts: the ceiling when every JSD term reaches 1."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return float(np.sum(discounts(n)))


class OracleLimitError(ValueError):
    pass


def brute_force_max(metric: str, counts: dict, limit: int = 10) -> tuple[float, tuple[str, ...]]:
    """Enumerate every distinct arrangement of a protected/unprotected multiset.

    ``counts`` maps ``"P"`` and ``"U"`` to group sizes. Returns the largest
    discounted raw sum and the lexicographically smallest arrangement reaching
    it, spelled as a tuple of ``"P"``/``"U"``.
    """
    s_p, s_u = int(counts.get("P", 0)), int(counts.get("U", 0))
    n = s_p + s_u
    if n > limit:
        raise OracleLimitError(f"N={n} exceeds oracle limit {limit} ({comb(n, s_p)} arrangements)")
    if n == 0:
        raise ValueError("empty multiset")
    best, witness = None, None
    words = []
    for positions in combinations(range(n), s_p):
        mask = np.zeros(n, dtype=bool)
        mask[list(positions)] = True
        words.append(tuple("P" if m else "U" for m in mask))
    # visit words in sorted order so a tie keeps the smallest witness
    for word in sorted(words):
        value = binomial_raw_sum(metric, np.array([c == "P" for c in word]))
        if best is None or value > best + 1e-12 * max(1.0, best):
            best, witness = value, word
    return float(best), witness
