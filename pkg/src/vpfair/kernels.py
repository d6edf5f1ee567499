"""Shared building blocks: label validation, rank discounts, prefix tallies."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .divergence import kld, smooth

LABELS: tuple[int, ...] = (-3, -2, -1, 0, 1, 2, 3)
DEFAULT_PROTECTED: frozenset[int] = frozenset({-3, -2, -1})

BINOMIAL_METRICS = ("nDD", "nDR", "nDKL")
ALL_METRICS = ("nDD", "nDR", "nDKL", "nDJS")


def check_label(value) -> int:
    """Return ``value`` as an int, raising ValueError unless it lies in -3..3."""
    if isinstance(value, bool) or int(value) != value or int(value) not in LABELS:
        raise ValueError(f"viewpoint label must be an integer in -3..3, got {value!r}")
    return int(value)


def as_ranking(labels: Iterable[int]) -> np.ndarray:
    """Validate a ranked sequence of viewpoint labels (top rank first)."""
    arr = np.asarray([check_label(v) for v in labels], dtype=np.int64)
    if arr.size == 0:
        raise ValueError("a ranking needs at least one item")
    return arr


@dataclass(frozen=True)
class ProtectedSpec:
    """The label values that form the protected group."""

    labels: frozenset[int]

    def __init__(self, labels: Iterable[int]):
        labels = frozenset(check_label(v) for v in labels)
        if not labels:
            raise ValueError("protected label set must not be empty")
        object.__setattr__(self, "labels", labels)

    def mask(self, ranking: Sequence[int]) -> np.ndarray:
        return np.isin(np.asarray(ranking), sorted(self.labels))


@dataclass(frozen=True)
class PrefixCounts:
    protected: np.ndarray  # protected items within the top-i, i = 1..N
    unprotected: np.ndarray

    @property
    def n(self) -> int:
        return int(self.protected.size)

    @property
    def total_protected(self) -> int:
        return int(self.protected[-1])

    @property
    def total_unprotected(self) -> int:
        return int(self.unprotected[-1])


def discount(i: int) -> float:
    """Position weight ``1 / log2(i + 1)`` for 1-based rank ``i``."""
    if i < 1:
        raise ValueError(f"rank index must be >= 1, got {i}")
    return 1.0 / np.log2(i + 1.0)


def discounts(n: int) -> np.ndarray:
    return 1.0 / np.log2(np.arange(2, n + 2, dtype=np.float64))


def mask_prefix_counts(mask: np.ndarray) -> PrefixCounts:
    mask = np.asarray(mask, dtype=bool)
    if mask.size == 0:
        raise ValueError("a ranking needs at least one item")
    cp = np.cumsum(mask, dtype=np.int64)
    cu = np.arange(1, mask.size + 1, dtype=np.int64) - cp
    return PrefixCounts(cp, cu)


def prefix_counts(ranking: Sequence[int], protected: ProtectedSpec) -> PrefixCounts:
    return mask_prefix_counts(protected.mask(as_ranking(ranking)))


def _safe_ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    # x / 0 is taken to be 0
    num = np.asarray(num, dtype=np.float64)
    den = np.asarray(den, dtype=np.float64)
    out = np.zeros(np.broadcast(num, den).shape)
    np.divide(num, den, out=out, where=den != 0)
    return out


def binomial_terms(metric: str, mask: np.ndarray, base: float = 2.0, epsilon: float = 0.001) -> np.ndarray:
    """Undiscounted per-rank bias terms F(i) of a binomial metric."""
    counts = mask_prefix_counts(mask)
    n = counts.n
    sp, su = counts.total_protected, counts.total_unprotected
    ranks = np.arange(1, n + 1, dtype=np.float64)
    if metric == "nDD":
        return np.abs(counts.protected / ranks - sp / n)
    if metric == "nDR":
        return np.abs(_safe_ratio(counts.protected, counts.unprotected) - _safe_ratio(sp, su))
    if metric == "nDKL":
        share = counts.protected / ranks
        p = smooth(np.column_stack([share, 1.0 - share]), epsilon)
        q = np.array([sp / n, su / n])
        return kld(p, q, base=base)
    raise ValueError(f"unknown binomial metric {metric!r}")


def binomial_raw_sum(metric: str, mask: np.ndarray, base: float = 2.0, epsilon: float = 0.001) -> float:
    mask = np.asarray(mask, dtype=bool)
    sp = int(mask.sum())
    if sp == 0 or sp == mask.size:
        return 0.0
    terms = binomial_terms(metric, mask, base=base, epsilon=epsilon)
    return float(np.sum(terms * discounts(mask.size)))
