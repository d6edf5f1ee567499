"""Normalized discounted ranking-bias metrics.

Binomial metrics (nDD, nDR, nDKL) compare how the protected group is
represented in each top-i prefix against its share of the whole ranking.
nDJS does the same over all viewpoint categories at once via the
Jensen-Shannon divergence.

>>> ndd([-2, 1, -1, 3], ProtectedSpec({-3, -2, -1})).value  # doctest: +ELLIPSIS
0.6490...
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .divergence import jsd
from .kernels import (
    ALL_METRICS,
    DEFAULT_PROTECTED,
    LABELS,
    ProtectedSpec,
    as_ranking,
    binomial_raw_sum,
    discounts,
)
from .normalization import z_binomial, z_multinomial


@dataclass(frozen=True)
class MetricResult:
    metric_id: str
    value: float
    raw_sum: float
    z: float

    def as_dict(self) -> dict:
        return {"metric": self.metric_id, "value": self.value, "raw_sum": self.raw_sum, "z": self.z}


def _finish(metric_id: str, raw: float, z: float) -> MetricResult:
    value = raw / z if z > 0 else 0.0
    return MetricResult(metric_id, float(value), float(raw), float(z))


def _binomial_from_mask(metric_id: str, mask, base: float = 2.0, epsilon: float = 0.001) -> MetricResult:
    mask = np.asarray(mask, dtype=bool)
    if mask.size == 0:
        raise ValueError("a ranking needs at least one item")
    raw = binomial_raw_sum(metric_id, mask, base=base, epsilon=epsilon)
    z = z_binomial(metric_id, mask.size, int(mask.sum()), base=base, epsilon=epsilon)
    return _finish(metric_id, raw, z)


def _mask(ranking, protected) -> np.ndarray:
    if not isinstance(protected, ProtectedSpec):
        protected = ProtectedSpec(protected)
    return protected.mask(as_ranking(ranking))


def ndd(ranking: Sequence[int], protected) -> MetricResult:
    """Normalized discounted difference between prefix and overall protected share."""
    return _binomial_from_mask("nDD", _mask(ranking, protected))


def ndr(ranking: Sequence[int], protected, clamp: bool = False) -> MetricResult:
    """Normalized discounted ratio of protected to unprotected counts.

    The block-permutation normalizer does not bound this metric; values
    above 1 occur for interleaved rankings. ``clamp=True`` caps at 1.
    """
    result = _binomial_from_mask("nDR", _mask(ranking, protected))
    if clamp and result.value > 1.0:
        return MetricResult(result.metric_id, 1.0, result.raw_sum, result.z)
    return result


def ndkl(ranking: Sequence[int], protected, base: float = 2.0, epsilon: float = 0.001) -> MetricResult:
    """Normalized discounted KL divergence of prefix vs. overall group split.

    Zero prefix shares are smoothed to ``epsilon`` before taking logs.
    """
    return _binomial_from_mask("nDKL", _mask(ranking, protected), base=base, epsilon=epsilon)


def category_prefix_distributions(ranking, categories: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """Per-prefix category proportions (N x K) and the overall proportions (K)."""
    ranking = np.asarray(ranking)
    index = {c: k for k, c in enumerate(categories)}
    if len(index) != len(categories):
        raise ValueError("duplicate category")
    unknown = sorted(set(ranking.tolist()) - set(index))
    if unknown:
        raise ValueError(f"labels {unknown} are not in the category list")
    onehot = np.zeros((ranking.size, len(categories)))
    onehot[np.arange(ranking.size), [index[v] for v in ranking.tolist()]] = 1.0
    ranks = np.arange(1, ranking.size + 1, dtype=np.float64)[:, None]
    prefix = np.cumsum(onehot, axis=0) / ranks
    return prefix, prefix[-1]


def ndjs(ranking: Sequence, categories: Sequence | None = None) -> MetricResult:
    """Normalized discounted Jensen-Shannon divergence over all categories.

    ``categories`` defaults to the seven viewpoint labels. Any hashable
    labels work when an explicit list is given.
    """
    if categories is None:
        ranking = as_ranking(ranking)
        categories = LABELS
    elif len(ranking) == 0:
        raise ValueError("a ranking needs at least one item")
    p, q = category_prefix_distributions(np.asarray(ranking, dtype=object), list(categories))
    n = p.shape[0]
    raw = float(np.sum(jsd(p, q) * discounts(n)))
    return _finish("nDJS", raw, z_multinomial(n))


def measure(ranking, metrics: Iterable[str] = ALL_METRICS, protected=DEFAULT_PROTECTED) -> list[MetricResult]:
    """Evaluate several metrics by name on one ranking."""
    funcs = {"nDD": ndd, "nDR": ndr, "nDKL": ndkl}
    out = []
    for name in metrics:
        if name == "nDJS":
            out.append(ndjs(ranking))
        elif name in funcs:
            out.append(funcs[name](ranking, protected))
        else:
            raise ValueError(f"unknown metric {name!r}")
    return out


# Rows: balance of protected vs. unprotected items; columns: bias low/medium/high.
_RECOMMENDATIONS = {
    "low": ("nDD", "nDD", "nDD"),
    "medium": ("nDD", "nDD", "nDKL"),
    "high": ("nDD", "nDKL", "nDKL"),
}
_LEVELS = ("low", "medium", "high")


def recommend_metric(balance: str, bias: str) -> str:
    """Binomial metric suited to a given group balance and expected bias level."""
    if balance not in _RECOMMENDATIONS or bias not in _LEVELS:
        raise ValueError(f"levels must be one of {_LEVELS}, got balance={balance!r}, bias={bias!r}")
    return _RECOMMENDATIONS[balance][_LEVELS.index(bias)]


def categorize_balance(n_protected: int, n_total: int, low: float = 0.5, high: float = 0.8) -> str:
    """Bucket the minority share of a two-group split.

    The balance ratio is ``min(share, 1 - share) / 0.5`` (1 means an even
    split); below ``low`` is "low", above ``high`` is "high".
    """
    if not 0 < n_protected < n_total:
        raise ValueError(f"degenerate partition: {n_protected} protected of {n_total}")
    share = n_protected / n_total
    ratio = min(share, 1.0 - share) / 0.5
    if ratio < low:
        return "low"
    if ratio > high:
        return "high"
    return "medium"
