"""Viewpoint fairness metrics for ranked lists and a synthetic-ranking simulator."""

from .divergence import jsd, kld, smooth
from .kernels import LABELS, ProtectedSpec, discount, prefix_counts
from .metrics import MetricResult, categorize_balance, measure, ndd, ndjs, ndkl, ndr, recommend_metric
from .normalization import brute_force_max, z_binomial, z_multinomial

__all__ = [
    "LABELS",
    "MetricResult",
    "ProtectedSpec",
    "brute_force_max",
    "categorize_balance",
    "discount",
    "jsd",
    "kld",
    "measure",
    "ndd",
    "ndjs",
    "ndkl",
    "ndr",
    "prefix_counts",
    "recommend_metric",
    "smooth",
    "z_binomial",
    "z_multinomial",
]
