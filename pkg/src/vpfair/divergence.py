"""KL and Jensen-Shannon divergence between categorical distributions.

Every function operates on the last axis, so a stack of distributions
(shape ``(..., K)``) is evaluated row by row in one call.
"""

from __future__ import annotations

import numpy as np


def check_distribution(p, atol: float = 1e-9) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if p.ndim == 0 or p.shape[-1] == 0:
        raise ValueError("distribution needs at least one category")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise ValueError("probabilities must be finite and non-negative")
    if not np.allclose(p.sum(axis=-1), 1.0, rtol=0.0, atol=atol):
        raise ValueError("probabilities must sum to 1")
    return p


def smooth(p, epsilon: float = 0.001) -> np.ndarray:
    """Raise zero entries to ``epsilon``, taking the mass proportionally from the rest.

    ``(0, 1)`` becomes ``(0.001, 0.999)``; rows without zeros are unchanged.
    """
    p = check_distribution(p)
    zeros = p == 0
    n_zero = zeros.sum(axis=-1, keepdims=True)
    if np.any(epsilon * n_zero >= 1):
        raise ValueError(f"epsilon={epsilon} too large for {int(n_zero.max())} zero entries")
    scale = 1.0 - epsilon * n_zero  # non-zero entries already sum to 1
    return np.where(zeros, epsilon, p * scale)


def kld(p, q, base: float = 2.0) -> np.ndarray | float:
    """Kullback-Leibler divergence ``sum p log(p / q)``; ``0 log 0`` counts as 0."""
    p = check_distribution(p)
    q = check_distribution(q)
    if p.shape[-1] != q.shape[-1]:
        raise ValueError("distributions must share one category list")
    p, q = np.broadcast_arrays(p, q)
    support = p > 0
    if np.any(support & (q == 0)):
        raise ValueError("KL divergence undefined: q is 0 where p > 0")
    ratio = np.divide(p, q, out=np.ones_like(p), where=support)
    out = np.sum(p * np.log(ratio), axis=-1) / np.log(base)
    # rounding can give -1e-17 for identical inputs
    out = np.maximum(out, 0.0)
    return float(out) if out.ndim == 0 else out


def jsd(p, q) -> np.ndarray | float:
    """Jensen-Shannon divergence in bits, bounded by 1 and symmetric."""
    p = check_distribution(p)
    q = check_distribution(q)
    if p.shape[-1] != q.shape[-1]:
        raise ValueError("distributions must share one category list")
    p, q = np.broadcast_arrays(p, q)
    s = p + q
    # each half is KLD(x || (p + q) / 2), written as x log(2x / (p + q)) to avoid underflow in the midpoint
    half_p = np.where(p > 0, p * np.log2(np.divide(2 * p, s, out=np.ones_like(s), where=p > 0)), 0.0)
    half_q = np.where(q > 0, q * np.log2(np.divide(2 * q, s, out=np.ones_like(s), where=q > 0)), 0.0)
    out = np.clip(0.5 * np.sum(half_p + half_q, axis=-1), 0.0, 1.0)
    return float(out) if out.ndim == 0 else out
