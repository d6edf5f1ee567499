"""Synthetic viewpoint rankings by weighted sampling without replacement.

Random streams come from numpy's PCG64 seeded with
``SeedSequence(base_seed, spawn_key=(replicate,))``, so replicate ``k``
of a batch is reproducible on its own and independent of the others.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .kernels import DEFAULT_PROTECTED, LABELS

OPPOSING = (-3, -2, -1)


@dataclass(frozen=True)
class LabelSet:
    name: str
    counts: tuple[int, ...]  # aligned with LABELS

    def __post_init__(self):
        if len(self.counts) != len(LABELS) or any(c < 0 for c in self.counts):
            raise ValueError(f"{self.name}: need 7 non-negative counts, got {self.counts}")
        if sum(self.counts) < 1:
            raise ValueError(f"{self.name}: empty label set")

    @property
    def total(self) -> int:
        return sum(self.counts)

    def count(self, label: int) -> int:
        return self.counts[LABELS.index(label)]

    def items(self) -> np.ndarray:
        return np.repeat(np.array(LABELS, dtype=np.int64), self.counts)


SETS = {
    "S1": LabelSet("S1", (100, 100, 100, 100, 100, 100, 100)),
    "S2": LabelSet("S2", (80, 80, 80, 115, 115, 115, 115)),
    "S3": LabelSet("S3", (60, 60, 60, 130, 130, 130, 130)),
}


@dataclass(frozen=True)
class AlphaWeights:
    alpha: float
    w1: float
    w2: float

    def swapped(self) -> "AlphaWeights":
        return AlphaWeights(-self.alpha, self.w2, self.w1)


def weights_for(alpha: float) -> AlphaWeights:
    """Sampling weights for bias ``alpha``: w1 = 1.0001 - alpha, w2 = 1.0001 + alpha."""
    if not -1.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [-1, 1], got {alpha}")
    return AlphaWeights(alpha, 1.0001 - 1 * alpha, 1.0001 + 1 * alpha)


@dataclass(frozen=True)
class ScenarioConfig:
    """Which labels receive w1.

    binomial: the fixed protected labels (the opposing ones by default).
    multinomial: one opposing label, chosen uniformly per replicate.
    """

    kind: str
    protected: frozenset[int] = DEFAULT_PROTECTED

    def __post_init__(self):
        if self.kind not in ("binomial", "multinomial"):
            raise ValueError(f"unknown scenario {self.kind!r}")

    def weight_map(self, alpha: float, rng: np.random.Generator | None = None) -> dict[int, float]:
        w = weights_for(alpha)
        if self.kind == "binomial":
            favored = self.protected
        else:
            if rng is None:
                raise ValueError("multinomial scenario needs a random stream")
            favored = {OPPOSING[int(rng.integers(len(OPPOSING)))]}
        return {label: (w.w1 if label in favored else w.w2) for label in LABELS}


BINOMIAL = ScenarioConfig("binomial")
MULTINOMIAL = ScenarioConfig("multinomial")


@dataclass(frozen=True)
class SeededStream:
    base_seed: int
    replicate: int

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.base_seed, spawn_key=(self.replicate,))
        return np.random.Generator(np.random.PCG64(seq))


def _as_rng(stream) -> np.random.Generator:
    if isinstance(stream, np.random.Generator):
        return stream
    if isinstance(stream, SeededStream):
        return stream.generator()
    return np.random.default_rng(stream)


def sample_ranking(label_set: LabelSet, weight_map: Mapping[int, float], stream, method: str = "keys") -> np.ndarray:
    """Draw every item of ``label_set`` in sequence, each time picking a remaining
    item with probability proportional to its label's weight.

    ``method="sequential"`` performs the draws literally (one categorical draw
    per rank over the remaining per-label mass). ``method="keys"`` gives the
    same distribution in one vectorized pass: each item gets an arrival time
    ``Exp(1) / weight`` and items are ranked by arrival, because the first of
    independent exponential clocks is item j with probability w_j / sum(w).
    """
    rng = _as_rng(stream)
    weights = np.array([weight_map[label] for label in LABELS], dtype=np.float64)
    if np.any(weights <= 0):
        raise ValueError("sample weights must be positive")
    if method == "keys":
        items = label_set.items()
        arrival = rng.standard_exponential(items.size) / weights[np.searchsorted(LABELS, items)]
        return items[np.argsort(arrival, kind="stable")]
    if method == "sequential":
        remaining = np.array(label_set.counts, dtype=np.float64)
        out = np.empty(label_set.total, dtype=np.int64)
        for pos in range(label_set.total):
            mass = remaining * weights
            cum = np.cumsum(mass)
            k = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
            k = min(k, len(LABELS) - 1)
            while remaining[k] == 0:  # guards u * total landing exactly on a boundary
                k -= 1
            remaining[k] -= 1
            out[pos] = LABELS[k]
        return out
    raise ValueError(f"unknown sampling method {method!r}")


def _replicate(label_set, scenario, alpha, base_seed, k, method):
    rng = SeededStream(base_seed, k).generator()
    wmap = scenario.weight_map(alpha, rng)
    return sample_ranking(label_set, wmap, rng, method=method), wmap


def generate_batch(
    label_set: LabelSet,
    scenario: ScenarioConfig,
    alpha: float,
    replicates: int,
    base_seed: int,
    threads: int = 1,
    method: str = "keys",
) -> list[tuple[np.ndarray, dict[int, float]]]:
    """``replicates`` rankings, the k-th drawn from stream ``(base_seed, k)``."""
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    weights_for(alpha)
    jobs = range(replicates)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(lambda k: _replicate(label_set, scenario, alpha, base_seed, k, method), jobs))
    return [_replicate(label_set, scenario, alpha, base_seed, k, method) for k in jobs]
