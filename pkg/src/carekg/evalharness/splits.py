"""Stratified train/validation/test splits."""

from dataclasses import dataclass

import numpy as np

from ..errors import UsageError


@dataclass
class Split:
    train: np.ndarray
    val: np.ndarray
    test: np.ndarray

    def __iter__(self):
        return iter((self.train, self.val, self.test))


def _largest_remainder(n, fractions):
    """Integer counts summing to n, proportional to fractions.

    Remainders are awarded by size; ties go to the earlier bucket, so the
    training split wins them.
    """
    exact = np.asarray(fractions, dtype=np.float64) * n
    counts = np.floor(exact).astype(np.int64)
    short = n - counts.sum()
    order = sorted(range(len(fractions)), key=lambda i: (-(exact[i] - counts[i]), i))
    for i in order[:short]:
        counts[i] += 1
    return counts


def make_split(y, seed, fractions=(0.8, 0.1, 0.1)):
    """Shuffle each class and cut it proportionally into train/val/test.

    Index arrays come back sorted. Requires at least 10 samples so every
    bucket can be non-empty (10 samples of one class split 8/1/1).
    """
    y = np.asarray(y, dtype=np.int64)
    if abs(sum(fractions) - 1.0) > 1e-9 or len(fractions) != 3:
        raise UsageError(f"fractions must be three numbers summing to 1, got {fractions}")
    if y.size < 10:
        raise UsageError(f"need at least 10 samples to split, got {y.size}")
    rng = np.random.default_rng(seed)
    buckets = ([], [], [])
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        rng.shuffle(idx)
        counts = _largest_remainder(idx.size, fractions)
        stop = np.cumsum(counts)
        buckets[0].append(idx[:stop[0]])
        buckets[1].append(idx[stop[0]:stop[1]])
        buckets[2].append(idx[stop[1]:stop[2]])
    train, val, test = (np.sort(np.concatenate(b)) for b in buckets)
    return Split(train, val, test)
