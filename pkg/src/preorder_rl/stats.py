"""Robust aggregate statistics for small batches of run scores."""

from __future__ import annotations

from collections.abc import Callable

import numpy as np


def _scores(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        raise ValueError("need at least one score")
    if not np.all(np.isfinite(arr)):
        raise ValueError("scores must be finite")
    return arr


def iqm(values) -> float:
    """Interquartile mean: drop the lowest and highest quarter
    (floor(n / 4) values each) and average the rest."""
    arr = np.sort(_scores(values))
    k = arr.size // 4
    return float(arr[k: arr.size - k].mean())


def optimality_gap(values, target: float = 1.0) -> float:
    """Mean shortfall below ``target``; scores above it contribute zero."""
    arr = _scores(values)
    return float(np.maximum(0.0, target - arr).mean())


def prob_improvement(values_x, values_y) -> float:
    """Probability that a random score from x beats one from y, counting
    ties as one half.  Identical batches therefore give exactly 0.5."""
    x = _scores(values_x)
    y = _scores(values_y)
    wins = (x[:, None] > y[None, :]).sum()
    ties = (x[:, None] == y[None, :]).sum()
    return float((wins + 0.5 * ties) / (x.size * y.size))


def bootstrap_ci(statistic: Callable[[np.ndarray], float], values,
                 n_resamples: int = 2000, confidence: float = 0.95,
                 rng: np.random.Generator | None = None) -> tuple[float, float]:
    """Percentile bootstrap interval for ``statistic`` over the scores.

    Resampling is driven by ``rng`` (a fresh default generator when
    None), so intervals reproduce exactly for a fixed seed.
    """
    if n_resamples < 100:
        raise ValueError(f"need at least 100 resamples, got {n_resamples}")
    if not (0.0 < confidence < 1.0):
        raise ValueError(f"confidence must lie in (0, 1), got {confidence}")
    arr = _scores(values)
    if rng is None:
        rng = np.random.default_rng()
    idx = rng.integers(0, arr.size, size=(n_resamples, arr.size))
    samples = np.array([statistic(arr[row]) for row in idx])
    tail = 100.0 * (1.0 - confidence) / 2.0
    lo, hi = np.percentile(samples, [tail, 100.0 - tail])
    return float(lo), float(hi)
