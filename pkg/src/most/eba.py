"""Entropy-based foreground classification of token similarity maps.

Each token's similarity map (one row of the token dot-product matrix,
reshaped to the grid) is scanned at several box sizes: the map is average
pooled, the entropy of the pooled values is measured, and the token is
called foreground when a strict majority of box sizes report entropy at or
below a size-dependent threshold. Foreground maps concentrate similarity
spatially, so they survive the vote; background maps look spatially random
and fail it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class KernelTooLarge(ValueError):
    """Signals that a box size exceeds the grid; the caller drops it from the vote."""


@dataclass(frozen=True)
class EbaConfig:
    """Knobs for the multi-scale entropy vote.

    kernels: box sizes used for pooling, strictly increasing, each >= 1.
        Sizes larger than min(grid_h, grid_w) are skipped per map and the
        vote denominator shrinks accordingly.
    tau_a / tau_b: intercept and slope of the entropy threshold
        ``tau_a + tau_b * ln(cells)`` applied to a pooled map with ``cells``
        elements. The intercept keeps the threshold positive for 1x1 maps.
    bins: histogram bin count for the probability mass function. Continuous
        maps have all-distinct values, so multiplicity is counted on a
        min-max-normalized equal-width histogram rather than exact equality.
    """

    kernels: tuple[int, ...] = (1, 2, 3, 4, 5)
    tau_a: float = 1.0
    tau_b: float = 0.5
    bins: int = 256

    def __post_init__(self):
        ks = tuple(int(k) for k in self.kernels)
        if not ks:
            raise ValueError("kernels must be nonempty")
        if any(k < 1 for k in ks):
            raise ValueError("kernels must all be >= 1")
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ValueError("kernels must be strictly increasing")
        if not 0.0 <= self.tau_b <= 1.0:
            raise ValueError("tau_b must be in [0, 1]")
        if self.bins < 2:
            raise ValueError("bins must be >= 2")
        object.__setattr__(self, "kernels", ks)


def pool_map(grid: np.ndarray, k: int) -> np.ndarray:
    """Average pool with non-overlapping k x k windows, stride k, ceil mode.

    Partial edge windows are averaged over their actual element count, so a
    constant map stays constant. Output shape is (ceil(h/k), ceil(w/k)).

    Raises:
        KernelTooLarge: when ``k`` exceeds min(h, w).
    """
    grid = np.asarray(grid, dtype=np.float64)
    h, w = grid.shape
    if k < 1:
        raise ValueError("kernel size must be >= 1")
    if k > min(h, w):
        raise KernelTooLarge(f"kernel {k} exceeds grid {h}x{w}")
    if k == 1:
        return grid.copy()
    row_starts = np.arange(0, h, k)
    col_starts = np.arange(0, w, k)
    sums = np.add.reduceat(np.add.reduceat(grid, row_starts, axis=0), col_starts, axis=1)
    row_counts = np.diff(np.append(row_starts, h))
    col_counts = np.diff(np.append(col_starts, w))
    return sums / np.outer(row_counts, col_counts)


def bin_indices(grid: np.ndarray, bins: int) -> np.ndarray:
    """Histogram bin index of every element after min-max normalization.

    Constant maps land entirely in bin 0; the maximum value lands in the
    last bin. Exposed separately so scale-invariance failures can be traced
    to bin-boundary ties.
    """
    x = np.asarray(grid, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError("map must be nonempty")
    lo = x.min()
    hi = x.max()
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise ValueError("map must be finite")
    if hi == lo:
        return np.zeros(x.size, dtype=np.int64)
    scaled = (x - lo) / (hi - lo) * bins
    return np.minimum(scaled.astype(np.int64), bins - 1)


def entropy(grid: np.ndarray, bins: int) -> float:
    """Shannon entropy (nats) of the binned value distribution of ``grid``.

    The map is flattened, min-max normalized to [0, 1], and assigned to
    ``bins`` equal-width bins; the pmf is the bin-count histogram divided by
    the element count. A constant map has single-bin support and entropy
    exactly 0.
    """
    idx = bin_indices(grid, bins)
    counts = np.bincount(idx, minlength=bins)
    pmf = counts[counts > 0] / idx.size
    return float(-(pmf * np.log(pmf)).sum())


def entropy_threshold(h: int, w: int, cfg: EbaConfig) -> float:
    """Vote threshold for a pooled map of shape (h, w): a + b * ln(h*w).

    An h x w map has maximum entropy ln(h*w); the slope puts the threshold
    midway up that range and the intercept keeps it nonzero for 1x1 maps.
    """
    if h < 1 or w < 1:
        raise ValueError("pooled map dimensions must be >= 1")
    return cfg.tau_a + cfg.tau_b * math.log(h * w)


def classify_row(
    row: np.ndarray, grid_h: int, grid_w: int, cfg: EbaConfig | None = None
) -> bool:
    """Majority vote over box sizes: is this similarity map foreground?

    For each usable kernel the row (reshaped to the grid) is pooled, its
    entropy compared against the size-dependent threshold, and the token is
    foreground iff strictly more than half the usable kernels vote yes.
    A tie at exactly 50% is background.
    """
    cfg = cfg or EbaConfig()
    grid = np.asarray(row, dtype=np.float64).reshape(grid_h, grid_w)
    usable = [k for k in cfg.kernels if k <= min(grid_h, grid_w)]
    votes = 0
    for k in usable:
        pooled = pool_map(grid, k)
        e = entropy(pooled, cfg.bins)
        if e <= entropy_threshold(pooled.shape[0], pooled.shape[1], cfg):
            votes += 1
    return votes / len(usable) > 0.5


def foreground_tokens(
    sim: np.ndarray, grid_h: int, grid_w: int, cfg: EbaConfig | None = None
) -> np.ndarray:
    """Linear indices of tokens whose similarity maps classify as foreground.

    Returns a sorted int64 array; may be empty (the pipeline then emits no
    boxes). Deterministic for fixed input bytes and config.
    """
    cfg = cfg or EbaConfig()
    sim = np.asarray(sim, dtype=np.float64)
    n = grid_h * grid_w
    if sim.shape != (n, n):
        raise ValueError(f"similarity matrix shape {sim.shape} does not match grid {grid_h}x{grid_w}")
    keep = [i for i in range(n) if classify_row(sim[i], grid_h, grid_w, cfg)]
    return np.asarray(keep, dtype=np.int64)
