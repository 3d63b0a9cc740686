"""Token similarity matrix, its binarization, and token degrees."""

from __future__ import annotations

import numpy as np

from most.feature_store import FeatureMap


def outer_product(fmap: FeatureMap) -> np.ndarray:
    """Return the N x N matrix of pairwise token dot products.

    Accumulates in float64 regardless of storage precision, and mirrors the
    upper triangle so the result is exactly symmetric (a single canonical
    accumulation order; avoids row/column-dependent float drift downstream).
    """
    feats = np.asarray(fmap.data, dtype=np.float64)
    sim = feats @ feats.T
    upper = np.triu(sim)
    return upper + np.triu(sim, 1).T


def binarize(sim: np.ndarray) -> np.ndarray:
    """Boolean matrix of strictly positive similarities (zeros map to False)."""
    return np.asarray(sim) > 0


def degrees(binary: np.ndarray) -> np.ndarray:
    """Row sums of the binarized similarity matrix, one count per token."""
    return np.asarray(binary, dtype=bool).sum(axis=1).astype(np.int64)
