"""Semantic grouping of localized regions.

Region descriptors (one vector per box, produced externally) are clustered
with k-means; the cluster count is chosen automatically from the knee of the
inertia-versus-k curve. Subsampling keeps the curve computation tractable on
large corpora.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence, TypeVar

import numpy as np

T = TypeVar("T")


@dataclass(frozen=True)
class RegionFeature:
    """Descriptor vector for one localized region."""

    image_id: str
    box: tuple[int, int, int, int] | None
    vector: np.ndarray


@dataclass
class ClusterAssignment:
    k: int
    labels: np.ndarray
    centroids: np.ndarray
    inertia: float
    inertia_history: list[float]


def kmeans(features: np.ndarray, k: int, seed: int = 0) -> ClusterAssignment:
    """Lloyd's algorithm from greedy farthest-point initialization.

    The seed fixes the first center; every later choice (farthest point,
    nearest centroid, empty-cluster reseed) breaks ties to the lowest index,
    so the run is fully deterministic. Iterates until the relative inertia
    improvement drops below 1e-6 or 300 iterations. Inertia is nonincreasing
    across iterations; the history is recorded for auditing.

    An empty cluster is reseeded to the point farthest from its assigned
    centroid, which never increases inertia.
    """
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("features must be a 2-D array")
    n = x.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")

    rng = np.random.default_rng(seed)
    centroids = np.empty((k, x.shape[1]), dtype=np.float64)
    centroids[0] = x[int(rng.integers(n))]
    d2 = _sq_dists(x, centroids[:1]).min(axis=1)
    for j in range(1, k):
        centroids[j] = x[int(np.argmax(d2))]
        d2 = np.minimum(d2, _sq_dists(x, centroids[j : j + 1])[:, 0])

    history: list[float] = []
    labels = np.zeros(n, dtype=np.int64)
    for _ in range(300):
        labels = _sq_dists(x, centroids).argmin(axis=1)
        point_cost = _exact_cost(x, centroids, labels)

        empty = [j for j in range(k) if not (labels == j).any()]
        for j in empty:
            centroids[j] = x[int(np.argmax(point_cost))]
            labels = _sq_dists(x, centroids).argmin(axis=1)
            point_cost = _exact_cost(x, centroids, labels)

        inertia = float(point_cost.sum())
        history.append(inertia)
        if len(history) > 1 and history[-2] - inertia < 1e-6 * max(history[-2], 1e-12):
            break
        for j in range(k):
            mask = labels == j
            if mask.any():
                centroids[j] = x[mask].mean(axis=0)

    # Final assignment against the centroids actually returned.
    labels = _sq_dists(x, centroids).argmin(axis=1)
    inertia = float(_exact_cost(x, centroids, labels).sum())
    return ClusterAssignment(k, labels, centroids, inertia, history)


def kmeans_best_of(
    features: np.ndarray, k: int, seed: int = 0, restarts: int = 8
) -> ClusterAssignment:
    """Best of ``restarts`` deterministic runs with consecutive seeds.

    Restarts smooth out local optima so the inertia-versus-k curve comes out
    monotone; ties keep the earliest restart.
    """
    best: ClusterAssignment | None = None
    for r in range(restarts):
        cand = kmeans(features, k, seed=seed + r)
        if best is None or cand.inertia < best.inertia:
            best = cand
    assert best is not None
    return best


def inertia_curve(
    features: np.ndarray, k_values: Sequence[int], seed: int = 0, restarts: int = 8
) -> list[float]:
    return [kmeans_best_of(features, k, seed=seed, restarts=restarts).inertia for k in k_values]


def kneedle(k_values: Sequence[int], inertias: Sequence[float]) -> int:
    """Knee of a decreasing inertia curve: max distance above the chord.

    Both axes are normalized to [0, 1] and the difference between the
    normalized decreasing curve and the straight chord from first to last
    point is maximized; ties go to the smaller k. A flat or knee-less curve
    returns the smallest k with a warning.
    """
    ks = np.asarray(list(k_values), dtype=np.float64)
    ys = np.asarray(list(inertias), dtype=np.float64)
    if ks.size != ys.size:
        raise ValueError("k_values and inertias must have equal length")
    if ks.size < 3:
        raise ValueError("kneedle needs at least 3 points")
    if np.any(np.diff(ks) <= 0):
        raise ValueError("k_values must be strictly increasing")
    if np.any(np.diff(ys) > 0):
        raise ValueError("inertias must be nonincreasing")
    if np.any(ys < 0):
        raise ValueError("inertias must be nonnegative")

    if ys[0] == ys[-1]:
        warnings.warn("flat inertia curve has no knee; returning smallest k")
        return int(ks[0])
    xn = (ks - ks[0]) / (ks[-1] - ks[0])
    yn = (ys - ys[-1]) / (ys[0] - ys[-1])
    gap = (1.0 - xn) - yn
    if gap.max() <= 1e-12:
        warnings.warn("inertia curve has no knee above its chord; returning smallest k")
        return int(ks[0])
    return int(ks[int(np.argmax(gap))])


def assign(features: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """Label each feature with its nearest centroid (memory-safe at corpus scale)."""
    x = np.asarray(features, dtype=np.float64)
    return _sq_dists(x, np.asarray(centroids, dtype=np.float64)).argmin(axis=1)


def subsample(items: Sequence[T], m: int = 10000, seed: int = 0) -> list[T]:
    """Uniform sample of min(m, n) items without replacement, corpus order.

    Deterministic for a fixed seed; returns everything when the corpus is
    already small enough.
    """
    n = len(items)
    if n <= m:
        return list(items)
    rng = np.random.default_rng(seed)
    picked = np.sort(rng.choice(n, size=m, replace=False))
    return [items[int(i)] for i in picked]


def _sq_dists(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    # ||x - c||^2 expanded; clip guards tiny negative rounding artifacts.
    d2 = (
        (x * x).sum(axis=1)[:, None]
        - 2.0 * (x @ centers.T)
        + (centers * centers).sum(axis=1)[None, :]
    )
    return np.maximum(d2, 0.0)


def _exact_cost(x: np.ndarray, centroids: np.ndarray, labels: np.ndarray) -> np.ndarray:
    # Direct subtraction so a point sitting on its centroid costs exactly 0.
    diff = x - centroids[labels]
    return (diff * diff).sum(axis=1)
