"""Synthetic feature-map generators for tests and demos.

No pretrained model is needed to exercise the pipeline: these builders plant
rectangular token blobs with a shared feature direction per blob on top of a
background that correlates negatively with every blob, which is exactly the
structure the pipeline keys on.
"""

from __future__ import annotations

import numpy as np

from most.feature_store import FeatureMap


def random_feature_map(
    grid_h: int = 14,
    grid_w: int = 14,
    dim: int = 16,
    patch: int = 16,
    seed: int = 0,
) -> FeatureMap:
    """I.i.d. standard-normal features; similarity maps look spatially random."""
    rng = np.random.default_rng(seed)
    data = rng.standard_normal((grid_h * grid_w, dim)).astype(np.float32)
    return FeatureMap(grid_h, grid_w, dim, patch, grid_h * patch, grid_w * patch, data)


def blob_feature_map(
    blobs: list[tuple[int, int, int, int]],
    grid_h: int = 14,
    grid_w: int = 14,
    patch: int = 16,
    noise_dim: int = 16,
    background_corr: float = -0.25,
    noise_scale: float = 1.0,
    seed: int = 0,
) -> tuple[FeatureMap, list[tuple[int, int, int, int]]]:
    """Plant axis-aligned token blobs with mutually orthogonal directions.

    Each blob is a half-open grid rectangle (r0, c0, r1, c1) whose tokens all
    share one basis direction; background tokens get ``background_corr`` along
    every blob direction plus i.i.d. noise in the remaining dimensions, so
    their similarity maps stay spatially random while blob maps are flat.

    Returns the map and the expected pixel boxes (one per blob, in order),
    which the pipeline should reproduce exactly.
    """
    rng = np.random.default_rng(seed)
    dim = len(blobs) + noise_dim
    data = np.zeros((grid_h * grid_w, dim), dtype=np.float64)

    in_blob = np.zeros(grid_h * grid_w, dtype=bool)
    for b, (r0, c0, r1, c1) in enumerate(blobs):
        if not (0 <= r0 < r1 <= grid_h and 0 <= c0 < c1 <= grid_w):
            raise ValueError(f"blob {b} out of grid bounds")
        for r in range(r0, r1):
            for c in range(c0, c1):
                idx = r * grid_w + c
                if in_blob[idx]:
                    raise ValueError("blobs must not overlap")
                in_blob[idx] = True
                data[idx, b] = 1.0

    background = ~in_blob
    data[background, : len(blobs)] = background_corr
    data[background, len(blobs):] = noise_scale * rng.standard_normal(
        (int(background.sum()), noise_dim)
    )

    fmap = FeatureMap(
        grid_h, grid_w, dim, patch, grid_h * patch, grid_w * patch,
        data.astype(np.float32),
    )
    expected = [
        (c0 * patch, r0 * patch, c1 * patch, r1 * patch) for r0, c0, r1, c1 in blobs
    ]
    return fmap, expected


def two_blob_feature_map(seed: int = 0) -> tuple[FeatureMap, list[tuple[int, int, int, int]]]:
    """The canonical two-object fixture: 4x4 blobs on a 14x14 grid, P=16."""
    return blob_feature_map([(2, 2, 6, 6), (8, 8, 12, 12)], seed=seed)


def planted_feature_map(
    seed: int,
    grid_h: int = 14,
    grid_w: int = 14,
    patch: int = 16,
    max_blobs: int = 3,
) -> FeatureMap:
    """Random fixture: 1-3 separated random blobs plus noise background.

    Blob placement is rejection-sampled with a 3-cell separation so default
    clustering keeps them in distinct pools. Useful as a corpus generator
    where the exact boxes do not matter but nontrivial output does.
    """
    rng = np.random.default_rng(seed)
    n_blobs = int(rng.integers(1, max_blobs + 1))
    blobs: list[tuple[int, int, int, int]] = []
    for _ in range(200):
        if len(blobs) == n_blobs:
            break
        bh = int(rng.integers(3, 6))
        bw = int(rng.integers(3, 6))
        r0 = int(rng.integers(0, grid_h - bh + 1))
        c0 = int(rng.integers(0, grid_w - bw + 1))
        cand = (r0, c0, r0 + bh, c0 + bw)
        if all(_separated(cand, other, margin=3) for other in blobs):
            blobs.append(cand)
    fmap, _ = blob_feature_map(
        blobs, grid_h=grid_h, grid_w=grid_w, patch=patch, seed=int(rng.integers(2**31)),
    )
    return fmap


def _separated(a: tuple[int, int, int, int], b: tuple[int, int, int, int], margin: int) -> bool:
    dr = max(a[0] - b[2], b[0] - a[2], 0)
    dc = max(a[1] - b[3], b[1] - a[3], 0)
    return dr + dc >= margin
