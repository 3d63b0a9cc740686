"""Per-pool bounding-box extraction.

Each pool yields at most one pixel-space box: pick the pool member with the
lowest degree in the binarized similarity matrix (the core token), drop pool
members that do not correlate positively with it, threshold the summed
similarity of every token against the reduced pool into a binary mask, and
take the bounding box of the mask island containing the core token. Trivial
boxes (tiny area, or covering essentially the whole image) are filtered out.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from most import eba, pooler, similarity
from most.feature_store import FeatureMap
from most.pooler import ClusterConfig, Pool

logger = logging.getLogger(__name__)

_STRUCTURES = {
    4: np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool),
    8: np.ones((3, 3), dtype=bool),
}


class DegenerateCoreError(ValueError):
    """The core token has a zero feature vector; the pool emits no box."""


@dataclass(frozen=True)
class BoxerConfig:
    """Box extraction knobs.

    min_area: boxes with pixel area strictly below this are dropped (256 by
        default, so a single 16px patch survives).
    whole_image_fraction: boxes covering at least this fraction of the image
        are dropped; exact-full-image would never fire after clipping slack,
        hence a fraction rather than equality.
    connectivity: island connectivity on the binary mask, 4 or 8.
    """

    min_area: int = 256
    whole_image_fraction: float = 0.95
    connectivity: int = 4

    def __post_init__(self):
        if self.min_area < 0:
            raise ValueError("min_area must be >= 0")
        if not 0.0 < self.whole_image_fraction <= 1.0:
            raise ValueError("whole_image_fraction must be in (0, 1]")
        if self.connectivity not in (4, 8):
            raise ValueError("connectivity must be 4 or 8")


@dataclass(frozen=True)
class BoundingBox:
    """Pixel-space box, half-open [x1, x2) x [y1, y2), with provenance."""

    x1: int
    y1: int
    x2: int
    y2: int
    pool_id: int
    core_token: int
    pool_size: int

    @property
    def area(self) -> int:
        return (self.x2 - self.x1) * (self.y2 - self.y1)

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.x1, self.y1, self.x2, self.y2)

    def to_dict(self) -> dict:
        return {
            "x1": self.x1,
            "y1": self.y1,
            "x2": self.x2,
            "y2": self.y2,
            "pool_id": self.pool_id,
            "core_token": self.core_token,
            "pool_size": self.pool_size,
        }


def core_token(pool: Pool, deg: np.ndarray) -> int:
    """Pool member with minimum degree; ties break to the lowest index."""
    if not pool.members:
        raise ValueError("pool must be nonempty")
    return min(pool.members, key=lambda c: (int(deg[c]), c))


def reduce_pool(pool: Pool, core: int, fmap: FeatureMap) -> tuple[int, ...]:
    """Members whose features correlate strictly positively with the core.

    Always contains the core itself when its feature is nonzero; a zero core
    feature is degenerate and the pool emits no box.
    """
    feats = np.asarray(fmap.data, dtype=np.float64)
    core_feat = feats[core]
    if not core_feat.any():
        raise DegenerateCoreError(f"core token {core} has a zero feature vector")
    return tuple(c for c in pool.members if float(feats[c] @ core_feat) > 0.0)


def build_mask(reduced: tuple[int, ...], fmap: FeatureMap) -> np.ndarray:
    """Binary grid mask: summed similarity against the reduced pool is >= 0.

    The threshold is non-strict by design, while pool reduction and the
    binarized matrix use strict positivity; the asymmetry is intentional.
    The mask is always true at the core token.
    """
    if not reduced:
        raise ValueError("reduced pool must be nonempty")
    feats = np.asarray(fmap.data, dtype=np.float64)
    pooled_sum = feats[list(reduced)].sum(axis=0)
    scores = feats @ pooled_sum
    return (scores >= 0.0).reshape(fmap.grid_h, fmap.grid_w)


def islands(mask: np.ndarray, connectivity: int = 4) -> tuple[np.ndarray, int]:
    """Label connected components of a boolean grid; 0 marks background."""
    labels, count = ndimage.label(np.asarray(mask, dtype=bool), structure=_STRUCTURES[connectivity])
    return labels, int(count)


def extract_box(
    labels: np.ndarray,
    pool: Pool,
    core: int,
    fmap: FeatureMap,
    cfg: BoxerConfig | None = None,
) -> BoundingBox | None:
    """Bounding box of the island containing the core token, filtered.

    Token-grid extremes map to pixels as half-open multiples of the patch
    size, clipped to the image bounds (absorbing padding slack). Returns
    None when the box fails the trivial-box filter.
    """
    cfg = cfg or BoxerConfig()
    x, y = pooler.index_to_coords(core, fmap.grid_w)
    comp = labels[y, x]
    if comp == 0:
        raise ValueError("core token cell is not set in the mask")
    rows, cols = np.nonzero(labels == comp)
    p = fmap.patch
    x1 = int(cols.min()) * p
    y1 = int(rows.min()) * p
    x2 = min((int(cols.max()) + 1) * p, fmap.img_w)
    y2 = min((int(rows.max()) + 1) * p, fmap.img_h)
    area = (x2 - x1) * (y2 - y1)
    if area < cfg.min_area:
        logger.debug("pool %d: dropped box with area %d < %d", pool.id, area, cfg.min_area)
        return None
    if area >= cfg.whole_image_fraction * fmap.img_w * fmap.img_h:
        logger.debug("pool %d: dropped near-whole-image box (area %d)", pool.id, area)
        return None
    return BoundingBox(x1, y1, x2, y2, pool.id, core, pool.size)


def localize_image(
    fmap: FeatureMap,
    eba_cfg: eba.EbaConfig | None = None,
    cluster_cfg: ClusterConfig | None = None,
    boxer_cfg: BoxerConfig | None = None,
) -> list[BoundingBox]:
    """Run the full pipeline on one feature map: at most one box per pool.

    Fully deterministic; boxes come back ordered by pool id. An empty
    foreground set (or all pools filtered) yields an empty list.
    """
    eba_cfg = eba_cfg or eba.EbaConfig()
    cluster_cfg = cluster_cfg or ClusterConfig()
    boxer_cfg = boxer_cfg or BoxerConfig()

    sim = similarity.outer_product(fmap)
    deg = similarity.degrees(similarity.binarize(sim))
    fg = eba.foreground_tokens(sim, fmap.grid_h, fmap.grid_w, eba_cfg)
    pools = pooler.cluster(fg, fmap.grid_h, fmap.grid_w, cluster_cfg)

    boxes: list[BoundingBox] = []
    for pool in pools:
        core = core_token(pool, deg)
        try:
            reduced = reduce_pool(pool, core, fmap)
        except DegenerateCoreError:
            logger.debug("pool %d: degenerate core token %d, no box", pool.id, core)
            continue
        if not reduced:
            continue
        mask = build_mask(reduced, fmap)
        labels, _ = islands(mask, boxer_cfg.connectivity)
        box = extract_box(labels, pool, core, fmap, boxer_cfg)
        if box is not None:
            boxes.append(box)
    return boxes
