"""Evaluation of predicted boxes against ground truth.

Covers IoU, correct-localization rate (at least one prediction overlapping
some ground-truth box above threshold), ranked recall@k, and the
best-overlap single-box selection used for single-object scoring of a
multi-box method.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from most.boxer import BoundingBox

logger = logging.getLogger(__name__)

Box = tuple[float, float, float, float]


@dataclass
class EvalRecord:
    """Predictions and ground truth for one image.

    Predictions are ranked by pool size (descending, ties to the lower pool
    id): a larger pool is stronger foreground evidence.
    """

    image_id: str
    predictions: list[BoundingBox] = field(default_factory=list)
    ground_truth: list[Box] = field(default_factory=list)

    def ranked_predictions(self) -> list[BoundingBox]:
        return sorted(self.predictions, key=lambda b: (-b.pool_size, b.pool_id))


def iou(a, b) -> float:
    """Intersection over union of two half-open boxes; 0 when disjoint."""
    ax1, ay1, ax2, ay2 = _as_xyxy(a)
    bx1, by1, bx2, by2 = _as_xyxy(b)
    area_a = max(0.0, ax2 - ax1) * max(0.0, ay2 - ay1)
    area_b = max(0.0, bx2 - bx1) * max(0.0, by2 - by1)
    if area_a <= 0.0 or area_b <= 0.0:
        logger.warning("degenerate zero-area box in IoU: %s vs %s", a, b)
        return 0.0
    iw = min(ax2, bx2) - max(ax1, bx1)
    ih = min(ay2, by2) - max(ay1, by1)
    if iw <= 0.0 or ih <= 0.0:
        return 0.0
    inter = iw * ih
    return inter / (area_a + area_b - inter)


def corloc(records: list[EvalRecord], thresh: float = 0.5) -> float:
    """Fraction of images where some prediction overlaps some ground-truth
    box with IoU strictly above ``thresh``.

    Images with no predictions count as failures; every record must carry at
    least one ground-truth box.
    """
    if not records:
        raise ValueError("corloc needs at least one record")
    hits = 0
    for rec in records:
        if not rec.ground_truth:
            raise ValueError(f"record {rec.image_id} has no ground-truth boxes")
        if any(
            iou(p, g) > thresh for p in rec.predictions for g in rec.ground_truth
        ):
            hits += 1
    return hits / len(records)


def oracle_best_box(record: EvalRecord) -> BoundingBox | None:
    """Prediction with the highest best-overlap against any ground-truth box.

    Best-case single-box selection for scoring a multi-box method on a
    single-object protocol. Ties break to the lowest pool id; no predictions
    yields None.
    """
    if not record.predictions:
        return None
    return min(
        record.predictions,
        key=lambda p: (
            -max((iou(p, g) for g in record.ground_truth), default=0.0),
            p.pool_id,
        ),
    )


def recall_at_k(records: list[EvalRecord], k: int, thresh: float = 0.5) -> float:
    """Fraction of all ground-truth boxes matched by the top-k predictions.

    Matching is greedy one-to-one in rank order: each prediction claims the
    unmatched ground-truth box it overlaps most, provided IoU > thresh.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    total_gt = 0
    matched = 0
    for rec in records:
        total_gt += len(rec.ground_truth)
        unmatched = list(range(len(rec.ground_truth)))
        for pred in rec.ranked_predictions()[:k]:
            if not unmatched:
                break
            best_j = max(unmatched, key=lambda j: iou(pred, rec.ground_truth[j]))
            if iou(pred, rec.ground_truth[best_j]) > thresh:
                unmatched.remove(best_j)
                matched += 1
    if total_gt == 0:
        raise ValueError("no ground-truth boxes in records")
    return matched / total_gt


def mean_boxes_per_image(counts: list[int]) -> float:
    if not counts:
        raise ValueError("no images")
    return sum(counts) / len(counts)


def _as_xyxy(box) -> Box:
    if isinstance(box, BoundingBox):
        return (float(box.x1), float(box.y1), float(box.x2), float(box.y2))
    x1, y1, x2, y2 = box
    return (float(x1), float(y1), float(x2), float(y2))
