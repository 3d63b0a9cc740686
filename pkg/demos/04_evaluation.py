"""Walkthrough: scoring predicted boxes against ground truth.

Builds a tiny three-image corpus by hand and walks through IoU, the
correct-localization rate, ranked recall, and best-overlap selection.
"""

from most.boxer import BoundingBox
from most.metrics import EvalRecord, corloc, iou, oracle_best_box, recall_at_k


def box(x1, y1, x2, y2, pool_id=0, pool_size=1):
    return BoundingBox(x1, y1, x2, y2, pool_id=pool_id, core_token=0, pool_size=pool_size)


print("iou of (0,0,2,2) vs (1,1,3,3):", iou((0, 0, 2, 2), (1, 1, 3, 3)), "= 1/7")

records = [
    # Two objects; the big pool nails the first, a small pool nails the second.
    EvalRecord(
        "street",
        predictions=[
            box(0, 0, 100, 100, pool_id=0, pool_size=10),
            box(150, 150, 200, 200, pool_id=1, pool_size=5),
            box(100, 100, 200, 200, pool_id=2, pool_size=3),
        ],
        ground_truth=[(0, 0, 100, 100), (100, 100, 200, 200)],
    ),
    # One object, localized a bit loosely but above the 0.5 bar.
    EvalRecord(
        "kitchen",
        predictions=[box(60, 60, 160, 160, pool_id=0, pool_size=8)],
        ground_truth=[(50, 50, 150, 150)],
    ),
    # One object the pipeline missed entirely.
    EvalRecord("garden", predictions=[], ground_truth=[(0, 0, 50, 50)]),
]

print(f"\ncorloc             : {corloc(records):.4f}  (2 of 3 images localized)")
for k in (1, 2, 3):
    print(f"recall@{k}           : {recall_at_k(records, k):.4f}")

print("\nsingle-box (best-overlap) selections:")
for record in records:
    best = oracle_best_box(record)
    if best is None:
        print(f"  {record.image_id}: no predictions")
    else:
        best_iou = max(iou(best, g) for g in record.ground_truth)
        print(f"  {record.image_id}: pool {best.pool_id} at {best.as_tuple()}, "
              f"best IoU {best_iou:.3f}")
