"""Multi-object localization from self-supervised transformer patch features.

The library is organized around a small pipeline:

1. ``feature_store`` reads/writes per-image token feature grids (MOSTFEAT files).
2. ``similarity`` builds the token-by-token dot-product matrix.
3. ``eba`` flags foreground tokens by multi-scale entropy analysis of each
   token's similarity map.
4. ``pooler`` groups foreground token locations into pools.
5. ``boxer`` turns each pool into at most one pixel-space bounding box.
6. ``metrics`` scores predicted boxes against ground truth.
7. ``discovery`` clusters region descriptors into semantic groups.

``most.cli`` exposes the ``most`` command with ``localize``, ``eval``, ``viz``
and ``discover`` subcommands.
"""

from most.boxer import BoundingBox, BoxerConfig, localize_image
from most.eba import EbaConfig, foreground_tokens
from most.feature_store import (
    FeatureMap,
    FeatureStoreError,
    read_feature_map,
    validate,
    write_feature_map,
)
from most.metrics import EvalRecord, corloc, iou, oracle_best_box, recall_at_k
from most.pooler import ClusterConfig, Pool, cluster
from most.similarity import binarize, degrees, outer_product

__version__ = "0.1.0"

__all__ = [
    "BoundingBox",
    "BoxerConfig",
    "ClusterConfig",
    "EbaConfig",
    "EvalRecord",
    "FeatureMap",
    "FeatureStoreError",
    "Pool",
    "binarize",
    "cluster",
    "corloc",
    "degrees",
    "foreground_tokens",
    "iou",
    "localize_image",
    "oracle_best_box",
    "outer_product",
    "read_feature_map",
    "recall_at_k",
    "validate",
    "write_feature_map",
]
