"""Walkthrough: the MOSTFEAT feature-file container.

Creates a small token grid, writes it to disk, reads it back bit-exact, and
shows what the validator reports for broken maps.
"""

import io

import numpy as np

from most.feature_store import (
    FeatureMap,
    FeatureStoreError,
    read_feature_map,
    validate,
    write_feature_map,
)

# A 14x14 grid of 8-dimensional tokens for a 224x224 image with 16px patches.
rng = np.random.default_rng(0)
fmap = FeatureMap(
    grid_h=14, grid_w=14, dim=8, patch=16, img_h=224, img_w=224,
    data=rng.standard_normal((196, 8)).astype(np.float32),
)
print("violations on a fresh map:", validate(fmap))

buf = io.BytesIO()
write_feature_map(fmap, buf)
raw = buf.getvalue()
print(f"serialized size: {len(raw)} bytes "
      f"(8 magic + 28 header + {fmap.n_tokens * fmap.dim * 4} payload)")

back = read_feature_map(io.BytesIO(raw))
print("round-trip equal:", np.array_equal(back.data, fmap.data))

# The writer refuses invalid maps before a single byte is emitted.
fmap.data[10, 0] = np.nan
print("violations after poking a NaN in:", validate(fmap))
try:
    write_feature_map(fmap, io.BytesIO())
except FeatureStoreError as exc:
    print(f"writer rejected it: code={exc.code}")

# The reader classifies corruption with distinct codes.
for mutation, blob in [
    ("bad magic", b"XXXXXXXX" + raw[8:]),
    ("truncated", raw[:-4]),
]:
    try:
        read_feature_map(io.BytesIO(blob))
    except FeatureStoreError as exc:
        print(f"{mutation:>10}: code={exc.code}")
