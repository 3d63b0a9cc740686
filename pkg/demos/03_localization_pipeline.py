"""Walkthrough: the full localization pipeline, stage by stage.

Runs the two-blob fixture through similarity -> foreground vote -> pooling ->
box extraction, printing each intermediate, then runs the same thing through
the CLI on a scratch directory to show the file-level interface.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

from most.boxer import build_mask, core_token, localize_image, reduce_pool
from most.eba import foreground_tokens
from most.feature_store import write_feature_file
from most.pooler import cluster, index_to_coords
from most.similarity import binarize, degrees, outer_product
from most.synthetic import two_blob_feature_map

fmap, expected = two_blob_feature_map()
print(f"feature map: {fmap.grid_h}x{fmap.grid_w} tokens, d={fmap.dim}, "
      f"patch={fmap.patch}, image {fmap.img_w}x{fmap.img_h}")

sim = outer_product(fmap)
deg = degrees(binarize(sim))
fg = foreground_tokens(sim, fmap.grid_h, fmap.grid_w)
print(f"foreground tokens: {len(fg)} of {fmap.n_tokens}")

pools = cluster(fg, fmap.grid_h, fmap.grid_w)
print(f"pools: {len(pools)}")
for pool in pools:
    core = core_token(pool, deg)
    reduced = reduce_pool(pool, core, fmap)
    mask = build_mask(reduced, fmap)
    x, y = index_to_coords(core, fmap.grid_w)
    print(f"  pool {pool.id}: {pool.size} tokens, core at grid ({x},{y}) "
          f"with degree {deg[core]}, mask covers {int(mask.sum())} cells")

boxes = localize_image(fmap)
print("\nboxes (x1, y1, x2, y2):")
for box in boxes:
    print(f"  pool {box.pool_id}: {box.as_tuple()}  area={box.area}px")
print("expected:", expected)

# Same pipeline through the CLI: one .mfeat in, canonical JSON out.
with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    (tmp / "feats").mkdir()
    write_feature_file(fmap, tmp / "feats" / "demo.mfeat")
    subprocess.run(
        [sys.executable, "-m", "most.cli", "localize",
         "--input", str(tmp / "feats"), "--output", str(tmp / "boxes.json")],
        check=True,
    )
    doc = json.loads((tmp / "boxes.json").read_text())
    print("\nCLI output for image 'demo':")
    print(json.dumps(doc["images"]["demo"], indent=2))
