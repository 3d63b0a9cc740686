"""Walkthrough: grouping region descriptors into semantic clusters.

Samples descriptors around four planted centers, scans cluster counts,
locates the knee of the inertia curve, and clusters with the selected k.
On real data the descriptors would be one vector per localized box.
"""

import numpy as np

from most.discovery import inertia_curve, kmeans_best_of, kneedle, subsample

rng = np.random.default_rng(0)
centers = rng.uniform(-10, 10, size=(4, 8))
descriptors = np.vstack([
    center + 0.3 * rng.standard_normal((40, 8)) for center in centers
])
print(f"corpus: {descriptors.shape[0]} region descriptors of dim {descriptors.shape[1]}")

# On a large corpus only a subsample feeds the k scan.
sample = subsample(list(range(len(descriptors))), m=120, seed=0)
matrix = descriptors[sample]
print(f"subsampled {len(sample)} descriptors for the scan")

k_values = list(range(1, 11))
inertias = inertia_curve(matrix, k_values, seed=0, restarts=4)
print("\n   k   inertia")
for k, v in zip(k_values, inertias):
    bar = "#" * int(60 * v / inertias[0])
    print(f"  {k:2d}   {v:10.2f} {bar}")

best_k = kneedle(k_values, inertias)
print(f"\nknee of the curve: k = {best_k} (4 centers were planted)")

model = kmeans_best_of(matrix, best_k, seed=0, restarts=4)
sizes = np.bincount(model.labels, minlength=best_k)
print(f"final clustering inertia {model.inertia:.2f}, cluster sizes {sizes.tolist()}")
