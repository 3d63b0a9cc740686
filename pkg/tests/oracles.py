"""Independent brute-force reference implementations used by the tests.

Everything here is deliberately naive (loops, BFS, union-find) and shares no
code with the library paths it checks.
"""

from __future__ import annotations

from collections import deque

import numpy as np


def naive_outer_product(feats: np.ndarray) -> np.ndarray:
    feats = np.asarray(feats, dtype=np.float64)
    n, d = feats.shape
    out = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(n):
            acc = 0.0
            for t in range(d):
                acc += feats[i, t] * feats[j, t]
            out[i, j] = acc
    return out


def naive_degrees(binary: np.ndarray) -> list[int]:
    n = binary.shape[0]
    return [sum(1 for j in range(n) if binary[i, j]) for i in range(n)]


def naive_mask(feats: np.ndarray, reduced: list[int]) -> list[bool]:
    feats = np.asarray(feats, dtype=np.float64)
    out = []
    for k in range(feats.shape[0]):
        acc = 0.0
        for c in reduced:
            dot = 0.0
            for t in range(feats.shape[1]):
                dot += feats[k, t] * feats[c, t]
            acc += dot
        out.append(acc >= 0.0)
    return out


def flood_fill_components(mask: np.ndarray, connectivity: int = 4) -> list[set]:
    """BFS flood fill; returns the set of true cells of each component."""
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    if connectivity == 4:
        steps = [(-1, 0), (1, 0), (0, -1), (0, 1)]
    else:
        steps = [(dr, dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1) if (dr, dc) != (0, 0)]
    seen = np.zeros_like(mask)
    comps = []
    for r in range(h):
        for c in range(w):
            if not mask[r, c] or seen[r, c]:
                continue
            comp = set()
            queue = deque([(r, c)])
            seen[r, c] = True
            while queue:
                cr, cc = queue.popleft()
                comp.add((cr, cc))
                for dr, dc in steps:
                    nr, nc = cr + dr, cc + dc
                    if 0 <= nr < h and 0 <= nc < w and mask[nr, nc] and not seen[nr, nc]:
                        seen[nr, nc] = True
                        queue.append((nr, nc))
            comps.append(comp)
    return comps


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def epsilon_graph_components(
    points: list[int], grid_w: int, epsilon: int, metric: str = "manhattan"
) -> list[tuple[int, ...]]:
    """Connected components of the all-pairs epsilon-adjacency graph.

    Canonicalized the same way the library canonicalizes pools: members
    sorted ascending, components ordered by smallest member.
    """
    pts = sorted(points)
    if not pts:
        return []
    xs = np.array([p % grid_w for p in pts])
    ys = np.array([p // grid_w for p in pts])
    dx = np.abs(xs[:, None] - xs[None, :])
    dy = np.abs(ys[:, None] - ys[None, :])
    dist = dx + dy if metric == "manhattan" else np.maximum(dx, dy)
    uf = UnionFind(len(pts))
    for i, j in zip(*np.nonzero(dist <= epsilon)):
        if i < j:
            uf.union(int(i), int(j))
    groups: dict[int, list[int]] = {}
    for i, p in enumerate(pts):
        groups.setdefault(uf.find(i), []).append(p)
    return sorted((tuple(sorted(g)) for g in groups.values()), key=lambda g: g[0])


def naive_iou(a, b) -> float:
    ax1, ay1, ax2, ay2 = a
    bx1, by1, bx2, by2 = b
    ix1, iy1 = max(ax1, bx1), max(ay1, by1)
    ix2, iy2 = min(ax2, bx2), min(ay2, by2)
    inter = max(0, ix2 - ix1) * max(0, iy2 - iy1)
    area_a = (ax2 - ax1) * (ay2 - ay1)
    area_b = (bx2 - bx1) * (by2 - by1)
    union = area_a + area_b - inter
    return inter / union if union > 0 else 0.0
