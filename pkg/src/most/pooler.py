"""Grouping of foreground token locations into pools.

Foreground tokens are clustered on their integer grid coordinates with
DBSCAN. With the default ``min_pts=1`` every point is a core point, so the
pools are exactly the connected components of the graph joining points
within the distance threshold.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

METRICS = ("manhattan", "chebyshev")


@dataclass(frozen=True)
class ClusterConfig:
    """Density-clustering knobs.

    epsilon: neighborhood radius in grid units (integer patch coordinates).
    min_pts: DBSCAN core-point density, neighborhood count including the
        point itself. 1 by default so no foreground token is ever discarded
        as noise and the pools partition the foreground set.
    metric: ``manhattan`` as the primary distance; ``chebyshev`` joins only
        the 8 surrounding cells at epsilon=1 and is offered for
        experimentation.
    """

    epsilon: int = 2
    min_pts: int = 1
    metric: str = "manhattan"

    def __post_init__(self):
        if self.epsilon < 1:
            raise ValueError("epsilon must be >= 1")
        if self.min_pts < 1:
            raise ValueError("min_pts must be >= 1")
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}")


@dataclass(frozen=True)
class Pool:
    """One cluster of foreground tokens; members are sorted linear indices."""

    id: int
    members: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.members)


def index_to_coords(p: int, grid_w: int) -> tuple[int, int]:
    """Convert a linear token index to (x, y) grid coordinates.

    Examples:
        >>> index_to_coords(0, 14)
        (0, 0)
        >>> index_to_coords(14, 14)
        (0, 1)
    """
    if p < 0:
        raise ValueError("index must be nonnegative")
    return p % grid_w, p // grid_w


def coords_to_index(x: int, y: int, grid_w: int) -> int:
    return y * grid_w + x


def _neighbor_offsets(epsilon: int, metric: str) -> list[tuple[int, int]]:
    offs = []
    for dy in range(-epsilon, epsilon + 1):
        for dx in range(-epsilon, epsilon + 1):
            if dx == 0 and dy == 0:
                continue
            dist = abs(dx) + abs(dy) if metric == "manhattan" else max(abs(dx), abs(dy))
            if dist <= epsilon:
                offs.append((dx, dy))
    return offs


def cluster(
    fg, grid_h: int, grid_w: int, cfg: ClusterConfig | None = None
) -> list[Pool]:
    """DBSCAN over foreground token grid coordinates.

    Pool count emerges from the data. Output is canonicalized so it does not
    depend on the iteration order of ``fg``: members are sorted ascending and
    pools are numbered by their smallest member index. An empty foreground
    set yields an empty list.

    With ``min_pts > 1`` non-core points unreachable from any core point are
    DBSCAN noise and are dropped (the partition invariant then no longer
    holds; the default never drops points).
    """
    cfg = cfg or ClusterConfig()
    points = sorted({int(p) for p in fg})
    n = grid_h * grid_w
    if points and (points[0] < 0 or points[-1] >= n):
        raise ValueError("foreground index out of range for grid")
    if not points:
        return []

    coords = {p: index_to_coords(p, grid_w) for p in points}
    present = {xy: p for p, xy in coords.items()}
    offsets = _neighbor_offsets(cfg.epsilon, cfg.metric)

    neighbors: dict[int, list[int]] = {}
    for p in points:
        x, y = coords[p]
        found = [
            present[(x + dx, y + dy)]
            for dx, dy in offsets
            if (x + dx, y + dy) in present
        ]
        neighbors[p] = sorted(found)

    core = {p: len(neighbors[p]) + 1 >= cfg.min_pts for p in points}

    # Seeds expand in ascending index order, which fixes the border-point
    # assignment that plain DBSCAN leaves to traversal order.
    labels: dict[int, int] = {}
    next_label = 0
    for seed in points:
        if seed in labels or not core[seed]:
            continue
        labels[seed] = next_label
        queue = deque([seed])
        while queue:
            q = queue.popleft()
            if not core[q]:
                continue
            for r in neighbors[q]:
                if r not in labels:
                    labels[r] = next_label
                    queue.append(r)
        next_label += 1

    groups: dict[int, list[int]] = {}
    for p, lab in labels.items():
        groups.setdefault(lab, []).append(p)
    member_lists = sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])
    return [Pool(i, tuple(g)) for i, g in enumerate(member_lists)]
