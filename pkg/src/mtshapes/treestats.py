"""Per-shape statistics and sample-level aggregation.

The block size of an internal node is its total child count (leaves plus
internal children); summed over nodes this is always N + K - 1, so the
average block size is determined by (N, K).  An m-tip cherry is a node
whose children are exactly m leaves.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .shapes import TreeShape

__all__ = ["ShapeStats", "StatsSummary", "shape_stats", "aggregate", "lower_median"]


@dataclass(frozen=True)
class ShapeStats:
    """Summary of one shape: tips, internal nodes, block sizes, cherries."""

    n: int
    k: int
    max_block: int
    avg_block: float
    cherries: tuple[tuple[int, int], ...]  # (m, count), ascending m

    def cherry_count(self, m: int) -> int:
        return dict(self.cherries).get(m, 0)


def shape_stats(shape: TreeShape) -> ShapeStats:
    """Block-size and cherry statistics of a single shape."""
    counts = shape.children_counts()
    blocks = [k + l for k, l in counts]
    n, kk = shape.n_tips, shape.n_internal
    cherries = Counter(l for k, l in counts if k == 0)
    return ShapeStats(
        n=n,
        k=kk,
        max_block=max(blocks),
        avg_block=(n + kk - 1) / kk,
        cherries=tuple(sorted(cherries.items())),
    )


def lower_median(values: Sequence[float]) -> float:
    """Median with the lower convention for even-length samples."""
    if not values:
        raise ValueError("median of an empty sample")
    return sorted(values)[(len(values) - 1) // 2]


@dataclass(frozen=True)
class StatsSummary:
    """Aggregate over a sample of shapes."""

    count: int
    mean_k: float
    median_k: float
    mean_max_block: float
    median_max_block: float
    mean_avg_block: float
    median_avg_block: float
    mean_cherries: dict[int, float]  # m -> mean count per shape
    scaled_cherries: dict[int, float]  # m -> mean of count / n

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "mean_k": self.mean_k,
            "median_k": self.median_k,
            "mean_max_block": self.mean_max_block,
            "median_max_block": self.median_max_block,
            "mean_avg_block": self.mean_avg_block,
            "median_avg_block": self.median_avg_block,
            "mean_cherries": {str(m): v for m, v in self.mean_cherries.items()},
            "scaled_cherries": {str(m): v for m, v in self.scaled_cherries.items()},
        }


def aggregate(
    stats: Iterable[ShapeStats], cherry_sizes: Sequence[int] = range(2, 7)
) -> StatsSummary:
    """Means and lower medians of K, max block, and average block, plus
    per-size cherry means (raw and scaled by each sample's tip count)."""
    items = list(stats)
    if not items:
        raise ValueError("cannot aggregate an empty sample")
    count = len(items)
    ks = [s.k for s in items]
    maxes = [s.max_block for s in items]
    avgs = [s.avg_block for s in items]
    mean_cherries = {}
    scaled = {}
    for m in cherry_sizes:
        per = [s.cherry_count(m) for s in items]
        mean_cherries[m] = sum(per) / count
        scaled[m] = math.fsum(c / s.n for c, s in zip(per, items)) / count
    return StatsSummary(
        count=count,
        mean_k=sum(ks) / count,
        median_k=lower_median(ks),
        mean_max_block=sum(maxes) / count,
        median_max_block=lower_median(maxes),
        mean_avg_block=math.fsum(avgs) / count,
        median_avg_block=lower_median(avgs),
        mean_cherries=mean_cherries,
        scaled_cherries=scaled,
    )
