"""Topology sampler for Beta-measure multiple-merger coalescents.

Backward in time, k of b extant lineages merge at rate

    lambda(b, k) = integral over [0,1] of x^(k-2) (1-x)^(b-k) dLambda(x),

with Lambda a Beta(a, b) probability measure; conditional on an event the
merger size is drawn proportional to C(b, k) * lambda(b, k) and the k
lineages are an exchangeable uniform subset.  Event times are not
generated: every statistic in this package is a function of the ranked
shape alone, and for Beta(1, 1) (the uniform measure) branch lengths are
independent of the topology anyway.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import exp, lgamma

import numpy as np

from .shapes import TreeShape

__all__ = [
    "BetaMeasure",
    "UNIFORM_MEASURE",
    "merger_rate",
    "merger_distribution",
    "sample_topology",
    "sample_topologies",
]


@dataclass(frozen=True)
class BetaMeasure:
    """Beta(a, b) probability measure on [0, 1] driving merger rates."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError(f"shape parameters must be positive, got {self}")

    @classmethod
    def from_alpha(cls, alpha: float) -> "BetaMeasure":
        """The one-parameter family Beta(2 - alpha, alpha), 0 < alpha < 2.

        alpha = 1 is the uniform measure; alpha -> 2 pushes toward the
        pairwise-merger limit, which itself is out of range.
        """
        if not 0 < alpha < 2:
            raise ValueError(f"alpha must be in (0, 2), got {alpha}")
        return cls(2.0 - alpha, alpha)


UNIFORM_MEASURE = BetaMeasure(1.0, 1.0)


def _log_beta(x: float, y: float) -> float:
    return lgamma(x) + lgamma(y) - lgamma(x + y)


def merger_rate(n_lineages: int, k: int, measure: BetaMeasure) -> float:
    """Rate at which any fixed k-subset of ``n_lineages`` merges.

    The Beta integral collapses to a ratio of Beta functions, evaluated
    in log space so large lineage counts cannot overflow.  For the
    uniform measure this is (k-2)!(b-k)!/(b-1)!.
    """
    if not 2 <= k <= n_lineages:
        raise ValueError(f"k must be in 2..{n_lineages}, got {k}")
    a, b = measure.a, measure.b
    return exp(_log_beta(k - 2 + a, n_lineages - k + b) - _log_beta(a, b))


def merger_distribution(n_lineages: int, measure: BetaMeasure) -> np.ndarray:
    """Probability of merger size k = 2..b at the next event, each
    proportional to C(b, k) times the k-merger rate."""
    if n_lineages < 2:
        raise ValueError(f"need at least 2 lineages, got {n_lineages}")
    b = n_lineages
    a, bb = measure.a, measure.b
    log_b0 = _log_beta(a, bb)
    logs = np.array(
        [
            lgamma(b + 1)
            - lgamma(k + 1)
            - lgamma(b - k + 1)
            + _log_beta(k - 2 + a, b - k + bb)
            - log_b0
            for k in range(2, b + 1)
        ]
    )
    w = np.exp(logs - logs.max())
    return w / w.sum()


def _shape_from_merger_events(events: list[list[int]]) -> TreeShape:
    # events[m] lists the lineages merged at backward event m+1; a lineage
    # is 0 for an original tip or the 1-based id of an earlier event.
    # Ranks run root-down, so backward event m has rank K - m + 1.
    k = len(events)
    t = [0] * k
    l = [0] * k
    for event_id, merged in enumerate(events, start=1):
        rank = k - event_id + 1
        l[rank - 1] = sum(1 for x in merged if x == 0)
        for x in merged:
            if x != 0:
                t[k - x] = rank  # child rank (k - x + 1), 0-based index k - x
    return TreeShape(t, l)


def sample_topology(
    n: int, measure: BetaMeasure, rng: np.random.Generator
) -> TreeShape:
    """Draw one ranked multifurcating shape with ``n`` tips."""
    return sample_topologies(n, measure, 1, rng)[0]


def sample_topologies(
    n: int, measure: BetaMeasure, count: int, rng: np.random.Generator
) -> list[TreeShape]:
    """Draw ``count`` independent shapes, reusing per-b merger laws."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    dists = {b: merger_distribution(b, measure) for b in range(2, n + 1)}
    out = []
    for _ in range(count):
        lineages = [0] * n
        events: list[list[int]] = []
        while len(lineages) > 1:
            b = len(lineages)
            k = 2 if b == 2 else int(rng.choice(b - 1, p=dists[b])) + 2
            chosen = sorted(rng.choice(b, size=k, replace=False), reverse=True)
            events.append([lineages.pop(i) for i in chosen])
            lineages.append(len(events))
        out.append(_shape_from_merger_events(events))
    return out
