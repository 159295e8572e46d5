"""Exact counting and exhaustive generation of ranked multifurcating shapes.

Counting is driven by the parent-rank vector ``t``: for a fixed ``t`` the
compatible leaf vectors are a stars-and-bars count that depends only on
how many nodes have zero internal children (``k0``) and how many have
exactly one (``k1``).  A three-term recursion tabulates the number of
``t`` vectors per ``(k0, k1)`` pair, and the shape count ``G(N, K)`` is a
small double sum over that table.  All arithmetic is exact (Python ints).

``generate_all`` is the brute-force oracle: it streams every shape once,
in deterministic lexicographic order, and is what the rest of the library
is tested against for small N.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .shapes import TreeShape

__all__ = [
    "DEFAULT_GENERATION_CAP",
    "PairTable",
    "k0_k1",
    "valid_pairs",
    "pair_table",
    "count_shapes",
    "count_space",
    "count_labeled_ranked",
    "count_labeled_binary",
    "generate_all",
]

#: Largest N that generate_all accepts unless the caller raises the cap.
DEFAULT_GENERATION_CAP = 9


def k0_k1(t) -> tuple[int, int]:
    """Count ranks absent from / appearing exactly once in ``t[1:]``.

    The placeholder 0 at the front is never counted.
    """
    k = len(t)
    counts = [0] * (k + 1)
    for x in t[1:]:
        counts[x] += 1
    k0 = sum(1 for j in range(1, k + 1) if counts[j] == 0)
    k1 = sum(1 for j in range(1, k + 1) if counts[j] == 1)
    return k0, k1


def valid_pairs(k: int) -> frozenset[tuple[int, int]]:
    """All (k0, k1) pairs achievable by a length-``k`` parent vector.

    The set has exactly ``(k - 1)**2 // 4 + 1`` elements.  For k == 2 the
    single vector (0, 1) gives the lone pair (1, 1).
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if k == 2:
        return frozenset({(1, 1)})
    pairs = {(1, k - 1), (k - 1, 0)}
    for k0 in range(2, k - 1):
        for k1 in range(max(0, k - 2 * k0 + 1), k - k0):
            pairs.add((k0, k1))
    return frozenset(pairs)


@dataclass(frozen=True)
class PairTable:
    """Counts of parent vectors per (k0, k1) pair for a fixed K."""

    k: int
    entries: tuple[tuple[tuple[int, int], int], ...]

    def as_dict(self) -> dict[tuple[int, int], int]:
        return dict(self.entries)

    def row_sums(self) -> dict[int, int]:
        """Total vectors per k0 (the Eulerian numbers E(K-1, k0))."""
        out: dict[int, int] = {}
        for (k0, _), v in self.entries:
            out[k0] = out.get(k0, 0) + v
        return out


@lru_cache(maxsize=None)
def _pair_entries(k: int) -> tuple[tuple[tuple[int, int], int], ...]:
    table = {(1, 1): 1}
    for kk in range(3, k + 1):
        nxt = {}
        for k0, k1 in valid_pairs(kk):
            nxt[(k0, k1)] = (
                table.get((k0 - 1, k1), 0) * (kk - k0 - k1)
                + table.get((k0 - 1, k1 + 1), 0) * (k1 + 1)
                + table.get((k0, k1 - 1), 0) * k0
            )
        table = nxt
    return tuple(sorted(table.items()))


def pair_table(k: int) -> PairTable:
    """Tabulate, for every valid (k0, k1), the number of length-``k``
    parent vectors with those counts.

    Built bottom-up from K'=2 by appending one entry at a time: the new
    entry repeats a rank seen twice or more (k0 grows), repeats one seen
    once (k1 shifts into k0), or names a previously absent rank (k1
    grows).  Values sum to (k-1)! across the table.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    return PairTable(k=k, entries=_pair_entries(k))


def _comb(n: int, k: int) -> int:
    # Zero outside the usual range, including negative upper argument.
    if n < 0 or k < 0 or k > n:
        return 0
    return math.comb(n, k)


def count_shapes(n: int, k: int) -> int:
    """Exact number of shapes with ``n`` tips and ``k`` internal nodes.

    Out-of-range ``k`` yields 0 so that callers may sum freely over k.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not 1 <= k <= n - 1:
        return 0
    if k == 1:
        return 1
    if k == 2:
        return n - 2
    total = 0
    for (k0, k1), a in pair_table(k).entries:
        total += a * _comb(n - 2 * k0 - k1 + k - 1, k - 1)
    return total


def count_space(n: int) -> int:
    """Exact number of shapes with ``n`` tips, over all K."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    return sum(count_shapes(n, k) for k in range(1, n))


def count_labeled_ranked(n: int) -> int:
    """Ranked multifurcating trees with ``n`` labeled tips.

    Recursion f(n) = sum_k S(n, k) f(k) over k = 1..n-1, with f(1) = 1
    and S the Stirling numbers of the second kind.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    # stirling[m][k] = S(m, k), built row by row
    stirling = [[1]]
    for m in range(1, n + 1):
        row = [0] * (m + 1)
        for k in range(1, m + 1):
            prev = stirling[m - 1]
            row[k] = k * (prev[k] if k < m else 0) + prev[k - 1]
        stirling.append(row)
    f = [0] * (n + 1)
    f[1] = 1
    for m in range(2, n + 1):
        f[m] = sum(stirling[m][k] * f[k] for k in range(1, m))
    return f[n]


def count_labeled_binary(n: int) -> int:
    """Ranked binary trees with ``n`` labeled tips: n!(n-1)!/2^(n-1)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return math.factorial(n) * math.factorial(n - 1) // 2 ** (n - 1)


def _t_vectors(k: int) -> Iterator[tuple[int, ...]]:
    if k == 1:
        yield (0,)
        return
    for rest in itertools.product(*(range(1, i) for i in range(2, k + 1))):
        yield (0,) + rest


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def generate_all(
    n: int, k: int | None = None, *, cap: int = DEFAULT_GENERATION_CAP
) -> Iterator[TreeShape]:
    """Stream every shape with ``n`` tips (optionally fixed ``k``) exactly
    once, in lexicographic order on (K, t, l).

    Refuses n above ``cap`` (default 9) because the space grows
    superexponentially; pass a larger cap explicitly to override.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if n > cap:
        raise ValueError(
            f"exhaustive generation is capped at n={cap} (got n={n}); "
            "pass cap= to raise the limit"
        )
    ks = range(1, n) if k is None else [k]
    for kk in ks:
        if not 1 <= kk <= n - 1:
            continue
        for t in _t_vectors(kk):
            counts = [0] * (kk + 1)
            for x in t[1:]:
                counts[x] += 1
            mins = [
                2 if counts[j] == 0 else (1 if counts[j] == 1 else 0)
                for j in range(1, kk + 1)
            ]
            spare = n - sum(mins)
            if spare < 0:
                continue
            for extra in _compositions(spare, kk):
                yield TreeShape(t, tuple(m + e for m, e in zip(mins, extra)))
