"""Exact enumeration of the shape space.

Prints the per-(N, K) counts up to N = 12, compares the unlabeled space
against the labeled ones, shows the pair-count table driving the
recursion, and cross-checks small counts against brute-force generation.
"""

from collections import Counter

from mtshapes import (
    count_labeled_binary,
    count_labeled_ranked,
    count_shapes,
    count_space,
    generate_all,
    pair_table,
)

print("shapes with N tips and K internal nodes (K = 1..N-1), with totals:")
header = "  N | " + " ".join(f"{k:>9}" for k in range(1, 12)) + " |      total"
print(header)
print("-" * len(header))
for n in range(2, 13):
    cells = " ".join(
        f"{count_shapes(n, k):>9}" if k < n else f"{'':>9}" for k in range(1, 12)
    )
    print(f" {n:>2} | {cells} | {count_space(n):>10}")

print("\nunlabeled-ranked vs labeled spaces:")
print(f" {'N':>2} | {'ranked shapes':>13} | {'ranked labeled':>16} | {'binary labeled':>14}")
for n in range(3, 13):
    print(
        f" {n:>2} | {count_space(n):>13} | {count_labeled_ranked(n):>16}"
        f" | {count_labeled_binary(n):>14}"
    )

print("\npair-count table at K = 8 (parent vectors per (k0, k1)):")
for (k0, k1), a in pair_table(8).entries:
    print(f"  ({k0}, {k1}): {a}")
print("row sums over k1:", list(pair_table(8).row_sums().values()))

print("\nbrute-force cross-check at N = 8:")
per_k = Counter(s.n_internal for s in generate_all(8))
for k in range(1, 8):
    formula = count_shapes(8, k)
    print(f"  K={k}: generated {per_k[k]}, formula {formula}")
    assert per_k[k] == formula
print("generator and recursion agree.")
