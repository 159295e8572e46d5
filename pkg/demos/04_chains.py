"""Markov chains on the lattice, analyzed exactly on small spaces.

Two kernels: a symmetric chain (every neighbor with probability 1/M_N,
uniform stationary law) and the simple random walk (stationary law
proportional to degree).  For 4- and 5-tip spaces the script checks
stationarity exactly, enumerates every subset for the bottleneck ratio,
computes spectral gaps of the lazy kernels, and verifies the Cheeger
sandwich; it ends with the mixing-time bound formulas up to N = 20.
"""

import numpy as np

from mtshapes import (
    build_hasse,
    exact_bottleneck,
    exact_gap,
    exact_kernel,
    mixing_bounds,
    stationary_distribution,
)

for n in (4, 5):
    g = build_hasse(n)
    print(f"== {n}-tip space ({g.n_vertices} shapes) ==")
    for kind in ("symmetric", "random-walk"):
        p = exact_kernel(g, kind)
        pi = stationary_distribution(g, kind)
        residual = float(np.abs(pi @ p - pi).max())
        bottleneck = exact_bottleneck(g, kind)
        gap = exact_gap(g, kind, lazy=True)
        phi_lazy = bottleneck.phi_star / 2
        print(f"  {kind}:")
        print(f"    stationarity residual: {residual:.2e}")
        print(
            f"    bottleneck ratio: {bottleneck.phi_star} "
            f"({len(bottleneck.minimizers)} minimizing subset(s), "
            f"sizes {sorted({len(m) for m in bottleneck.minimizers})})"
        )
        print(f"    lazy spectral gap: {gap.gamma:.6f}  relaxation time: {gap.t_rel:.2f}")
        ok = float(phi_lazy**2 / 2) <= gap.gamma <= float(2 * phi_lazy)
        print(
            f"    Cheeger sandwich {float(phi_lazy**2 / 2):.5f} <= gamma <= "
            f"{float(2 * phi_lazy):.5f}: {ok}"
        )
    print()

print("mixing-time bound formulas (lower bounds non-lazy, upper bounds lazy):")
print(f" {'N':>2} | {'M_N':>6} | {'shapes':>14} | {'sym lower':>10} | {'sym upper':>12} | {'walk lower':>10} | {'walk upper':>10}")
for n in range(4, 21):
    b = mixing_bounds(n)
    print(
        f" {n:>2} | {b.m_n:>6} | {b.g_n:>14} | {b.symmetric_lower:>10.2f} |"
        f" {b.symmetric_lazy_upper:>12.1f} | {b.random_walk_lower:>10.1f} |"
        f" {b.random_walk_lazy_upper:>10.2f}"
    )
