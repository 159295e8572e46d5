"""The refinement lattice: covering moves, degrees, joins, distances.

One collapse of a consecutive-rank edge is the covering relation; any
two shapes have a unique least upper bound computed by deleting
rows/columns of their F-matrices.  This script explores the 5-tip graph,
the maximum-degree shape family, a worked join with its intermediate
matrices, and the lattice distance.
"""

import numpy as np

from mtshapes import (
    TreeShape,
    build_hasse,
    covers,
    deg_minus,
    deg_plus,
    diameter,
    lattice_distance,
    lub,
    lub_fmatrix,
    max_degree_tree,
    refinements_below,
)

g = build_hasse(5)
print(f"5-tip space: {g.n_vertices} shapes, {g.n_edges} covering relations,")
print(f"connected: {g.is_connected()},  diameter: {diameter(g)}")
print("\nshapes by internal-node count, with (forward, backward) degree:")
for i, v in enumerate(g.vertices):
    print(f"  K={v.n_internal}  {str(v):<22} deg+={len(g.up[i])}  deg-={len(g.down[i])}")

star = TreeShape((0,), (5,))
print("\nstar tree covers nothing; its refinements:", sorted(map(str, refinements_below(star))))
print("covers of 0,1,2,3|1,1,1,2:", sorted(map(str, covers(TreeShape((0, 1, 2, 3), (1, 1, 1, 2))))))

print("\nmaximum-degree shapes (cherries fanned off the root):")
for n in range(4, 10):
    tree, m = max_degree_tree(n)
    print(f"  N={n}: {str(tree):<22} deg+={deg_plus(tree)} deg-={deg_minus(tree)}  M_N={m}")

print("\nworked join of two 8-tip binary shapes:")
a = TreeShape.from_text("0,1,1,3,2,5,4|0,1,1,1,1,2,2")
b = TreeShape.from_text("0,1,1,3,2,5,6|0,1,1,2,1,1,2")
trace = []
result = lub_fmatrix(a.fmatrix(), b.fmatrix(), trace=trace)
print("shared submatrix, then after each deletion pass:")
for m in trace:
    print(np.array(m), "\n")
print("join:", lub(a, b), " distance:", lattice_distance(a, b))

print("\ndistance from every binary 5-tip shape to the star is N - 2 = 3:")
from mtshapes import generate_all

for s in generate_all(5, 4):
    print(" ", s, "->", lattice_distance(s, star))
