"""
Roots, inner products and faces
===============================

The 240 roots in doubled coordinates, the inner products one root sees, and
the face counts of the root polytope.
"""

import numpy as np

from e8cliques.cliques import face_counts
from e8cliques.roots import GRAM, ROOTS, in_2lambda, neighbor_histogram

# ROOTS and GRAM are padded at index 0 so root i is ROOTS[i]
print(ROOTS[1], ROOTS[240], "dot", GRAM[1, 240])

# every root sees the same multiset of inner products
print(neighbor_histogram(1))

# vectors are given doubled; (5,3,3,3,-1,1,1,1) is in 2 Lambda
print(in_2lambda(2 * np.array([5, 3, 3, 3, -1, 1, 1, 1])))

for name, n in face_counts().items():
    print(f"{name:>16}  {n}")
