"""
Which clique isomorphisms come from W
=====================================

A color-preserving bijection between cliques need not extend to a lattice
automorphism. The pattern checks decide this without a search, and agree
with the direct extension.
"""

import numpy as np

from e8cliques.cliques import enumerate_crosspolytopes
from e8cliques.orbits import ExtensionChecker, decide_extension_thm2
from e8cliques.roots import GRAM
from e8cliques.weyl import automorphism_group, extend_isometry, extends_batch

cp = sorted(enumerate_crosspolytopes()[0])
ident = {v: v for v in cp}
print("identity extends:", decide_extension_thm2(cp, cp, ident))

# swapping one antipodal pair of the crosspolytope is a graph automorphism
a = cp[0]
b = next(v for v in cp if v != a and GRAM[a, v] == 0)
swap = {**ident, a: b, b: a}
print("single swap extends:", decide_extension_thm2(cp, cp, swap), extend_isometry(list(swap.items())))

# over all automorphisms exactly half extend
aut = automorphism_group(cp)
checker = ExtensionChecker(cp, cp)
fast = np.concatenate([checker.decide_many(c) for c in aut.iter_chunks()])
print(aut.order, "automorphisms,", int(fast.sum()), "extend")
sample = np.array(cp)[next(aut.iter_chunks(chunk=2000))]
print("agrees with direct extension on a sample:", (fast[:len(sample)] == extends_batch(cp, sample)).all())
