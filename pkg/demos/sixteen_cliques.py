"""
One orbit of sixteen-cliques
============================

Maximal cliques of the graph with edge colors -2 and 0 are the 2025 frames
of eight orthogonal pairs {e, -e}. They form a single W-orbit.
"""

from e8cliques.cliques import SearchTask, collect_maximal
from e8cliques.orbits import orbit_partition

cliques = collect_maximal(SearchTask.make("-2,0", ()))
print(len(cliques), "maximal cliques, sizes", {len(c) for c in cliques})

# the family is closed under W, so a bucket of orbit length is a whole orbit
part = orbit_partition(cliques, dedupe="sample", closed=True)
for rec in part.records:
    print(rec.representative)
    print("stabilizer", rec.stabilizer, "automorphisms", rec.aut_order, "members", rec.members)
