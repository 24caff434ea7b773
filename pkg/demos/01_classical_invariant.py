"""Two graphs that no classical Ising measurement can tell apart.

G13 and G13p have the same number of states at every (interaction energy,
magnetization) pair, so every classical Gibbs average of the problem
Hamiltonian agrees between them, yet they are not isomorphic.
"""

from coising.catalog import TUPLES, catalog_get
from coising.graph import are_isomorphic
from coising.polynomial import classical_spectrum_auto, decompose

g, gp = catalog_get("G13"), catalog_get("G13p")
p, pp = classical_spectrum_auto(g), classical_spectrum_auto(gp)
print(f"G13: {g.num_edges} edges, {p.total()} states, {len(p.terms)} distinct (e, m) pairs")
print("same Ising polynomial:", p == pp)
print("isomorphic:", are_isomorphic(g, gp)[0])

# The lowest few levels of the diagonal spectrum E = e + m, with degeneracies.
for energy, count in list(p.hp_spectrum().items())[:5]:
    print(f"  E = {energy:+d}: {count} states")

# Larger members are built by gluing pieces at cut vertices; the polynomial
# of the whole follows from the pieces, which is how n = 33 stays cheap.
for family, members in TUPLES.items():
    polys = [classical_spectrum_auto(catalog_get(m)) for m in members]
    cuts = decompose(catalog_get(members[0])).cut_vertices
    same = all(q == polys[0] for q in polys)
    print(f"{family}: {len(members)} members, co-Ising={same}, cut vertices of first member={cuts}")
