"""Native placements of every catalog graph on a 16 x 16 Chimera lattice.

Each vertex goes to one qubit and each edge onto a coupler, with no chains.
Averaging results over several placements washes out qubit-specific bias.
"""

from coising.catalog import NAMES, catalog_get
from coising.chimera import chimera_graph, find_native_embeddings, verify_embedding

topo = chimera_graph(16)
print(f"C16: {topo.num_qubits} qubits, {len(topo.couplers)} couplers")
for name in NAMES:
    g = catalog_get(name)
    res = find_native_embeddings(g, topo, 5, name=name)
    cells = {topo.coords(q)[:2] for q in res.embeddings[0].assignment.values()}
    ok = all(verify_embedding(g, topo, e) for e in res.embeddings)
    print(f"{name:6} n={g.n:2d}  embeddings={len(res.embeddings)}  valid={ok}  cells used by first={len(cells)}")
