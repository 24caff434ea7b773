"""Chimera hardware graphs and native (chain-free) embeddings.

Qubit ``8 * (m * row + col) + unit`` sits in cell ``(row, col)``.  Units 0-3
form one side of the cell's K_{4,4} and couple to the same unit in the cell
below; units 4-7 form the other side and couple to the same unit in the cell
to the right.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

import numpy as np

from .graph import Graph, VertexPermutation

#: Node expansions allowed per restart and number of randomized restarts.
NODE_BUDGET = 10_000_000
RESTARTS = 50


@dataclass(frozen=True)
class ChimeraTopology:
    m: int
    couplers: tuple[tuple[int, int], ...] = field(repr=False)

    @property
    def num_qubits(self) -> int:
        return 8 * self.m * self.m

    def qubit(self, row: int, col: int, unit: int) -> int:
        return 8 * (self.m * row + col) + unit

    def coords(self, q: int) -> tuple[int, int, int]:
        cell, unit = divmod(q, 8)
        return cell // self.m, cell % self.m, unit

    def neighbor_sets(self) -> list[frozenset[int]]:
        nbrs: list[set[int]] = [set() for _ in range(self.num_qubits)]
        for a, b in self.couplers:
            nbrs[a].add(b)
            nbrs[b].add(a)
        return [frozenset(x) for x in nbrs]

    def has_coupler(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self._coupler_set()

    def _coupler_set(self) -> frozenset:
        cached = self.__dict__.get("_cs")
        if cached is None:
            cached = frozenset(self.couplers)
            object.__setattr__(self, "_cs", cached)
        return cached


def chimera_graph(m: int) -> ChimeraTopology:
    """``m x m`` Chimera: ``8 m^2`` qubits and ``16 m^2 + 8 m (m - 1)`` couplers."""
    if m < 1:
        raise ValueError("m must be positive")
    edges = []

    def q(r, c, u):
        return 8 * (m * r + c) + u

    for r in range(m):
        for c in range(m):
            for u in range(4):
                for v in range(4, 8):
                    edges.append((q(r, c, u), q(r, c, v)))
                if r + 1 < m:
                    edges.append((q(r, c, u), q(r + 1, c, u)))
                if c + 1 < m:
                    edges.append((q(r, c, u + 4), q(r, c + 1, u + 4)))
    return ChimeraTopology(m, tuple(sorted((min(a, b), max(a, b)) for a, b in edges)))


@dataclass(frozen=True)
class EmbeddingMap:
    """Injective assignment of graph vertices (1-based) to qubit indices."""

    assignment: Mapping[int, int]
    graph: str = ""
    chimera_m: int = 0

    def __post_init__(self):
        object.__setattr__(self, "assignment", dict(sorted((int(k), int(v)) for k, v in self.assignment.items())))

    def key(self) -> tuple[int, ...]:
        return tuple(self.assignment.values())

    def to_json(self) -> str:
        return json.dumps(
            {"graph": self.graph, "chimera_m": self.chimera_m, "assignment": {str(k): v for k, v in self.assignment.items()}},
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "EmbeddingMap":
        d = json.loads(text)
        return cls({int(k): v for k, v in d["assignment"].items()}, d.get("graph", ""), d.get("chimera_m", 0))

    def relabeled(self, p: VertexPermutation) -> "EmbeddingMap":
        """Embedding of ``relabel(g, p)`` that uses the same qubits."""
        return EmbeddingMap({p(v): q for v, q in self.assignment.items()}, self.graph, self.chimera_m)


def verify_embedding(g: Graph, topo: ChimeraTopology, e: EmbeddingMap) -> bool:
    """True iff ``e`` is injective, covers every vertex and sends every edge onto a coupler."""
    a = e.assignment
    if set(a) != set(range(1, g.n + 1)):
        return False
    qs = list(a.values())
    if len(set(qs)) != len(qs) or any(not 0 <= q < topo.num_qubits for q in qs):
        return False
    return all(topo.has_coupler(a[i], a[j]) for i, j in g.edges)


class EmbeddingSearch(NamedTuple):
    embeddings: list[EmbeddingMap]
    exhausted: bool


class _Budget(Exception):
    pass


def _vertex_order(g: Graph, rng: np.random.Generator) -> list[int]:
    """Most-constrained-first order (0-based).

    Each step takes the unplaced vertex with the most placed neighbours,
    then the highest degree, breaking ties at random; cycles are therefore
    closed as early as possible.  A new component starts at a vertex of
    maximum degree.
    """
    adj = g.neighbors()
    deg = [len(x) for x in adj]
    placed_nbrs = [0] * g.n
    done = [False] * g.n
    noise = rng.random(g.n)
    order: list[int] = []
    for _ in range(g.n):
        v = max((u for u in range(g.n) if not done[u]), key=lambda u: (placed_nbrs[u], deg[u], noise[u]))
        done[v] = True
        order.append(v)
        for u in adj[v]:
            placed_nbrs[u] += 1
    return order


def _search(g: Graph, nbrs, qdeg, order, rng, budget: int, want: int):
    """Depth-first monomorphism search with conflict-directed backjumping.

    A failed subtree reports the order positions whose placements caused the
    failure; a vertex not among them is skipped over on the way back, so
    failures inside one pendant piece do not re-enumerate unrelated pieces.
    Returns ``(solutions, hit_budget)`` with 0-based qubit images.
    """
    adj = g.neighbors()
    deg = [len(x) for x in adj]
    pos = {v: k for k, v in enumerate(order)}
    later = [sum(1 for u in adj[v] if pos[u] > pos[v]) for v in range(g.n)]
    image = [-1] * g.n
    owner: dict[int, int] = {}
    count = [0]
    found: list[list[int]] = []
    all_qubits = np.arange(len(nbrs))

    def candidates(v: int) -> tuple[list[int], set[int]]:
        placed = [u for u in adj[v] if image[u] >= 0]
        conf = {pos[u] for u in placed}
        if placed:
            cand = set(nbrs[image[placed[0]]])
            for u in placed[1:]:
                cand &= nbrs[image[u]]
            cand = sorted(cand)
            rng.shuffle(cand)
        else:
            cand = [int(q) for q in rng.permutation(all_qubits)]
        keep, free = [], {}
        for q in cand:
            if q in owner:
                conf.add(owner[q])
                continue
            if qdeg[q] < deg[v]:
                continue
            fr = [x for x in nbrs[q] if x not in owner]
            if len(fr) < later[v]:
                conf.update(owner[x] for x in nbrs[q] if x in owner)
                continue
            keep.append(q)
            free[q] = len(fr)
        # least constraining first: qubits with the most free neighbours
        keep.sort(key=lambda q: -free[q])
        return keep, conf

    def forward_check(v: int) -> set[int] | None:
        """None if every unplaced neighbour keeps a free common qubit, else a conflict set."""
        for u in adj[v]:
            if image[u] >= 0:
                continue
            placed = [w for w in adj[u] if image[w] >= 0]
            common = set(nbrs[image[placed[0]]])
            for w in placed[1:]:
                common &= nbrs[image[w]]
            if all(q in owner for q in common):
                return {pos[w] for w in placed} | {owner[q] for q in common}
        return None

    def rec(k: int):
        if k == g.n:
            found.append(list(image))
            return True if len(found) >= want else set(range(k))
        v = order[k]
        cands, conf = candidates(v)
        for q in cands:
            count[0] += 1
            if count[0] > budget:
                raise _Budget
            image[v] = q
            owner[q] = k
            fc = forward_check(v)
            res = rec(k + 1) if fc is None else fc
            del owner[q]
            image[v] = -1
            if res is True:
                return True
            if k not in res:
                return res
            conf |= res - {k}
        return conf

    try:
        rec(0)
        return found, False
    except _Budget:
        return found, True


def find_native_embeddings(
    g: Graph,
    topo: ChimeraTopology,
    k: int,
    seed: int = 0,
    node_budget: int = NODE_BUDGET,
    restarts: int = RESTARTS,
    name: str = "",
) -> EmbeddingSearch:
    """Up to ``k`` distinct native embeddings of ``g`` into ``topo``.

    Each restart uses its own random vertex order and candidate order, and
    keeps its first solution; results are deduplicated and sorted.
    ``exhausted`` is true when fewer than ``k`` were found and some restart
    ran out of budget (so more may exist).
    """
    nbrs = topo.neighbor_sets()
    qdeg = [len(x) for x in nbrs]
    seen: dict[tuple[int, ...], EmbeddingMap] = {}
    hit_budget = False
    complete = False
    for r in range(restarts):
        if len(seen) >= k:
            break
        rng = np.random.default_rng([seed, r])
        order = _vertex_order(g, rng)
        found, out = _search(g, nbrs, qdeg, order, rng, node_budget, 1)
        hit_budget |= out
        if not found and not out:
            complete = True  # the search space was exhausted: no embedding exists
            break
        for img in found:
            e = EmbeddingMap({v + 1: q for v, q in enumerate(img)}, name, topo.m)
            seen.setdefault(e.key(), e)
    embs = sorted(seen.values(), key=lambda e: e.key())[:k]
    return EmbeddingSearch(embs, len(embs) < k and hit_budget and not complete)


def count_embeddings(g: Graph, topo: ChimeraTopology, limit: int = 1_000_000) -> int:
    """Exhaustive count of native embeddings (ordered assignments), up to ``limit``."""
    rng = np.random.default_rng(0)
    nbrs = topo.neighbor_sets()
    qdeg = [len(x) for x in nbrs]
    found, _ = _search(g, nbrs, qdeg, _vertex_order(g, rng), rng, 10**9, limit)
    return len(found)


__all__ = [
    "ChimeraTopology",
    "EmbeddingMap",
    "EmbeddingSearch",
    "NODE_BUDGET",
    "RESTARTS",
    "chimera_graph",
    "count_embeddings",
    "find_native_embeddings",
    "verify_embedding",
]
