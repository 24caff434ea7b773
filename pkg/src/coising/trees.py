"""Search for pairs of rooted trees sharing a rooted Ising polynomial.

Such pairs are the building blocks of co-Ising composites: gluing either
member of a pair onto the same partner graph gives two graphs with equal
Ising polynomials that need not be isomorphic.
"""

from __future__ import annotations

from collections import defaultdict

import networkx as nx

from .graph import Graph
from .polynomial import RootedGraph, rooted_spectrum

MAX_TREE_ORDER = 12


def free_trees(order: int):
    """All free trees on ``order`` vertices, one per isomorphism class."""
    if order == 1:
        yield Graph(1)
        return
    for t in nx.nonisomorphic_trees(order):
        yield Graph(order, ((u + 1, v + 1) for u, v in t.edges))


def rooted_tree_code(g: Graph, root: int) -> str:
    """AHU canonical string of a rooted tree; equal iff rooted-isomorphic."""
    adj = g.neighbors()

    def code(v: int, parent: int) -> str:
        return "(" + "".join(sorted(code(u, v) for u in adj[v] if u != parent)) + ")"

    return code(root - 1, -1)


def tree_code(g: Graph) -> str:
    """Canonical string of a free tree, rooted at its centroid(s)."""
    n = g.n
    adj = g.neighbors()
    size = [1] * n
    order, parent = [0], [-1] * n
    for v in order:
        for u in adj[v]:
            if u != parent[v]:
                parent[u] = v
                order.append(u)
    for v in reversed(order[1:]):
        size[parent[v]] += size[v]
    best = n
    centroids = []
    for v in range(n):
        heaviest = n - size[v]
        for u in adj[v]:
            if u != parent[v]:
                heaviest = max(heaviest, size[u])
        if heaviest < best:
            best, centroids = heaviest, [v]
        elif heaviest == best:
            centroids.append(v)
    return min(rooted_tree_code(g, c + 1) for c in centroids)


def rooted_orbits(g: Graph) -> list[int]:
    """One root per orbit of the tree's automorphism group (1-based)."""
    seen: dict[str, int] = {}
    for v in range(1, g.n + 1):
        seen.setdefault(rooted_tree_code(g, v), v)
    return sorted(seen.values())


def find_co_rooted_trees(max_n: int) -> list[tuple[RootedGraph, RootedGraph]]:
    """Pairs of non-isomorphic rooted trees with identical rooted polynomials.

    Every free tree with at most ``max_n`` vertices is tried at one root per
    automorphism orbit.  Pairs are listed smallest order first, in a
    deterministic order.
    """
    if max_n > MAX_TREE_ORDER:
        raise ValueError(f"max_n is capped at {MAX_TREE_ORDER}, got {max_n}")
    pairs: list[tuple[RootedGraph, RootedGraph]] = []
    for order in range(1, max_n + 1):
        groups: dict[tuple, list[RootedGraph]] = defaultdict(list)
        for t in free_trees(order):
            for r in rooted_orbits(t):
                rg = RootedGraph(t, r)
                key = tuple(rooted_spectrum(rg).terms.items())
                groups[key].append(rg)
        for members in groups.values():
            for a in range(len(members)):
                for b in range(a + 1, len(members)):
                    pairs.append((members[a], members[b]))
    return pairs
