"""Labeled simple graphs, relabelings and backtracking isomorphism.

Vertices are 1-based everywhere in the public interface so that edge lists
can be copied verbatim from published listings.  Two :class:`Graph` objects
compare equal only when their canonical edge sets are identical; use
:func:`are_isomorphic` for structural comparison.
"""

from __future__ import annotations

import json
import re
import sys
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    """Raised for malformed graphs, edge lists and permutations."""


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``1..n``.

    ``edges`` is always stored as a sorted tuple of ``(i, j)`` pairs with
    ``i < j``, so equal graphs are equal field by field.
    """

    n: int
    edges: tuple[tuple[int, int], ...]

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        n = int(n)
        if n < 1:
            raise GraphError(f"vertex count must be positive, got {n}")
        canon = set()
        for pair in edges:
            if len(pair) != 2:
                raise GraphError(f"edge {pair!r} is not a pair")
            i, j = int(pair[0]), int(pair[1])
            if i == j:
                raise GraphError(f"self-loop at vertex {i}")
            if not (1 <= i <= n and 1 <= j <= n):
                raise GraphError(f"edge ({i}, {j}) has an endpoint outside 1..{n}")
            e = (i, j) if i < j else (j, i)
            if e in canon:
                raise GraphError(f"duplicate edge {e}")
            canon.add(e)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple(sorted(canon)))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> list[int]:
        """Degree of each vertex, indexed 0..n-1 (vertex ``v`` at ``v - 1``)."""
        deg = [0] * self.n
        for i, j in self.edges:
            deg[i - 1] += 1
            deg[j - 1] += 1
        return deg

    def neighbors(self) -> list[list[int]]:
        """0-based adjacency lists."""
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in self.edges:
            adj[i - 1].append(j - 1)
            adj[j - 1].append(i - 1)
        return adj

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int64)
        for i, j in self.edges:
            a[i - 1, j - 1] = a[j - 1, i - 1] = 1
        return a

    def edge_array(self) -> np.ndarray:
        """Edges as a 0-based ``(m, 2)`` integer array."""
        if not self.edges:
            return np.zeros((0, 2), dtype=np.int64)
        return np.asarray(self.edges, dtype=np.int64) - 1

    def to_text(self) -> str:
        lines = [f"n {self.n}"] + [f"{i} {j}" for i, j in self.edges]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "edges": [list(e) for e in self.edges]})

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={list(self.edges)})"


@dataclass(frozen=True)
class VertexPermutation:
    """Bijection on ``1..n``; vertex ``v`` maps to ``mapping[v - 1]``."""

    mapping: tuple[int, ...]

    def __init__(self, mapping: Iterable[int]):
        m = tuple(int(x) for x in mapping)
        if sorted(m) != list(range(1, len(m) + 1)):
            raise GraphError(f"not a permutation of 1..{len(m)}: {m}")
        object.__setattr__(self, "mapping", m)

    def __len__(self) -> int:
        return len(self.mapping)

    def __call__(self, v: int) -> int:
        return self.mapping[v - 1]

    def inverse(self) -> "VertexPermutation":
        inv = [0] * len(self.mapping)
        for v, w in enumerate(self.mapping, start=1):
            inv[w - 1] = v
        return VertexPermutation(inv)

    @classmethod
    def identity(cls, n: int) -> "VertexPermutation":
        return cls(range(1, n + 1))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator | int | None = None) -> "VertexPermutation":
        rng = np.random.default_rng(rng)
        return cls((rng.permutation(n) + 1).tolist())


_PAIR = re.compile(r"\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)")


def parse_graph(text: str, n: int | None = None) -> Graph:
    """Parse an edge-list document into a :class:`Graph`.

    Three layouts are accepted:

    * JSON, ``{"n": 13, "edges": [[1, 8], ...]}``;
    * plain text, an optional ``n <count>`` line followed by one ``i j`` pair
      per line (``#`` starts a comment);
    * a bracketed pair list such as ``[(1, 8), (1, 10)]``, possibly spread
      over several lines.

    When no vertex count is given, ``n`` is the largest label seen.  Errors
    name the offending line (1-based).
    """
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise GraphError(f"line {exc.lineno}: invalid JSON ({exc.msg})") from None
        if not isinstance(doc, dict) or "edges" not in doc:
            raise GraphError("line 1: JSON graph needs an 'edges' array")
        pairs = [(1, e) for e in doc["edges"]]
        n = doc.get("n", n)
    elif "(" in stripped:
        pairs = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            body = line.split("#", 1)[0]
            leftovers = _PAIR.sub("", body)
            if re.search(r"\d", leftovers):
                raise GraphError(f"line {lineno}: malformed pair in {line.strip()!r}")
            pairs.extend((lineno, (int(a), int(b))) for a, b in _PAIR.findall(body))
    else:
        pairs = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            body = line.split("#", 1)[0].split()
            if not body:
                continue
            if body[0] == "n":
                if len(body) != 2 or not body[1].isdigit():
                    raise GraphError(f"line {lineno}: expected 'n <count>'")
                n = int(body[1])
                continue
            if len(body) != 2:
                raise GraphError(f"line {lineno}: expected 'i j', got {line.strip()!r}")
            try:
                pairs.append((lineno, (int(body[0]), int(body[1]))))
            except ValueError:
                raise GraphError(f"line {lineno}: non-integer vertex label") from None

    labels = [v for _, p in pairs for v in p]
    if n is None:
        if not labels:
            raise GraphError("empty edge list and no vertex count")
        n = max(labels)
    seen: set[tuple[int, int]] = set()
    for lineno, p in pairs:
        if len(p) != 2:
            raise GraphError(f"line {lineno}: edge {p!r} is not a pair")
        i, j = int(p[0]), int(p[1])
        if i == j:
            raise GraphError(f"line {lineno}: self-loop at vertex {i}")
        if not (1 <= i <= n and 1 <= j <= n):
            raise GraphError(f"line {lineno}: label out of range 1..{n} in ({i}, {j})")
        e = (min(i, j), max(i, j))
        if e in seen:
            raise GraphError(f"line {lineno}: duplicate edge {e}")
        seen.add(e)
    return Graph(n, seen)


def relabel(g: Graph, p: VertexPermutation | Sequence[int]) -> Graph:
    """Return the graph with every vertex ``v`` renamed to ``p(v)``."""
    if not isinstance(p, VertexPermutation):
        p = VertexPermutation(p)
    if len(p) != g.n:
        raise GraphError(f"permutation has length {len(p)}, graph has {g.n} vertices")
    return Graph(g.n, ((p(i), p(j)) for i, j in g.edges))


def adjacency_power(g: Graph, k: int) -> np.ndarray:
    """Exact integer power ``A(G)**k`` of the adjacency matrix."""
    if k < 1:
        raise GraphError(f"power must be >= 1, got {k}")
    a = g.adjacency_matrix().astype(object) if k > 8 else g.adjacency_matrix()
    out = a.copy()
    for _ in range(k - 1):
        out = out @ a
    return out


def _refine(adj: list[list[int]], colors: list[int]) -> list[int]:
    """Colour refinement to a stable partition (1-dimensional Weisfeiler-Leman)."""
    n = len(adj)
    while True:
        sig = [(colors[v], tuple(sorted(colors[u] for u in adj[v]))) for v in range(n)]
        table = {s: k for k, s in enumerate(sorted(set(sig)))}
        new = [table[s] for s in sig]
        if len(table) == len(set(colors)):
            return new
        colors = new


def are_isomorphic(
    g1: Graph,
    g2: Graph,
    fixed: tuple[int, int] | None = None,
) -> tuple[bool, VertexPermutation | None]:
    """Decide isomorphism by backtracking; return ``(found, witness)``.

    The witness ``p`` satisfies ``relabel(g1, p) == g2``.  Candidates are
    pruned by degree, by the multiset of neighbour degrees and by a shared
    colour-refinement signature computed on the disjoint union, so catalog
    sized graphs (n <= 40) resolve in milliseconds.

    ``fixed=(v1, v2)`` forces vertex ``v1`` of ``g1`` onto ``v2`` of ``g2``,
    which turns the search into a rooted-isomorphism test.
    """
    if g1.n != g2.n or g1.num_edges != g2.num_edges:
        return False, None
    n = g1.n
    d1, d2 = g1.degrees(), g2.degrees()
    if sorted(d1) != sorted(d2):
        return False, None
    adj1, adj2 = g1.neighbors(), g2.neighbors()

    def nbr_degrees(adj, deg):
        return [tuple(sorted(deg[u] for u in adj[v])) for v in range(n)]

    nd1, nd2 = nbr_degrees(adj1, d1), nbr_degrees(adj2, d2)
    if Counter(nd1) != Counter(nd2):
        return False, None

    # refine both graphs jointly so that colour ids are comparable
    union = [list(a) for a in adj1] + [[u + n for u in a] for a in adj2]
    init = [0] * (2 * n)
    if fixed is not None:
        init[fixed[0] - 1] = 1
        init[fixed[1] - 1 + n] = 1
    colors = _refine(union, init)
    c1, c2 = colors[:n], colors[n:]
    if Counter(c1) != Counter(c2):
        return False, None

    sets2 = [set(a) for a in adj2]
    by_color: dict[int, list[int]] = {}
    for w in range(n):
        by_color.setdefault(c2[w], []).append(w)

    # visit g1 vertices in BFS order from the rarest colour class, so every
    # vertex after the first of its component has an already mapped neighbour
    freq = Counter(c1)
    order: list[int] = []
    placed = [False] * n
    for start in sorted(range(n), key=lambda v: (freq[c1[v]], -d1[v], v)):
        if placed[start]:
            continue
        placed[start] = True
        queue = [start]
        while queue:
            v = queue.pop(0)
            order.append(v)
            for u in sorted(adj1[v], key=lambda u: (freq[c1[u]], -d1[u], u)):
                if not placed[u]:
                    placed[u] = True
                    queue.append(u)

    mapping = [-1] * n
    used = [False] * n

    def candidates(v: int) -> list[int]:
        mapped_nbrs = [mapping[u] for u in adj1[v] if mapping[u] >= 0]
        if mapped_nbrs:
            pool = [w for w in adj2[mapped_nbrs[0]] if c2[w] == c1[v]]
        else:
            pool = by_color.get(c1[v], [])
        return [w for w in pool if not used[w]]

    def consistent(v: int, w: int) -> bool:
        # adjacency to already mapped vertices must be preserved both ways
        count = 0
        for u in adj1[v]:
            mu = mapping[u]
            if mu >= 0:
                if mu not in sets2[w]:
                    return False
                count += 1
        mapped_w = sum(1 for x in adj2[w] if used[x])
        return mapped_w == count

    def search(k: int) -> bool:
        if k == n:
            return True
        v = order[k]
        for w in candidates(v):
            if consistent(v, w):
                mapping[v] = w
                used[w] = True
                if search(k + 1):
                    return True
                mapping[v] = -1
                used[w] = False
        return False

    if sys.getrecursionlimit() < n + 100:
        sys.setrecursionlimit(n + 100)
    if not search(0):
        return False, None
    return True, VertexPermutation(w + 1 for w in mapping)


def disjoint_union(g1: Graph, g2: Graph) -> Graph:
    shift = g1.n
    return Graph(g1.n + g2.n, list(g1.edges) + [(i + shift, j + shift) for i, j in g2.edges])


def random_graph(n: int, p: float, rng: np.random.Generator | int | None = None) -> Graph:
    """Erdos-Renyi G(n, p) sample, handy for tests and demos."""
    rng = np.random.default_rng(rng)
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    return Graph(n, zip((iu[keep] + 1).tolist(), (ju[keep] + 1).tolist()))


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(1, n)])


def complete_graph(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)])
