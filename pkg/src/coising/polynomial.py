"""Ising polynomials: the classical spectrum invariant of a graph.

The polynomial of a graph counts spin configurations by the pair
``(e, m)`` where ``e = sum_{(i,j) in E} s_i s_j`` is the coupling energy and
``m = sum_i s_i`` the magnetization.  Keeping the field term in its own
exponent makes global spin flip act as ``m -> -m`` with ``e`` fixed, which is
what the rooted decomposition relies on; the diagonal problem Hamiltonian
with unit couplings and unit field has energy ``e + m``.

Counts are Python integers throughout.  Direct enumeration walks the
hypercube in Gray-code order (one spin flip per step, O(degree) update).
Larger graphs are handled by :func:`classical_spectrum_auto`, which splits at
articulation vertices and glues rooted pieces back together with
:func:`compose_rooted`.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import networkx as nx
import numba as nb
import numpy as np

from .graph import Graph, GraphError

#: Largest vertex count (direct) or block size (decomposition) enumerated.
MAX_ENUM_VERTICES = 28
#: Largest number of attachment vertices inside a single block.
MAX_ATTACHMENTS = 18


class SpectrumError(ValueError):
    """Raised when a polynomial cannot be computed within the enumeration caps."""


@dataclass(frozen=True)
class IsingPolynomial:
    """Exact map ``(e, m) -> count``.

    ``rooted`` marks polynomials summed only over states whose root spin is
    ``+1``; their counts total ``2**(n - 1)`` instead of ``2**n``.
    """

    n: int
    terms: Mapping[tuple[int, int], int] = field(compare=True)
    rooted: bool = False

    def __post_init__(self):
        clean = {(int(e), int(m)): int(c) for (e, m), c in self.terms.items() if c}
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    def total(self) -> int:
        return sum(self.terms.values())

    def reflect_m(self) -> "IsingPolynomial":
        """Negate every magnetization; the image of a global spin flip."""
        return IsingPolynomial(self.n, {(e, -m): c for (e, m), c in self.terms.items()}, self.rooted)

    def unroot(self) -> "IsingPolynomial":
        """Full polynomial from a rooted one: ``Z = Z_v(x, y) + Z_v(x, 1/y)``."""
        if not self.rooted:
            raise SpectrumError("polynomial is already a full polynomial")
        out: dict[tuple[int, int], int] = defaultdict(int)
        for (e, m), c in self.terms.items():
            out[(e, m)] += c
            out[(e, -m)] += c
        return IsingPolynomial(self.n, out, rooted=False)

    def hp_spectrum(self) -> dict[int, int]:
        """Multiset of diagonal energies ``e + m`` as ``energy -> degeneracy``."""
        out: dict[int, int] = defaultdict(int)
        for (e, m), c in self.terms.items():
            out[e + m] += c
        return dict(sorted(out.items()))

    def to_json(self) -> str:
        payload = {
            "n": self.n,
            "rooted": self.rooted,
            "total": str(self.total()),
            "terms": {f"{e},{m}": str(c) for (e, m), c in self.terms.items()},
        }
        return json.dumps(payload, indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "IsingPolynomial":
        doc = json.loads(text)
        terms = {}
        for key, c in doc["terms"].items():
            e, m = key.split(",")
            terms[(int(e), int(m))] = int(c)
        return cls(int(doc["n"]), terms, bool(doc.get("rooted", False)))


@dataclass(frozen=True)
class RootedGraph:
    graph: Graph
    root: int

    def __post_init__(self):
        if not 1 <= self.root <= self.graph.n:
            raise GraphError(f"root {self.root} outside 1..{self.graph.n}")


# ---------------------------------------------------------------------------
# enumeration kernel


@nb.njit(cache=True)
def _gray_histogram(n, indptr, indices, free, pattern_pos, num_patterns, num_edges):
    """Histogram of (pattern, e + E, #down spins) over all states of ``free``.

    Spins outside ``free`` stay at +1.  ``pattern_pos[v] = q`` records the
    spin of vertex ``v`` as bit ``q`` of the pattern index (bit set = down).
    """
    hist = np.zeros((num_patterns, 2 * num_edges + 1, n + 1), dtype=np.int64)
    spin = np.ones(n, dtype=np.int64)
    e = num_edges
    down = 0
    pattern = 0
    hist[0, e + num_edges, 0] += 1
    nfree = free.shape[0]
    for t in range(1, 1 << nfree):
        k = 0
        while not (t >> k) & 1:
            k += 1
        v = free[k]
        local = 0
        for p in range(indptr[v], indptr[v + 1]):
            local += spin[indices[p]]
        sv = spin[v]
        e -= 2 * sv * local
        spin[v] = -sv
        down += 1 if sv == 1 else -1
        q = pattern_pos[v]
        if q >= 0:
            pattern ^= 1 << q
        hist[pattern, e + num_edges, down] += 1
    return hist


def _csr(n: int, edges: Iterable[tuple[int, int]]) -> tuple[np.ndarray, np.ndarray]:
    """0-based CSR adjacency from 0-based edges."""
    adj: list[list[int]] = [[] for _ in range(n)]
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)
    indptr = np.zeros(n + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(a) for a in adj])
    indices = np.array([u for a in adj for u in a], dtype=np.int64)
    return indptr, indices


def _enumerate(
    n: int,
    edges: list[tuple[int, int]],
    fixed_up: Iterable[int] = (),
    pattern: list[int] | None = None,
) -> np.ndarray:
    """Raw histogram ``[pattern, e + |E|, #down]`` for 0-based ``edges``."""
    fixed = set(fixed_up)
    free = np.array([v for v in range(n) if v not in fixed], dtype=np.int64)
    pos = np.full(n, -1, dtype=np.int64)
    pattern = pattern or []
    for q, v in enumerate(pattern):
        pos[v] = q
    indptr, indices = _csr(n, edges)
    return _gray_histogram(n, indptr, indices, free, pos, 1 << len(pattern), len(edges))


def _hist_to_terms(h: np.ndarray, n: int, num_edges: int) -> dict[tuple[int, int], int]:
    terms = {}
    for ei, di in zip(*np.nonzero(h)):
        terms[(int(ei) - num_edges, n - 2 * int(di))] = int(h[ei, di])
    return terms


def classical_spectrum(g: Graph) -> IsingPolynomial:
    """Ising polynomial of ``g`` by enumerating all ``2**n`` configurations."""
    if g.n > MAX_ENUM_VERTICES:
        raise SpectrumError(
            f"direct enumeration is capped at n <= {MAX_ENUM_VERTICES} (got {g.n}); "
            "use classical_spectrum_auto"
        )
    edges = [(i - 1, j - 1) for i, j in g.edges]
    h = _enumerate(g.n, edges)[0]
    return IsingPolynomial(g.n, _hist_to_terms(h, g.n, len(edges)))


def rooted_spectrum(rg: RootedGraph) -> IsingPolynomial:
    """Ising polynomial restricted to states with the root spin up."""
    g = rg.graph
    if g.n > MAX_ENUM_VERTICES:
        raise SpectrumError(
            f"direct enumeration is capped at n <= {MAX_ENUM_VERTICES} (got {g.n}); "
            "use classical_spectrum_auto"
        )
    edges = [(i - 1, j - 1) for i, j in g.edges]
    h = _enumerate(g.n, edges, fixed_up=[rg.root - 1])[0]
    return IsingPolynomial(g.n, _hist_to_terms(h, g.n, len(edges)), rooted=True)


# ---------------------------------------------------------------------------
# polynomial arithmetic


class _Dense:
    """2-D coefficient array with integer offsets; int64 or object dtype."""

    __slots__ = ("arr", "e0", "m0")

    def __init__(self, arr: np.ndarray, e0: int, m0: int):
        self.arr, self.e0, self.m0 = arr, e0, m0

    @classmethod
    def from_terms(cls, terms: Mapping[tuple[int, int], int], exact_object: bool) -> "_Dense":
        es = [e for e, _ in terms]
        ms = [m for _, m in terms]
        e0, m0 = min(es), min(ms)
        arr = np.zeros((max(es) - e0 + 1, max(ms) - m0 + 1), dtype=object if exact_object else np.int64)
        for (e, m), c in terms.items():
            arr[e - e0, m - m0] = c
        return cls(arr, e0, m0)

    def terms(self) -> dict[tuple[int, int], int]:
        return {
            (int(i) + self.e0, int(j) + self.m0): int(self.arr[i, j])
            for i, j in zip(*np.nonzero(self.arr))
        }

    def mul(self, other: "_Dense", dm: int = 0) -> "_Dense":
        a, b = (self, other) if np.count_nonzero(self.arr) <= np.count_nonzero(other.arr) else (other, self)
        shape = (a.arr.shape[0] + b.arr.shape[0] - 1, a.arr.shape[1] + b.arr.shape[1] - 1)
        dtype = object if object in (a.arr.dtype, b.arr.dtype) else np.int64
        out = np.zeros(shape, dtype=dtype)
        bh, bw = b.arr.shape
        for i, j in zip(*np.nonzero(a.arr)):
            out[i : i + bh, j : j + bw] += a.arr[i, j] * b.arr
        return _Dense(out, a.e0 + b.e0, a.m0 + b.m0 + dm)


def _use_object(n_total: int) -> bool:
    # int64 is exact while every partial sum stays below 2**62
    return n_total > 61


def compose_rooted(p1: IsingPolynomial, p2: IsingPolynomial) -> IsingPolynomial:
    """Rooted polynomial of two rooted graphs glued at their roots.

    Multiplies the polynomials and divides by ``y`` once, because the shared
    root spin (always +1) would otherwise be counted twice.
    """
    if not (p1.rooted and p2.rooted):
        raise SpectrumError("compose_rooted needs two rooted polynomials")
    n = p1.n + p2.n - 1
    obj = _use_object(n)
    prod = _Dense.from_terms(p1.terms, obj).mul(_Dense.from_terms(p2.terms, obj), dm=-1)
    return IsingPolynomial(n, prod.terms(), rooted=True)


def multiply_full(p1: IsingPolynomial, p2: IsingPolynomial) -> IsingPolynomial:
    """Polynomial of a disjoint union."""
    if p1.rooted or p2.rooted:
        raise SpectrumError("multiply_full needs two full polynomials")
    n = p1.n + p2.n
    obj = _use_object(n)
    prod = _Dense.from_terms(p1.terms, obj).mul(_Dense.from_terms(p2.terms, obj))
    return IsingPolynomial(n, prod.terms())


def vertex_identify(rg1: RootedGraph, rg2: RootedGraph) -> RootedGraph:
    """Glue ``rg2`` onto ``rg1`` by merging the two roots.

    The vertices of ``rg2`` other than its root become ``n1 + 1 .. n1 + n2 - 1``
    in their original order; the merged vertex keeps ``rg1``'s label.
    """
    n1 = rg1.graph.n
    relab = {}
    nxt = n1 + 1
    for v in range(1, rg2.graph.n + 1):
        if v == rg2.root:
            relab[v] = rg1.root
        else:
            relab[v] = nxt
            nxt += 1
    edges = list(rg1.graph.edges) + [(relab[i], relab[j]) for i, j in rg2.graph.edges]
    return RootedGraph(Graph(n1 + rg2.graph.n - 1, edges), rg1.root)


# ---------------------------------------------------------------------------
# cut-vertex decomposition


@dataclass
class Decomposition:
    """Block structure found by :func:`classical_spectrum_auto` (1-based labels)."""

    components: list[list[int]]
    blocks: list[list[int]]
    cut_vertices: list[int]
    roots: list[int]

    @property
    def largest_block(self) -> int:
        return max((len(b) for b in self.blocks), default=1)


def decompose(g: Graph) -> Decomposition:
    """Connected components, biconnected blocks and articulation vertices."""
    G = nx.Graph()
    G.add_nodes_from(range(1, g.n + 1))
    G.add_edges_from(g.edges)
    comps = [sorted(c) for c in nx.connected_components(G)]
    comps.sort()
    blocks = sorted(sorted(b) for b in nx.biconnected_components(G))
    cuts = sorted(nx.articulation_points(G))
    roots = []
    for comp in comps:
        cset = set(comp)
        comp_cuts = [v for v in cuts if v in cset]
        if comp_cuts:
            # the cut vertex touching the most blocks is the natural gluing point
            roots.append(max(comp_cuts, key=lambda v: (sum(v in b for b in blocks), -v)))
        else:
            roots.append(comp[0])
    return Decomposition(comps, blocks, cuts, roots)


def _shift_m(p: _Dense, dm: int) -> _Dense:
    return _Dense(p.arr, p.e0, p.m0 + dm)


def _reflect(p: _Dense) -> _Dense:
    return _Dense(p.arr[:, ::-1].copy(), p.e0, -(p.m0 + p.arr.shape[1] - 1))


def classical_spectrum_auto(g: Graph) -> IsingPolynomial:
    """Ising polynomial via articulation-vertex decomposition.

    Every biconnected block is enumerated once with its parent cut vertex
    pinned to +1, histogrammed by the spins of the block's other cut
    vertices; the rooted polynomials hanging below those vertices are then
    multiplied in.  Equal to :func:`classical_spectrum` wherever both run.
    """
    dec = decompose(g)
    obj = _use_object(g.n)
    big = [b for b in dec.blocks if len(b) > MAX_ENUM_VERTICES]
    if big:
        raise SpectrumError(
            f"biconnected component with {len(big[0])} vertices exceeds the enumeration cap "
            f"of {MAX_ENUM_VERTICES}"
        )
    blocks_of: dict[int, list[int]] = defaultdict(list)
    for k, b in enumerate(dec.blocks):
        for v in b:
            blocks_of[v].append(k)
    edge_set = set(g.edges)

    def block_edges(block: list[int]) -> list[tuple[int, int]]:
        idx = {v: t for t, v in enumerate(block)}
        out = []
        for a in range(len(block)):
            for b in range(a + 1, len(block)):
                u, v = block[a], block[b]
                if (min(u, v), max(u, v)) in edge_set:
                    out.append((idx[u], idx[v]))
        return out

    def rooted_at(v: int, parent_block: int | None) -> _Dense:
        acc = _Dense(np.array([[1]], dtype=object if obj else np.int64), 0, 1)
        for k in blocks_of[v]:
            if k != parent_block:
                acc = acc.mul(block_poly(k, v), dm=-1)
        return acc

    def block_poly(k: int, c: int) -> _Dense:
        block = dec.blocks[k]
        attach = [u for u in block if u != c and len(blocks_of[u]) > 1]
        if len(attach) > MAX_ATTACHMENTS:
            raise SpectrumError(
                f"block of {len(block)} vertices has {len(attach)} attachment vertices "
                f"(cap {MAX_ATTACHMENTS})"
            )
        local = {v: t for t, v in enumerate(block)}
        edges = block_edges(block)
        hist = _enumerate(len(block), edges, fixed_up=[local[c]], pattern=[local[u] for u in attach])
        hanging = [rooted_at(u, k) for u in attach]
        # spin +1 at u: hanging poly already counts u, so drop one y; spin -1: reflected
        up = [_shift_m(p, -1) for p in hanging]
        down = [_shift_m(_reflect(p), +1) for p in hanging]
        nb_ = len(block)
        total = None
        for pat in range(1 << len(attach)):
            h = hist[pat]
            if not h.any():
                continue
            terms = _hist_to_terms(h, nb_, len(edges))
            piece = _Dense.from_terms(terms, obj)
            for q in range(len(attach)):
                piece = piece.mul(down[q] if (pat >> q) & 1 else up[q])
            total = piece if total is None else _add(total, piece)
        return total

    full: IsingPolynomial | None = None
    for comp, r in zip(dec.components, dec.roots):
        if len(comp) == 1:
            part = IsingPolynomial(1, {(0, 1): 1, (0, -1): 1})
        else:
            rooted = IsingPolynomial(len(comp), rooted_at(r, None).terms(), rooted=True)
            part = rooted.unroot()
        full = part if full is None else multiply_full(full, part)
    return IsingPolynomial(g.n, full.terms)


def _add(a: _Dense, b: _Dense) -> _Dense:
    e0, m0 = min(a.e0, b.e0), min(a.m0, b.m0)
    e1 = max(a.e0 + a.arr.shape[0], b.e0 + b.arr.shape[0])
    m1 = max(a.m0 + a.arr.shape[1], b.m0 + b.arr.shape[1])
    dtype = object if object in (a.arr.dtype, b.arr.dtype) else np.int64
    out = np.zeros((e1 - e0, m1 - m0), dtype=dtype)
    for p in (a, b):
        out[p.e0 - e0 : p.e0 - e0 + p.arr.shape[0], p.m0 - m0 : p.m0 - m0 + p.arr.shape[1]] += p.arr
    return _Dense(out, e0, m0)


def co_ising(g1: Graph, g2: Graph) -> bool:
    """True when both graphs have identical Ising polynomials."""
    if g1.n != g2.n or g1.num_edges != g2.num_edges:
        return False
    return classical_spectrum_auto(g1) == classical_spectrum_auto(g2)
