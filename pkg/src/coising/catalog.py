"""Static catalog of the benchmark graphs.

Edge lists are stored exactly as published, including the non-sorted pairs
such as ``(5, 1)`` in G25p4; :func:`catalog_get` canonicalizes them.  The
vertex count of every graph equals the largest label in its listing, which
also matches the number in its name.
"""

from __future__ import annotations

from .graph import Graph, GraphError, VertexPermutation, relabel

_LISTINGS: dict[str, str] = {
    "G13": """[(1, 8), (1, 10), (1, 11), (1, 13), (2, 9), (2, 11),
        (2, 13), (3, 10), (3, 13), (4, 10), (5, 11), (6, 12),
        (7, 12), (9, 12), (12, 13)]""",
    "G13p": """[(1, 8), (1, 10), (1, 11), (1, 13), (2, 9), (2, 11),
        (2, 13), (3, 10), (3, 11), (4, 10), (5, 12), (6, 12),
        (7, 13), (8, 12), (12, 13)]""",
    "G17": """[(1, 2), (1, 3), (1, 4), (1, 5), (4, 6), (4, 7),
        (5, 8), (5, 9), (5, 10), (6, 11), (10, 12), (10, 13),
        (10, 14), (11, 15), (11, 16), (12, 17)]""",
    "G17p": """[(1, 2), (1, 3), (1, 4), (1, 5), (4, 6), (5, 7),
        (5, 8), (5, 9), (6, 10), (6, 11), (9, 12), (9, 13),
        (9, 14), (10, 15), (12, 16), (12, 17)]""",
    "G25p1": """[(1, 6), (1, 7), (3, 7), (4, 8), (4, 9), (5, 8),
        (5, 9), (6, 9), (10, 14), (10, 15), (11, 15), (12, 16),
        (12, 17), (13, 16), (13, 17), (14, 17), (18, 22),
        (18, 23), (19, 23), (20, 24), (20, 25), (21, 24),
        (21, 25), (22, 25), (2, 6), (2, 14), (2, 22)]""",
    "G25p2": """[(1, 6), (1, 7), (3, 7), (4, 8), (4, 9), (5, 8),
        (5, 9), (6, 9), (10, 14), (10, 15), (11, 15), (12, 16),
        (12, 17), (13, 16), (13, 17), (14, 17), (18, 23),
        (18, 25), (19, 22), (19, 24), (20, 23), (20, 25),
        (21, 24), (21, 25), (2, 6), (2, 14), (2, 18)]""",
    "G25p3": """[(1, 6), (1, 7), (3, 7), (4, 8), (4, 9), (5, 8),
        (5, 9), (6, 9), (10, 15), (10, 17), (11, 14), (11, 16),
        (12, 15), (12, 17), (13, 16), (13, 17), (18, 23),
        (18, 25), (19, 22), (19, 24), (20, 23), (20, 25),
        (21, 24), (21, 25), (2, 6), (2, 10), (2, 18)]""",
    "G25p4": """[(1, 7), (1, 9), (2, 6), (2, 8), (3, 7), (3, 9),
        (4, 8), (4, 9), (10, 15), (10, 17), (11, 14), (11, 16),
        (12, 15), (12, 17), (13, 16), (13, 17), (18, 23),
        (18, 25), (19, 22), (19, 24), (20, 23), (20, 25),
        (21, 24), (21, 25), (5, 1), (5, 10), (5, 18)]""",
    "G27": """[(1, 14), (1, 17), (2, 14), (2, 22), (3, 4), (3, 5),
        (4, 10), (4, 12), (5, 11), (5, 13), (6, 7), (6, 8),
        (6, 15), (7, 10), (7, 11), (8, 12), (8, 13), (9, 12),
        (9, 13), (9, 14), (10, 15 ), (11, 15), (14, 15), (16, 17),
        (16, 21), (17, 18), (18, 19), (19, 20), (20, 21), (22, 23),
        (22, 27), (23, 24), (24, 25), (25, 26), (26, 27)]""",
    "G27p": """[(1, 14), (1, 17), (2, 14), (2, 23), (3, 4), (3, 5),
        (4, 10), (4, 11), (5, 12), (5, 13), (6, 7), (6, 8),
        (6, 15), (7, 10), (7, 12), (8, 11), (8, 13), (9, 12),
        (9, 13), (9, 14), (10, 15), (11, 15), (14, 15), (16, 17),
        (16, 21), (17, 18), (18, 19), (19, 20), (20, 21), (22, 23),
        (22, 27), (23, 24), (24, 25), (25, 26), (26, 27)]""",
    "G33": """[(1, 6), (1, 7), (3, 7), (4, 8), (4, 9), (5, 8),
        (5, 9), (6, 9), (10, 14), (10, 15), (11, 15), (12, 16),
        (12, 17), (13, 16), (13, 17), (14, 17), (18, 22), (18, 23),
        (19, 23), (20, 24), (20, 25), (21, 24), (21, 25), (22, 25),
        (26, 30), (26, 31), (27, 31), (28, 32), (28, 33), (29, 32),
        (29, 33), (30, 33), (2, 6), (2, 14), (2, 22), (2, 30)]""",
    "G33p": """[(1, 6), (1, 7), (3, 7), (4, 8), (4, 9), (5, 8),
        (5, 9), (6, 9), (10, 14), (10, 15), (11, 15), (12, 16),
        (12, 17), (13, 16), (13, 17), (14, 17), (18, 22), (18, 23),
        (19, 23), (20, 24), (20, 25), (21, 24), (21, 25), (22, 25),
        (26, 31), (26, 33), (27, 30), (27, 32), (28, 31), (28, 33),
        (29, 32), (29, 33), (2, 6), (2, 14), (2, 22), (2, 26)]""",
    "G33p1": """[(1, 6), (1, 7), (3, 7), (4, 8), (4, 9), (5, 8),
        (5, 9), (6, 9), (10, 15), (10, 17), (11, 14), (11, 16),
        (12, 15), (12, 17), (13, 16), (13, 17), (18, 23), (18, 25),
        (19, 22), (19, 24), (20, 23), (20, 25), (21, 24), (21, 25),
        (26, 31), (26, 33), (27, 30), (27, 32), (28, 31), (28, 33),
        (29, 32), (29, 33), (2, 6), (2, 10), (2, 18), (2, 26)]""",
    "G33p2": """[(1, 6), (1, 7), (2, 6), (3, 7), (4, 8), (4, 9),
        (6, 9), (10, 15), (10, 17), (11, 14), (11, 16), (12, 15),
        (12, 17), (13, 16), (13, 17), (18, 23), (18, 25), (19, 22),
        (19, 24), (20, 23), (20, 25), (21, 24), (21, 25), (26, 31),
        (26, 33), (27, 30), (27, 32), (28, 31), (28, 33), (29, 32),
        (29, 33), (5, 8), (5, 9), (5, 10), (5, 18), (5, 26)]""",
}

NAMES: tuple[str, ...] = tuple(_LISTINGS)

#: Classically co-Ising, pairwise non-isomorphic families.
TUPLES: dict[str, tuple[str, ...]] = {
    "G13": ("G13", "G13p"),
    "G17": ("G17", "G17p"),
    "G25": ("G25p1", "G25p2", "G25p3", "G25p4"),
    "G27": ("G27", "G27p"),
    "G33": ("G33", "G33p", "G33p1", "G33p2"),
}

#: Seed used to build the isomorphic control variants (``G13i`` and friends).
ISO_VARIANT_SEED = 20201


def listing(name: str) -> str:
    """Raw published edge list for ``name``."""
    try:
        return _LISTINGS[name]
    except KeyError:
        raise KeyError(f"unknown catalog graph {name!r}; valid names: {', '.join(NAMES)}") from None


def catalog_get(name: str) -> Graph:
    """Catalog graph by name.

    Names ending in ``i`` (``G13i``, ``G27i``, ...) return an isomorphic
    control: the base graph relabeled by a fixed seeded permutation.
    """
    from .graph import parse_graph

    if name not in _LISTINGS and name.endswith("i") and name[:-1] in _LISTINGS:
        return iso_variant(catalog_get(name[:-1]), ISO_VARIANT_SEED)
    return parse_graph(listing(name))


def iso_variant(g: Graph, seed: int) -> Graph:
    """Seeded random relabeling of ``g`` whose edge set differs from ``g``'s."""
    attempt = 0
    while True:
        p = VertexPermutation.random(g.n, [seed, attempt])
        h = relabel(g, p)
        if h != g or attempt > 100:
            return h
        attempt += 1


def all_graphs() -> dict[str, Graph]:
    return {name: catalog_get(name) for name in NAMES}


__all__ = ["NAMES", "TUPLES", "ISO_VARIANT_SEED", "catalog_get", "iso_variant", "listing", "all_graphs", "GraphError"]
