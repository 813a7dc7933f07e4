"""Named graphs, exhaustive enumeration up to isomorphism, random instances."""

from __future__ import annotations

import random
from functools import lru_cache
from itertools import combinations

from .canon import canonical_form, canonical_graph
from .graph import Graph, RootedGraph, disjoint_union

__all__ = [
    "path_graph",
    "cycle_graph",
    "complete_graph",
    "star_graph",
    "empty_graph",
    "complete_binary_tree",
    "all_graphs",
    "connected_graphs",
    "forests",
    "trees",
    "rooted_trees",
    "random_graph",
    "random_connected_graph",
    "spanning_tree_completion",
    "parse_family_member",
]


def empty_graph(n: int) -> Graph:
    return Graph(n)


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycles need at least 3 vertices")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph(n, combinations(range(n), 2))


def star_graph(leaves: int) -> Graph:
    """K_{1,leaves} with centre 0."""
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete_binary_tree(height: int) -> RootedGraph:
    """B_h rooted at vertex 0 (heap numbering); height 0 is a single vertex."""
    n = 2 ** (height + 1) - 1
    return RootedGraph(Graph(n, [((i - 1) // 2, i) for i in range(1, n)]), (0,))


@lru_cache(maxsize=None)
def _graphs_on(n: int) -> tuple[bytes, ...]:
    if n == 0:
        return (canonical_form(Graph(0)),)
    seen = set()
    for enc in _graphs_on(n - 1):
        base = canonical_graph(enc).graph
        old = base.edges()
        for k in range(n):
            for nb in combinations(range(n - 1), k):
                g = Graph(n, old + [(v, n - 1) for v in nb])
                seen.add(canonical_form(g, cap=max(n, 10)))
    return tuple(sorted(seen))


def all_graphs(n: int) -> list[Graph]:
    """Every graph on exactly ``n`` vertices, one per isomorphism class."""
    return [canonical_graph(e).graph for e in _graphs_on(n)]


def connected_graphs(n: int) -> list[Graph]:
    return [g for g in all_graphs(n) if g.is_connected()]


def forests(n: int) -> list[Graph]:
    return [g for g in all_graphs(n) if g.is_forest()]


def trees(n: int) -> list[Graph]:
    return [g for g in all_graphs(n) if g.is_tree()]


@lru_cache(maxsize=None)
def _rooted_tree_codes(n: int) -> tuple[tuple, ...]:
    # a rooted tree is the sorted tuple of its children's codes
    if n == 1:
        return ((),)
    keys = [(size, code) for size in range(1, n) for code in _rooted_tree_codes(size)]
    out = []

    def pick(remaining, top, acc):
        if remaining == 0:
            out.append(tuple(sorted(acc)))
            return
        for i in range(top, -1, -1):
            size, code = keys[i]
            if size <= remaining:
                pick(remaining - size, i, acc + [code])

    pick(n - 1, len(keys) - 1, [])
    return tuple(sorted(set(out)))


def _code_to_tree(code) -> RootedGraph:
    edges = []
    counter = [0]

    def build(c):
        me = counter[0]
        counter[0] += 1
        for child in c:
            cid = build(child)
            edges.append((me, cid))
        return me

    build(code)
    return RootedGraph(Graph(counter[0], edges), (0,))


def rooted_trees(n: int) -> list[RootedGraph]:
    """All rooted trees on ``n`` vertices up to root-preserving isomorphism."""
    return [_code_to_tree(c) for c in _rooted_tree_codes(n)]


def random_graph(n: int, p: float, rng: random.Random) -> Graph:
    return Graph(n, [(u, v) for u, v in combinations(range(n), 2) if rng.random() < p])


def random_connected_graph(n: int, p: float, rng: random.Random) -> Graph:
    """Random spanning tree plus independent extra edges with probability ``p``."""
    order = list(range(n))
    rng.shuffle(order)
    edges = {tuple(sorted((order[i], order[rng.randrange(i)]))) for i in range(1, n)}
    for u, v in combinations(range(n), 2):
        if rng.random() < p:
            edges.add((u, v))
    return Graph(n, sorted(edges))


def spanning_tree_completion(forest: Graph) -> Graph:
    """Join the components of a forest into a tree by adding edges.

    Each step links the smallest vertex of the first component to the
    smallest vertex of the next one.
    """
    if not forest.is_forest():
        raise ValueError("not a forest")
    comps = forest.component_masks()
    edges = forest.edges()
    for a, b in zip(comps, comps[1:]):
        u = (a & -a).bit_length() - 1
        v = (b & -b).bit_length() - 1
        edges.append((u, v))
    return Graph(forest.n, edges)


def parse_family_member(spec: str) -> Graph:
    """Parse a small-graph name.

    Grammar: ``part ('+' part)*`` where a part is an optional multiplicity
    followed by ``K<n>``, ``P<n>``, ``C<n>``, ``S<n>`` (star with n leaves) or
    ``E<n>`` (n isolated vertices).  Example: ``2K2``, ``P3+K1``.
    """
    parts = []
    for raw in spec.strip().split("+"):
        raw = raw.strip()
        i = 0
        while i < len(raw) and raw[i].isdigit():
            i += 1
        mult = int(raw[:i]) if i else 1
        if mult < 1:
            raise ValueError(f"multiplicity must be positive in {spec!r}")
        kind, num = raw[i:i + 1].upper(), raw[i + 1:]
        if not num.isdigit():
            raise ValueError(f"cannot parse graph name {spec!r}")
        k = int(num)
        makers = {"K": complete_graph, "P": path_graph, "C": cycle_graph, "S": star_graph, "E": empty_graph}
        if kind not in makers:
            raise ValueError(f"unknown graph kind {kind!r} in {spec!r}")
        parts.extend([makers[kind](k)] * mult)
    return disjoint_union(*parts)
