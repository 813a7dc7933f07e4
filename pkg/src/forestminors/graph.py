"""Simple undirected graphs over dense vertex ids.

Graphs are immutable.  Every operation that removes or merges vertices
returns a fresh graph together with the id mapping it applied, so that
branching code can keep the original around for free.

Neighbourhoods are kept twice: as sorted tuples (the canonical, hashable
form) and as integer bitmasks (what the search code actually iterates on).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

__all__ = [
    "Graph",
    "RootedGraph",
    "Separation",
    "induced_subgraph",
    "delete_vertices",
    "contract_edge",
    "connected_components",
    "validate_separation",
    "bfs_distances",
    "disjoint_union",
    "bits",
    "mask_of",
]


def bits(mask: int) -> list[int]:
    """Return the positions of the set bits of ``mask`` in increasing order."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


class Graph:
    """A finite simple undirected graph on vertices ``0..n-1``.

    Parameters
    ----------
    n : int
        Number of vertices.
    edges : iterable of pairs
        Edges ``(u, v)``.  Self-loops and out-of-range ids raise ``ValueError``;
        repeated edges are collapsed.
    """

    __slots__ = ("n", "adjacency", "nbr", "_m", "_hash")

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        nbr = [0] * n
        for e in edges:
            u, v = e
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            nbr[u] |= 1 << v
            nbr[v] |= 1 << u
        self.n = n
        self.nbr: tuple[int, ...] = tuple(nbr)
        self.adjacency: tuple[tuple[int, ...], ...] = tuple(tuple(bits(m)) for m in nbr)
        self._m = sum(m.bit_count() for m in nbr) // 2
        self._hash = None

    @classmethod
    def from_masks(cls, masks: Sequence[int]) -> "Graph":
        n = len(masks)
        return cls(n, ((u, v) for u in range(n) for v in bits(masks[u]) if u < v))

    @property
    def m(self) -> int:
        return self._m

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def vertices(self) -> range:
        return range(self.n)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    def has_edge(self, u: int, v: int) -> bool:
        return 0 <= u < self.n and 0 <= v < self.n and bool(self.nbr[u] >> v & 1)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def neighbourhood_mask(self, mask: int) -> int:
        """Vertices adjacent to some vertex of ``mask`` (may intersect ``mask``)."""
        out = 0
        nbr = self.nbr
        while mask:
            low = mask & -mask
            out |= nbr[low.bit_length() - 1]
            mask ^= low
        return out

    def component_masks(self, within: int | None = None) -> list[int]:
        """Connected components of ``G[within]`` as bitmasks, by smallest vertex."""
        if within is None:
            within = self.full
        comps = []
        rest = within
        nbr = self.nbr
        while rest:
            seed = rest & -rest
            comp = seed
            frontier = seed
            while frontier:
                low = frontier & -frontier
                frontier ^= low
                new = nbr[low.bit_length() - 1] & rest & ~comp
                comp |= new
                frontier |= new
            comps.append(comp)
            rest &= ~comp
        return comps

    def is_connected_mask(self, mask: int) -> bool:
        if not mask:
            return True
        seed = mask & -mask
        comp = seed
        frontier = seed
        nbr = self.nbr
        while frontier:
            low = frontier & -frontier
            frontier ^= low
            new = nbr[low.bit_length() - 1] & mask & ~comp
            comp |= new
            frontier |= new
        return comp == mask

    def is_connected(self) -> bool:
        return self.is_connected_mask(self.full)

    def is_forest(self) -> bool:
        return self._m == self.n - len(self.component_masks())

    def is_tree(self) -> bool:
        return self.n >= 1 and self.is_forest() and self.is_connected()

    def edge_count_within(self, mask: int) -> int:
        total = 0
        nbr = self.nbr
        for v in bits(mask):
            total += (nbr[v] & mask).bit_count()
        return total // 2

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph with vertex ``v`` renamed ``perm[v]``."""
        return Graph(self.n, ((perm[u], perm[v]) for u, v in self.edges()))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.nbr == other.nbr

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, self.nbr))
        return self._hash

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.edges()})"


@dataclass(frozen=True)
class RootedGraph:
    """A graph with an ordered sequence of distinct roots."""

    graph: Graph
    roots: tuple[int, ...] = ()

    def __post_init__(self):
        roots = tuple(self.roots)
        object.__setattr__(self, "roots", roots)
        if len(set(roots)) != len(roots):
            raise ValueError("roots must be distinct")
        for r in roots:
            if not 0 <= r < self.graph.n:
                raise ValueError(f"root {r} out of range")

    @property
    def n(self) -> int:
        return self.graph.n


@dataclass(frozen=True)
class Separation:
    """A pair of vertex sets ``(left, right)`` inducing G1 and G2."""

    left: frozenset
    right: frozenset
    order: int = field(default=-1)

    def __post_init__(self):
        object.__setattr__(self, "left", frozenset(self.left))
        object.__setattr__(self, "right", frozenset(self.right))
        if self.order < 0:
            object.__setattr__(self, "order", len(self.left & self.right))

    @property
    def cut(self) -> frozenset:
        return self.left & self.right


def _check_ids(g: Graph, vs: Iterable[int]) -> list[int]:
    vs = sorted(set(vs))
    for v in vs:
        if not 0 <= v < g.n:
            raise ValueError(f"vertex {v} out of range for n={g.n}")
    return vs


def induced_subgraph(g: Graph, s: Iterable[int]) -> tuple[Graph, dict[int, int]]:
    """Return ``G[s]`` and the order-preserving map old id -> new id."""
    keep = _check_ids(g, s)
    mapping = {v: i for i, v in enumerate(keep)}
    edges = [(mapping[u], mapping[v]) for u in keep for v in g.adjacency[u] if u < v and v in mapping]
    return Graph(len(keep), edges), mapping


def delete_vertices(g: Graph, s: Iterable[int]) -> tuple[Graph, dict[int, int]]:
    gone = set(_check_ids(g, s))
    return induced_subgraph(g, (v for v in range(g.n) if v not in gone))


def contract_edge(g: Graph, u: int, v: int) -> tuple[Graph, dict[int, int]]:
    """Contract ``uv``; the merged vertex takes the smaller of the two ids' slot.

    Returns the new graph and the map from old ids to new ids (both ``u`` and
    ``v`` map to the merged vertex).
    """
    if not g.has_edge(u, v):
        raise ValueError(f"({u}, {v}) is not an edge")
    a, b = min(u, v), max(u, v)
    mapping = {}
    for w in range(g.n):
        if w == b:
            continue
        mapping[w] = w if w < b else w - 1
    mapping[b] = mapping[a]
    edges = set()
    for x, y in g.edges():
        x2, y2 = mapping[x], mapping[y]
        if x2 != y2:
            edges.add((min(x2, y2), max(x2, y2)))
    return Graph(g.n - 1, sorted(edges)), mapping


def connected_components(g: Graph) -> list[list[int]]:
    return [bits(c) for c in g.component_masks()]


def validate_separation(g: Graph, sep: Separation) -> bool:
    try:
        left, right = set(sep.left), set(sep.right)
    except TypeError:
        return False
    if any(not isinstance(v, int) or not 0 <= v < g.n for v in left | right):
        return False
    if left | right != set(range(g.n)):
        return False
    if sep.order != len(left & right):
        return False
    only_left = mask_of(left - right)
    only_right = mask_of(right - left)
    return g.neighbourhood_mask(only_left) & only_right == 0


def bfs_distances(g: Graph, w: int) -> dict[int, int]:
    if not 0 <= w < g.n:
        raise ValueError(f"vertex {w} out of range for n={g.n}")
    dist = {w: 0}
    queue = deque([w])
    while queue:
        u = queue.popleft()
        for v in g.adjacency[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def shortest_path(g: Graph, source: int, targets: int) -> list[int]:
    """Vertices of a shortest path from ``source`` to the vertex mask ``targets``.

    Ties go to the smallest-id predecessor.  Raises ``ValueError`` if no target
    is reachable.
    """
    if targets >> source & 1:
        return [source]
    parent = {source: None}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in g.adjacency[u]:
            if v in parent:
                continue
            parent[v] = u
            if targets >> v & 1:
                path = [v]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return path[::-1]
            queue.append(v)
    raise ValueError("no target reachable")


def disjoint_union(*graphs: Graph) -> Graph:
    edges = []
    offset = 0
    for h in graphs:
        edges.extend((u + offset, v + offset) for u, v in h.edges())
        offset += h.n
    return Graph(offset, edges)
