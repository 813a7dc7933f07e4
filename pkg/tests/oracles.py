"""Slow, independent reference routines used only by the tests.

Nothing here calls the library's search code: minors come from explicit
vertex labelings, pathwidth from a subset recurrence or raw permutations,
packing and covering numbers from the naive minor test.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations, permutations

import networkx as nx

from forestminors.graph import Graph


def _labelings(n, k):
    # -1 means unused; block ids appear in first-use order
    lab = [0] * n

    def rec(i, used):
        if i == n:
            yield list(lab), used
            return
        for b in range(-1, min(used + 1, k)):
            lab[i] = b
            yield from rec(i + 1, max(used, b + 1))

    yield from rec(0, 0)


def _connected(g, vs):
    vs = set(vs)
    if not vs:
        return False
    start = next(iter(vs))
    seen, stack = {start}, [start]
    while stack:
        u = stack.pop()
        for w in range(g.n):
            if w in vs and w not in seen and g.has_edge(u, w):
                seen.add(w)
                stack.append(w)
    return seen == vs


def naive_rooted_minor(h: Graph, h_roots, g: Graph, g_roots) -> bool:
    """Is (h, h_roots) a rooted minor of (g, g_roots)?  Exponential."""
    if h.n == 0:
        return not h_roots
    for lab, used in _labelings(g.n, h.n):
        if used != h.n:
            continue
        blocks = [[v for v in range(g.n) if lab[v] == b] for b in range(used)]
        if not all(_connected(g, b) for b in blocks):
            continue
        quotient = set()
        for u, v in g.edges():
            if lab[u] >= 0 and lab[v] >= 0 and lab[u] != lab[v]:
                quotient.add(frozenset((lab[u], lab[v])))
        for perm in permutations(range(used)):
            # perm[x] is the block hosting pattern vertex x
            if any(lab[gr] != perm[hr] for hr, gr in zip(h_roots, g_roots)):
                continue
            if all(frozenset((perm[a], perm[b])) in quotient for a, b in h.edges()):
                return True
    return False


def naive_minor(h: Graph, g: Graph) -> bool:
    return naive_rooted_minor(h, (), g, ())


def induced(g: Graph, vs) -> Graph:
    vs = sorted(vs)
    pos = {v: i for i, v in enumerate(vs)}
    return Graph(len(vs), [(pos[u], pos[v]) for u, v in g.edges() if u in pos and v in pos])


def separation_number(g: Graph) -> int:
    """Vertex separation number (= pathwidth) by the subset recurrence."""
    n = g.n
    if n == 0:
        return -1
    adj = [0] * n
    for u, v in g.edges():
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    full = (1 << n) - 1

    def boundary(s):
        return sum(1 for v in range(n) if s >> v & 1 and adj[v] & ~s & full)

    @lru_cache(maxsize=None)
    def best(s):
        if s == 0:
            return 0
        here = boundary(s)
        return max(here, min(best(s & ~(1 << v)) for v in range(n) if s >> v & 1))

    return best(full)


def permutation_pathwidth(g: Graph) -> int:
    """Minimum over vertex orders of the width of the order's decomposition."""
    if g.n == 0:
        return -1
    best = g.n
    for order in permutations(range(g.n)):
        placed = set()
        width = 0
        for v in order:
            bnd = {u for u in placed if any(g.has_edge(u, w) for w in range(g.n) if w not in placed)}
            width = max(width, len(bnd | {v}) - 1)
            placed.add(v)
        best = min(best, width)
    return best


def brute_tau(members, g: Graph) -> int:
    for k in range(g.n + 1):
        for xs in combinations(range(g.n), k):
            rest = induced(g, set(range(g.n)) - set(xs))
            if not any(naive_minor(h, rest) for h in members):
                return k
    raise AssertionError("unreachable")


def brute_nu(members, g: Graph) -> int:
    hits = []
    for k in range(1, g.n + 1):
        for vs in combinations(range(g.n), k):
            s = frozenset(vs)
            if any(h <= s for h in hits):
                continue
            if any(naive_minor(h, induced(g, s)) for h in members):
                hits.append(s)

    def rec(avail, start):
        out = 0
        for i in range(start, len(hits)):
            if hits[i] <= avail:
                out = max(out, 1 + rec(avail - hits[i], i + 1))
        return out

    return rec(frozenset(range(g.n)), 0)


def to_nx(g: Graph) -> nx.Graph:
    out = nx.Graph()
    out.add_nodes_from(range(g.n))
    out.add_edges_from(g.edges())
    return out


def matching_number(g: Graph) -> int:
    return len(nx.max_weight_matching(to_nx(g), maxcardinality=True))


def vertex_cover_number(g: Graph) -> int:
    # n minus the largest independent set = largest clique of the complement
    if g.n == 0:
        return 0
    comp = nx.complement(to_nx(g))
    return g.n - max(len(c) for c in nx.find_cliques(comp))
