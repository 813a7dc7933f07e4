"""Canonical encodings of small rooted graphs.

The encoding is the lexicographically smallest adjacency string over all
vertex orders that respect an isomorphism-invariant ordered partition
(roots first by position, then colour refinement).  Orders are explored by
individualisation/refinement; interchangeable twins inside a cell are tried
once.
"""

from __future__ import annotations

from .graph import Graph, RootedGraph, bits

__all__ = ["canonical_form", "canonical_graph", "CapExceeded", "DEFAULT_CANON_CAP"]

DEFAULT_CANON_CAP = 10


class CapExceeded(RuntimeError):
    """Instance is larger than the configured size cap."""


def _refine(nbr, colors):
    # colors: list[int]; returns a stable refined colouring with canonical ids
    n = len(colors)
    while True:
        sigs = [(colors[v], tuple(sorted(colors[u] for u in bits(nbr[v])))) for v in range(n)]
        ranks = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [ranks[s] for s in sigs]
        if len(ranks) == len(set(colors)):
            return new
        colors = new


def _encode(nbr, order, roots):
    n = len(order)
    pos = [0] * n
    for i, v in enumerate(order):
        pos[v] = i
    rows = []
    for i, v in enumerate(order):
        row = 0
        for j in range(i + 1, n):
            if nbr[v] >> order[j] & 1:
                row |= 1 << (n - 1 - j)
        rows.append(row)
    nbytes = max(1, (n + 7) // 8)
    head = bytes([n, len(roots)]) + bytes(pos[r] for r in roots)
    return head + b"".join(r.to_bytes(nbytes, "big") for r in rows)


def _search(nbr, colors, roots, best):
    n = len(colors)
    cells: dict[int, list[int]] = {}
    for v, c in enumerate(colors):
        cells.setdefault(c, []).append(v)
    target = None
    for c in sorted(cells):
        if len(cells[c]) > 1:
            target = cells[c]
            break
    if target is None:
        order = sorted(range(n), key=lambda v: colors[v])
        enc = _encode(nbr, order, roots)
        if best[0] is None or enc < best[0]:
            best[0] = enc
        return
    tried: list[int] = []
    for v in target:
        # twins inside one cell give identical subtrees
        if any((nbr[v] & ~(1 << u)) == (nbr[u] & ~(1 << v)) for u in tried):
            continue
        tried.append(v)
        c = colors[v]
        indiv = [2 * col + (1 if col == c and u != v else 0) for u, col in enumerate(colors)]
        _search(nbr, _refine(nbr, indiv), roots, best)


def canonical_form(rg: RootedGraph | Graph, cap: int = DEFAULT_CANON_CAP) -> bytes:
    """Encoding shared by exactly the rooted graphs isomorphic to ``rg``.

    Isomorphisms must send the i-th root to the i-th root.
    """
    if isinstance(rg, Graph):
        rg = RootedGraph(rg, ())
    g, roots = rg.graph, rg.roots
    if g.n > cap:
        raise CapExceeded(f"canonical form capped at {cap} vertices, got {g.n}")
    if g.n > 255:
        raise CapExceeded("encoding supports at most 255 vertices")
    colors = [0] * g.n
    for i, r in enumerate(roots):
        colors[r] = i + 1
    best = [None]
    _search(g.nbr, _refine(g.nbr, colors), roots, best)
    if best[0] is None:
        return _encode(g.nbr, [], roots)
    return best[0]


def canonical_graph(encoding: bytes) -> RootedGraph:
    """Decode an encoding produced by :func:`canonical_form`."""
    n, k = encoding[0], encoding[1]
    roots = tuple(encoding[2:2 + k])
    nbytes = max(1, (n + 7) // 8)
    body = encoding[2 + k:]
    edges = []
    for i in range(n):
        row = int.from_bytes(body[i * nbytes:(i + 1) * nbytes], "big")
        for j in range(i + 1, n):
            if row >> (n - 1 - j) & 1:
                edges.append((i, j))
    return RootedGraph(Graph(n, edges), roots)
