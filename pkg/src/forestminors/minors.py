"""Minor models, rooted minors, folios and the folio-preserving reduction.

Model search places pattern vertices one at a time (roots first, then the
vertex with most placed neighbours, then highest degree) and enumerates
connected branch sets for it inside the unused part of the host.  A
non-root leaf whose neighbour is already placed only ever needs a single
host vertex, and isolated pattern vertices are filled in last.  After each
placement, every unplaced vertex must still have a region of free host
vertices touching all of its placed neighbours.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator

from .canon import DEFAULT_CANON_CAP, canonical_form, canonical_graph
from .graph import Graph, RootedGraph, Separation, bits, induced_subgraph, mask_of

__all__ = [
    "MinorModel",
    "SearchBudgetExceeded",
    "find_model",
    "find_rooted_model",
    "validate_model",
    "canonical_form",
    "Folio",
    "DeletionFolio",
    "q_folio",
    "deletion_folio",
    "reduce_separation",
    "Reduction",
    "has_rooted_binary_tree_minor",
    "rooted_binary_tree_height",
    "connected_sets",
    "DEFAULT_NODE_BUDGET",
]

DEFAULT_NODE_BUDGET = 2_000_000


class SearchBudgetExceeded(RuntimeError):
    """The search gave up; this says nothing about whether a model exists."""


@dataclass(frozen=True)
class MinorModel:
    """Branch sets keyed by pattern vertex."""

    branch_sets: dict = field(hash=False)

    def vertex_set(self) -> frozenset:
        return frozenset().union(*self.branch_sets.values()) if self.branch_sets else frozenset()

    def relabel(self, mapping) -> "MinorModel":
        return MinorModel({x: frozenset(mapping[v] for v in s) for x, s in self.branch_sets.items()})


def validate_model(h: Graph | RootedGraph, g: Graph | RootedGraph, model: MinorModel) -> bool:
    """Check every model invariant from scratch."""
    h_roots = g_roots = ()
    if isinstance(h, RootedGraph):
        h, h_roots = h.graph, h.roots
    if isinstance(g, RootedGraph):
        g, g_roots = g.graph, g.roots
    bs = model.branch_sets
    if set(bs) != set(range(h.n)):
        return False
    masks = {}
    seen = 0
    for x, s in bs.items():
        s = set(s)
        if not s or any(not isinstance(v, int) or not 0 <= v < g.n for v in s):
            return False
        m = mask_of(s)
        if m & seen:
            return False
        seen |= m
        if not g.is_connected_mask(m):
            return False
        masks[x] = m
    for x, y in h.edges():
        if not g.neighbourhood_mask(masks[x]) & masks[y]:
            return False
    if len(h_roots) != len(g_roots):
        return False
    for w, v in zip(h_roots, g_roots):
        if not masks[w] >> v & 1:
            return False
    return True


def connected_sets(nbr, allowed: int, seeds: int, max_size: int) -> Iterator[int]:
    """Each connected subset of ``allowed`` meeting ``seeds``, once.

    Sets are rooted at their first seed (by id); later seeds are excluded
    while earlier ones are processed.
    """
    excluded = 0
    rest = seeds & allowed
    while rest:
        low = rest & -rest
        rest ^= low
        region = allowed & ~excluded
        yield from _grow(nbr, region, low, 0, max_size)
        excluded |= low


def _grow(nbr, region, current, banned, max_size):
    yield current
    if current.bit_count() >= max_size:
        return
    frontier = 0
    rest = current
    while rest:
        low = rest & -rest
        rest ^= low
        frontier |= nbr[low.bit_length() - 1]
    frontier &= region & ~current & ~banned
    added = 0
    while frontier:
        low = frontier & -frontier
        frontier ^= low
        yield from _grow(nbr, region, current | low, banned | added, max_size)
        added |= low


class _ModelSearch:
    def __init__(self, h: Graph, g: Graph, allowed: int, pairs: dict[int, int], budget: int):
        self.h = h
        self.g = g
        self.nbr = g.nbr
        self.allowed = allowed
        self.pairs = pairs  # pattern root -> host root
        self.reserved = mask_of(pairs.values())
        self.budget = budget
        isolated = [x for x in range(h.n) if h.degree(x) == 0 and x not in pairs]
        self.isolated = isolated
        placed: list[int] = [x for x in pairs]
        rest = [x for x in range(h.n) if x not in pairs and x not in isolated]
        while rest:
            def key(x):
                return (-sum(1 for y in h.adjacency[x] if y in placed), -h.degree(x), x)
            nxt = min(rest, key=key)
            placed.append(nxt)
            rest.remove(nxt)
        self.order = placed
        self.assign: dict[int, int] = {}
        self.twin_classes = _twin_classes(g.nbr, allowed, allowed & ~self.reserved)

    def _canonical(self, s: int, avail: int) -> bool:
        """Within each twin class, ``s`` must use the lowest-id free vertices."""
        for c in self.twin_classes:
            part = s & c
            if not part:
                continue
            free = avail & c
            k = part.bit_count()
            low = 0
            while k:
                b = free & -free
                low |= b
                free ^= b
                k -= 1
            if part != low:
                return False
        return True

    def run(self) -> dict[int, int] | None:
        if self._rec(0, 0):
            return dict(self.assign)
        return None

    def _region_ok(self, used: int, idx: int) -> bool:
        """Every unplaced vertex can still reach all its placed neighbours."""
        h, g = self.h, self.g
        base = self.allowed & ~used
        waiting = 0
        for z in self.order[idx:]:
            if z in self.pairs:
                waiting |= 1 << self.pairs[z]
        comps = None
        for z in self.order[idx:]:
            placed = [self.assign[y] for y in h.adjacency[z] if y in self.assign]
            if z in self.pairs:
                own = 1 << self.pairs[z]
                region = g.component_masks(base & ~(waiting & ~own))
                region = next(c for c in region if c & own)
                touch = g.neighbourhood_mask(region)
                if any(not touch & s for s in placed):
                    return False
                continue
            if not placed:
                continue
            if comps is None:
                comps = [(c, g.neighbourhood_mask(c)) for c in g.component_masks(base & ~waiting)]
            if not any(all(touch & s for s in placed) for _, touch in comps):
                return False
        return True

    def _rec(self, idx: int, used: int) -> bool:
        self.budget -= 1
        if self.budget < 0:
            raise SearchBudgetExceeded("minor search node budget exhausted")
        h, nbr = self.h, self.nbr
        if idx == len(self.order):
            free = self.allowed & ~used & ~self.reserved
            if free.bit_count() < len(self.isolated):
                return False
            for x in self.isolated:
                low = free & -free
                self.assign[x] = low
                free ^= low
            return True
        x = self.order[idx]
        remaining = len(self.order) - idx - 1 + len(self.isolated)
        placed_sets = [self.assign[y] for y in h.adjacency[x] if y in self.assign]
        if x in self.pairs:
            own = 1 << self.pairs[x]
            avail = self.allowed & ~used & ~(self.reserved & ~own)
            cap = avail.bit_count() - remaining
            cands = (s for s in _grow(nbr, avail, own, 0, cap))
        else:
            avail = self.allowed & ~used & ~self.reserved
            cap = avail.bit_count() - remaining
            if cap < 1:
                return False
            if placed_sets:
                touch = self.g.neighbourhood_mask(placed_sets[0]) & avail
                if h.degree(x) == 1:
                    cands = (1 << v for v in bits(touch))
                else:
                    cands = connected_sets(nbr, avail, touch, cap)
            else:
                cands = connected_sets(nbr, avail, avail, cap)
        for s in cands:
            if self.twin_classes and not self._canonical(s, avail):
                continue
            touch = self.g.neighbourhood_mask(s)
            if any(not touch & p for p in placed_sets):
                continue
            self.assign[x] = s
            new_used = used | s
            if self._region_ok(new_used, idx + 1) and self._rec(idx + 1, new_used):
                return True
            del self.assign[x]
        return False


def _twin_classes(nbr, region: int, members: int) -> list[int]:
    """Classes of size >= 2 of ``members`` with equal open or equal closed
    neighbourhoods inside ``region``; swapping two of them is an automorphism
    of the region fixing everything else."""
    open_cls: dict[int, int] = {}
    closed_cls: dict[int, int] = {}
    for v in bits(members):
        nb = nbr[v] & region
        open_cls[nb] = open_cls.get(nb, 0) | (1 << v)
        closed = nb | (1 << v)
        closed_cls[closed] = closed_cls.get(closed, 0) | (1 << v)
    return [c for c in list(open_cls.values()) + list(closed_cls.values()) if c & (c - 1)]


def _quick_reject(h: Graph, g: Graph, allowed: int) -> bool:
    size = allowed.bit_count()
    if size < h.n:
        return True
    if g.edge_count_within(allowed) < h.m:
        return True
    return False


def _find(h: Graph, g: Graph, allowed: int, pairs: dict[int, int], budget: int) -> MinorModel | None:
    if h.n == 0:
        return MinorModel({})
    if _quick_reject(h, g, allowed):
        return None
    if not pairs and h.n == 2 and h.m == 1:
        for u in bits(allowed):
            nb = g.nbr[u] & allowed
            if nb:
                v = (nb & -nb).bit_length() - 1
                return MinorModel({0: frozenset({u}), 1: frozenset({v})})
        return None
    search = _ModelSearch(h, g, allowed, pairs, budget)
    found = search.run()
    if found is None:
        return None
    return MinorModel({x: frozenset(bits(m)) for x, m in found.items()})


def find_model(h: Graph, g: Graph, allowed: Iterable[int] | int | None = None,
               budget: int = DEFAULT_NODE_BUDGET) -> MinorModel | None:
    """An ``h``-model in ``g`` (restricted to ``allowed`` if given), or None.

    Raises :class:`SearchBudgetExceeded` when the node budget runs out.
    """
    if allowed is None:
        allowed = g.full
    elif not isinstance(allowed, int):
        allowed = mask_of(allowed)
    return _find(h, g, allowed, {}, budget)


def find_rooted_model(h: RootedGraph, g: RootedGraph, allowed: Iterable[int] | int | None = None,
                      budget: int = DEFAULT_NODE_BUDGET) -> MinorModel | None:
    """A model of ``h`` in ``g`` placing the i-th host root in the i-th pattern root's branch set."""
    if len(h.roots) != len(g.roots):
        raise ValueError("rooted minor needs equal root counts")
    if allowed is None:
        allowed = g.graph.full
    elif not isinstance(allowed, int):
        allowed = mask_of(allowed)
    if any(not allowed >> r & 1 for r in g.roots):
        return None
    pairs = dict(zip(h.roots, g.roots))
    return _find(h.graph, g.graph, allowed, pairs, budget)


# ---------------------------------------------------------------- folios

def _connected_partitions(g: Graph, region: int, roots: int, max_blocks: int) -> Iterator[list[int]]:
    """Partitions of ``region`` into connected blocks, each with <= 1 root."""
    nbr = g.nbr

    def rec(rest, blocks):
        if not rest:
            yield list(blocks)
            return
        # every component of what is left needs its own block
        if len(blocks) + len(g.component_masks(rest)) > max_blocks:
            return
        low = rest & -rest
        for s in _grow(nbr, rest, low, 0, rest.bit_count()):
            if (s & roots) & ((s & roots) - 1):
                continue
            blocks.append(s)
            yield from rec(rest & ~s, blocks)
            blocks.pop()

    yield from rec(region, [])


def _rooted_generators(g: Graph, roots: tuple[int, ...], q: int, cap: int) -> set[bytes]:
    """Canonical forms of the quotient graphs of ``(g, roots)`` with <= q blocks.

    Only unions of whole components are partitioned: a leftover vertex next
    to a block can always be merged into it, which only adds edges.
    """
    comps = g.component_masks()
    rmask = mask_of(roots)
    must = [c for c in comps if c & rmask]
    optional = [c for c in comps if not c & rmask]
    out: set[bytes] = set()
    seen_regions = set()
    for k in range(len(optional) + 1):
        for extra in combinations(optional, k):
            region = 0
            for c in must + list(extra):
                region |= c
            if region in seen_regions:
                continue
            seen_regions.add(region)
            if len(must) + k > q:
                continue
            for blocks in _connected_partitions(g, region, rmask, q):
                nb = len(blocks)
                idx = {}
                for i, b in enumerate(blocks):
                    for v in bits(b):
                        idx[v] = i
                edges = set()
                for i, b in enumerate(blocks):
                    for j in {idx[v] for v in bits(g.neighbourhood_mask(b) & region)}:
                        if j != i:
                            edges.add((min(i, j), max(i, j)))
                block_roots = tuple(idx[r] for r in roots)
                out.add(canonical_form(RootedGraph(Graph(nb, edges), block_roots), cap=cap))
    return out


def _edge_deletion_closure(gens: set[bytes], cap: int) -> frozenset:
    seen = set(gens)
    stack = list(gens)
    while stack:
        enc = stack.pop()
        rg = canonical_graph(enc)
        for u, v in rg.graph.edges():
            smaller = Graph(rg.n, [e for e in rg.graph.edges() if e != (u, v)])
            c = canonical_form(RootedGraph(smaller, rg.roots), cap=cap)
            if c not in seen:
                seen.add(c)
                stack.append(c)
        # dropping a non-root vertex: isolated ones are not produced by quotients
        root_set = set(rg.roots)
        for v in range(rg.n):
            if v in root_set:
                continue
            keep = [w for w in range(rg.n) if w != v]
            sub, mp = induced_subgraph(rg.graph, keep)
            c = canonical_form(RootedGraph(sub, tuple(mp[r] for r in rg.roots)), cap=cap)
            if c not in seen:
                seen.add(c)
                stack.append(c)
    return frozenset(seen)


@dataclass(frozen=True)
class Folio:
    """Rooted minors with at most ``q`` vertices, per ordered root subset.

    Entry keys are tuples of root *positions* (indices into the root
    sequence), so folios of different graphs over the same roots compare.
    """

    q: int
    entries: tuple  # sorted tuple of (positions, frozenset of encodings)

    def entry(self, positions: tuple[int, ...]) -> frozenset:
        for key, val in self.entries:
            if key == tuple(positions):
                return val
        raise KeyError(positions)

    def as_dict(self) -> dict:
        return {key: val for key, val in self.entries}


@dataclass(frozen=True)
class DeletionFolio:
    """Layer i maps a deleted root-position set X to the folios reachable by
    deleting X plus i - |X| non-root vertices."""

    p: int
    q: int
    layers: tuple  # per i: sorted tuple of (X positions, frozenset of Folio)


def q_folio(rg: RootedGraph, q: int, cap: int = DEFAULT_CANON_CAP, positions: tuple[int, ...] | None = None) -> Folio:
    """The q-folio of ``rg``.

    ``positions`` names each root by its position in some outer root
    sequence (defaults to ``0..len(roots)-1``).
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    g, roots = rg.graph, rg.roots
    if positions is None:
        positions = tuple(range(len(roots)))
    cap = max(cap, q)
    entries = []
    for k in range(len(roots) + 1):
        for idx in combinations(range(len(roots)), k):
            sub_roots = tuple(roots[i] for i in idx)
            gens = _rooted_generators(g, sub_roots, q, cap)
            entries.append((tuple(positions[i] for i in idx), _edge_deletion_closure(gens, cap)))
    return Folio(q, tuple(sorted(entries)))


def deletion_folio(rg: RootedGraph, p: int, q: int, cap: int = DEFAULT_CANON_CAP,
                   max_folios: int = 20_000) -> DeletionFolio:
    """The p-deletion q-folio of ``rg``."""
    if p < 0:
        raise ValueError("p must be >= 0")
    g, roots = rg.graph, rg.roots
    root_pos = {r: i for i, r in enumerate(roots)}
    others = [v for v in range(g.n) if v not in root_pos]
    cache: dict[frozenset, Folio] = {}
    budget = [max_folios]

    def folio_after(deleted: frozenset) -> Folio:
        if deleted not in cache:
            budget[0] -= 1
            if budget[0] < 0:
                raise SearchBudgetExceeded("deletion folio budget exhausted")
            sub, mp = induced_subgraph(g, [v for v in range(g.n) if v not in deleted])
            kept = [r for r in roots if r not in deleted]
            cache[deleted] = q_folio(RootedGraph(sub, tuple(mp[r] for r in kept)), q, cap,
                                     positions=tuple(root_pos[r] for r in kept))
        return cache[deleted]

    layers = []
    for i in range(p + 1):
        layer = []
        for kx in range(min(i, len(roots)) + 1):
            for xs in combinations(range(len(roots)), kx):
                ky = i - kx
                if ky > len(others):
                    continue
                found = frozenset(
                    folio_after(frozenset([roots[j] for j in xs]) | frozenset(ys))
                    for ys in combinations(others, ky)
                )
                layer.append((xs, found))
        layers.append(tuple(sorted(layer, key=lambda e: (len(e[0]), e[0]))))
    return DeletionFolio(p, q, tuple(layers))


# ---------------------------------------------------------------- reduction

@dataclass(frozen=True)
class Reduction:
    """Outcome of :func:`reduce_separation`.

    ``graph`` is the smaller graph.  Its vertices are the right side of the
    separation (old ids in ``right_ids`` order) followed by the non-root
    vertices of ``replacement``.  ``replacement`` is rooted at the cut in
    sorted order; ``replacement_ids[v]`` is the id of its vertex ``v`` in
    ``graph``.
    """

    graph: Graph
    replacement: RootedGraph
    cut: tuple[int, ...]
    right_ids: tuple[int, ...]
    replacement_ids: tuple[int, ...]
    q: int
    folio_digest: str

    def new_id(self, old: int) -> int:
        return self.right_ids.index(old)


def _hereditary_candidates(k: int, max_n: int, keep, cap: int) -> Iterator[RootedGraph]:
    """Rooted graphs with roots 0..k-1, by increasing size, up to iso.

    ``keep`` must be closed under deleting non-root vertices; every graph it
    rejects is pruned together with all its extensions.
    """
    level = set()
    for r in range(2 ** (k * (k - 1) // 2)):
        pairs = list(combinations(range(k), 2))
        edges = [pairs[i] for i in range(len(pairs)) if r >> i & 1]
        rg = RootedGraph(Graph(k, edges), tuple(range(k)))
        if keep(rg):
            level.add(canonical_form(rg, cap=cap))
    size = k
    while level and size <= max_n:
        for enc in sorted(level):
            yield canonical_graph(enc)
        if size == max_n:
            return
        nxt = set()
        for enc in sorted(level):
            rg = canonical_graph(enc)
            old = rg.graph.edges()
            for j in range(size + 1):
                for nb in combinations(range(size), j):
                    cand = RootedGraph(Graph(size + 1, old + [(v, size) for v in nb]), rg.roots)
                    c = canonical_form(cand, cap=cap)
                    if c in nxt:
                        continue
                    if keep(cand):
                        nxt.add(c)
        level = nxt
        size += 1


def reduce_separation(g: Graph, sep: Separation, t_tree: Graph, max_size: int | None = None,
                      hard_cap: int = 10, budget: int = 5_000) -> Reduction | None:
    """Replace the left side of ``sep`` by a smaller rooted graph with the
    same t-deletion q-folio (t = order of the separation, q = t(|T|+1)).

    Candidates are enumerated by increasing size among T-minor-free rooted
    graphs over the cut.  Returns None when no smaller candidate matches;
    raises :class:`SearchBudgetExceeded` when the candidate budget runs out.
    """
    if not t_tree.is_tree():
        raise ValueError("t_tree must be a tree")
    left = sorted(sep.left)
    cut = tuple(sorted(sep.cut))
    t = len(cut)
    g1, mp = induced_subgraph(g, left)
    if find_model(t_tree, g1) is not None:
        raise ValueError("left side of the separation contains the tree as a minor")
    q = t * (t_tree.n + 1)
    if q == 0 or g1.n <= q:
        return None
    roots = tuple(mp[v] for v in cut)
    cap = max(DEFAULT_CANON_CAP, q, hard_cap)
    target = deletion_folio(RootedGraph(g1, roots), t, q, cap=cap)
    limit = g1.n - 1 if max_size is None else min(max_size, g1.n - 1)
    limit = min(limit, hard_cap)

    def keep(rg):
        return find_model(t_tree, rg.graph) is None

    tried = 0
    for cand in _hereditary_candidates(t, limit, keep, cap):
        if cand.n < q:
            continue
        tried += 1
        if tried > budget:
            raise SearchBudgetExceeded("reduction candidate budget exhausted")
        if deletion_folio(cand, 0, q, cap=cap) != _layer0(target):
            continue
        if deletion_folio(cand, t, q, cap=cap) == target:
            return _splice(g, sep, cut, cand, q, target)
    if limit < g1.n - 1:
        raise SearchBudgetExceeded("replacement size cap reached before |G1| - 1")
    return None


def _layer0(df: DeletionFolio) -> DeletionFolio:
    return DeletionFolio(0, df.q, df.layers[:1])


def _digest(df: DeletionFolio) -> str:
    import hashlib

    h = hashlib.sha256()
    for i, layer in enumerate(df.layers):
        for xs, folios in layer:
            h.update(repr((i, xs)).encode())
            for f in sorted(folios, key=lambda f: repr(f.entries)):
                for key, encs in f.entries:
                    h.update(repr(key).encode())
                    for e in sorted(encs):
                        h.update(e)
    return h.hexdigest()


def _splice(g: Graph, sep: Separation, cut, cand: RootedGraph, q: int, target: DeletionFolio) -> Reduction:
    right = sorted(sep.right)
    new = {v: i for i, v in enumerate(right)}
    cut_set = set(cut)
    edges = set()
    for u, v in g.edges():
        if u in new and v in new and not (u in cut_set and v in cut_set):
            edges.add((new[u], new[v]))
    # the i-th candidate root stands for the i-th cut vertex; others get fresh ids
    cmap = {r: new[c] for r, c in zip(cand.roots, cut)}
    nxt = len(right)
    for v in range(cand.n):
        if v not in cmap:
            cmap[v] = nxt
            nxt += 1
    for u, v in cand.graph.edges():
        a, b = cmap[u], cmap[v]
        edges.add((min(a, b), max(a, b)))
    h = Graph(nxt, sorted(edges))
    rep_ids = tuple(cmap[v] for v in range(cand.n))
    return Reduction(h, cand, tuple(cut), tuple(right), rep_ids, q, _digest(target))


# ---------------------------------------------------------------- binary trees

def rooted_binary_tree_height(t: RootedGraph) -> int:
    """Largest k such that the rooted tree contains B_k as a rooted minor.

    A vertex hosts B_k when it has two children hosting B_{k-1}, or when one
    child hosts B_k (the root branch set extends downwards).
    """
    g = t.graph
    if not t.roots:
        raise ValueError("rooted tree needs a root")
    if not g.is_tree():
        raise ValueError("not a tree")
    root = t.roots[0]
    parent = {root: None}
    order = [root]
    for u in order:
        for v in g.adjacency[u]:
            if v not in parent:
                parent[v] = u
                order.append(v)
    best = {}
    for u in reversed(order):
        kids = sorted((best[v] for v in g.adjacency[u] if parent.get(v) == u), reverse=True)
        if not kids:
            best[u] = 0
        elif len(kids) == 1:
            best[u] = kids[0]
        else:
            best[u] = max(kids[0], kids[1] + 1)
    return best[root]


def has_rooted_binary_tree_minor(t: RootedGraph, k: int) -> bool:
    return k <= 0 or rooted_binary_tree_height(t) >= k
