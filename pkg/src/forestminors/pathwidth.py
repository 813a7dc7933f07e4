"""Path decompositions and exact pathwidth.

Exact pathwidth uses the vertex separation characterisation: pathwidth is
the minimum over vertex orders of the largest boundary of a prefix, where
the boundary of a prefix S is the set of vertices of S with a neighbour
outside S.  ``pathwidth_at_most`` searches prefixes depth-first under a
threshold, memoising dead prefixes and taking two moves that never hurt:

* append a vertex all of whose neighbours are already in the prefix;
* append the unique outside neighbour of some boundary vertex.

The separation tools below (``marked_separation``, ``refine_separation``)
cut a decomposition into windows between marked bags.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .canon import CapExceeded
from .graph import Graph, Separation, bits, induced_subgraph, mask_of, validate_separation

__all__ = [
    "PathDecomposition",
    "TSeparation",
    "DEFAULT_PW_CAP",
    "validate_path_decomposition",
    "exact_pathwidth",
    "pathwidth_at_most",
    "make_nice",
    "marked_separation",
    "refine_separation",
    "apex_join",
    "validate_tseparation",
    "decomposition_from_order",
]

DEFAULT_PW_CAP = 24


@dataclass(frozen=True)
class PathDecomposition:
    bags: tuple[frozenset, ...]

    def __post_init__(self):
        object.__setattr__(self, "bags", tuple(frozenset(b) for b in self.bags))

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def __len__(self):
        return len(self.bags)

    def vertices(self) -> frozenset:
        return frozenset().union(*self.bags)

    def intervals(self) -> dict[int, tuple[int, int]]:
        """Map vertex -> (first, last) bag index, 0-based."""
        out: dict[int, tuple[int, int]] = {}
        for i, bag in enumerate(self.bags):
            for v in bag:
                if v in out:
                    out[v] = (out[v][0], i)
                else:
                    out[v] = (i, i)
        return out

    def restrict(self, keep: Iterable[int]) -> "PathDecomposition":
        keep = frozenset(keep)
        return PathDecomposition(tuple(b & keep for b in self.bags))

    def relabel(self, mapping: dict[int, int]) -> "PathDecomposition":
        return PathDecomposition(tuple(frozenset(mapping[v] for v in b) for b in self.bags))


@dataclass(frozen=True)
class TSeparation:
    """A separation whose left side carries a decomposition of width <= t
    with first and last bags spanning the cut."""

    sep: Separation
    decomposition: PathDecomposition
    t: int


def validate_path_decomposition(g: Graph, pd: PathDecomposition, vertices: Iterable[int] | None = None) -> bool:
    """Check ``pd`` against ``g`` (or against ``g[vertices]`` when given)."""
    target = set(range(g.n)) if vertices is None else set(vertices)
    union: set = set()
    for bag in pd.bags:
        union |= bag
    if union != target:
        return False
    tmask = mask_of(target)
    seen_edges = set()
    for bag in pd.bags:
        bmask = mask_of(bag)
        for u in bag:
            for v in bits(g.nbr[u] & bmask):
                seen_edges.add((min(u, v), max(u, v)))
    for u in target:
        for v in bits(g.nbr[u] & tmask):
            if u < v and (u, v) not in seen_edges:
                return False
    for v, (a, b) in pd.intervals().items():
        if any(v not in pd.bags[i] for i in range(a, b + 1)):
            return False
    return True


def validate_tseparation(g: Graph, ts: TSeparation) -> bool:
    sep, pd = ts.sep, ts.decomposition
    if not validate_separation(g, sep):
        return False
    if not validate_path_decomposition(g, pd, sep.left):
        return False
    if pd.width > ts.t:
        return False
    ends = (pd.bags[0] | pd.bags[-1]) if pd.bags else frozenset()
    return ends == sep.cut


def _boundary(nbr, prefix: int) -> int:
    out = 0
    rest = prefix
    outside = ~prefix
    while rest:
        low = rest & -rest
        rest ^= low
        if nbr[low.bit_length() - 1] & outside:
            out |= low
    return out


def decomposition_from_order(g: Graph, order: Sequence[int]) -> PathDecomposition:
    """Bag i is the boundary of the first i vertices plus the i-th vertex."""
    bags = []
    prefix = 0
    for v in order:
        bags.append(frozenset(bits(_boundary(g.nbr, prefix)) + [v]))
        prefix |= 1 << v
    return PathDecomposition(tuple(bags))


def _degeneracy(nbr, mask: int) -> int:
    best = 0
    rest = mask
    while rest:
        v = min(bits(rest), key=lambda u: (nbr[u] & rest).bit_count())
        best = max(best, (nbr[v] & rest).bit_count())
        rest &= ~(1 << v)
    return best


def _order_within(nbr, comp: int, t: int, budget: list[int]) -> list[int] | None:
    """Vertex order of the component ``comp`` with all prefix boundaries <= t."""
    dead: set[int] = set()

    def bnd(prefix):
        out = 0
        rest = prefix
        outside = comp & ~prefix
        while rest:
            low = rest & -rest
            rest ^= low
            if nbr[low.bit_length() - 1] & outside:
                out |= low
        return out

    def forced(prefix, order):
        # apply safe moves until none applies
        while True:
            rest = comp & ~prefix
            pick = 0
            while rest:
                low = rest & -rest
                rest ^= low
                if not nbr[low.bit_length() - 1] & comp & ~prefix:
                    pick = low
                    break
            if not pick:
                rb = bnd(prefix)
                while rb:
                    low = rb & -rb
                    rb ^= low
                    out = nbr[low.bit_length() - 1] & comp & ~prefix
                    if out & (out - 1) == 0:
                        pick = out
                        break
            if not pick:
                return prefix
            prefix |= pick
            order.append(pick.bit_length() - 1)

    def rec(prefix, order):
        budget[0] -= 1
        if budget[0] < 0:
            raise CapExceeded("pathwidth search budget exhausted")
        mark = len(order)
        prefix = forced(prefix, order)
        if prefix == comp:
            return True
        if prefix in dead:
            del order[mark:]
            return False
        cand = comp & ~prefix
        options = []
        while cand:
            low = cand & -cand
            cand ^= low
            size = bnd(prefix | low).bit_count()
            if size <= t:
                options.append((size, low.bit_length() - 1, low))
        options.sort()
        for _, v, low in options:
            order.append(v)
            if rec(prefix | low, order):
                return True
            order.pop()
        dead.add(prefix)
        del order[mark:]
        return False

    order: list[int] = []
    if rec(0, order):
        return order
    return None


def pathwidth_at_most(g: Graph, t: int, cap: int = DEFAULT_PW_CAP,
                      budget: int = 5_000_000) -> tuple[bool, PathDecomposition | None]:
    """Decide ``pw(g) <= t``; on success also return a witness of width <= t."""
    if g.n > cap:
        raise CapExceeded(f"instance too large for exact pathwidth: n={g.n} > cap={cap}")
    if g.n == 0:
        return (t >= -1), PathDecomposition(())
    if t < 0:
        return False, None
    box = [budget]
    order: list[int] = []
    for comp in g.component_masks():
        if _degeneracy(g.nbr, comp) > t:
            return False, None
        part = _order_within(g.nbr, comp, t, box)
        if part is None:
            return False, None
        order.extend(part)
    pd = decomposition_from_order(g, order)
    return True, pd


def exact_pathwidth(g: Graph, cap: int = DEFAULT_PW_CAP) -> tuple[int, PathDecomposition]:
    """Exact pathwidth of ``g`` with an optimal decomposition."""
    if g.n > cap:
        raise CapExceeded(f"instance too large for exact pathwidth: n={g.n} > cap={cap}")
    if g.n == 0:
        return -1, PathDecomposition(())
    order: list[int] = []
    width = 0
    for comp in g.component_masks():
        t = max(width, _degeneracy(g.nbr, comp))
        while True:
            part = _order_within(g.nbr, comp, t, [5_000_000])
            if part is not None:
                break
            t += 1
        width = max(width, t)
        order.extend(part)
    pd = decomposition_from_order(g, order)
    return pd.width, pd


def make_nice(pd: PathDecomposition) -> PathDecomposition:
    """Insert intermediate bags so consecutive bags differ in one vertex.

    Between two bags, departing vertices leave one at a time before arriving
    vertices enter one at a time; repeated bags are dropped.
    """
    if not pd.bags:
        return pd
    out = [pd.bags[0]]
    for nxt in pd.bags[1:]:
        cur = out[-1]
        if nxt == cur:
            continue
        for v in sorted(cur - nxt):
            cur = cur - {v}
            out.append(cur)
        for v in sorted(nxt - cur):
            cur = cur | {v}
            out.append(cur)
    # a repeated last bag would have been skipped; first/last are preserved
    return PathDecomposition(tuple(out))


def marked_separation(g: Graph, pd: PathDecomposition, marked: Iterable[int]) -> TSeparation:
    """Window between consecutive marked bags with the largest interior.

    The interior of the window ``[a, b]`` is the set of vertices appearing
    only strictly between bags ``a`` and ``b``; it contains no marked vertex,
    and the returned t-separation has
    ``|G1| >= (|G| - k(t+1)) / (k+1)`` for ``k`` marked vertices.
    """
    if not validate_path_decomposition(g, pd):
        raise ValueError("invalid path decomposition")
    t = max(pd.width, 0)
    marked = sorted(set(marked))
    p = len(pd.bags)
    if g.n == 0 or p == 0:
        return TSeparation(Separation(frozenset(), frozenset()), PathDecomposition(()), t)
    if not marked:
        ends = pd.bags[0] | pd.bags[-1]
        return TSeparation(Separation(frozenset(range(g.n)), ends), pd, t)
    iv = pd.intervals()
    marked_bags = sorted({iv[v][0] for v in marked})
    stops = [0] + marked_bags + [p - 1]
    best = None
    for a, b in zip(stops, stops[1:]):
        interior = frozenset(v for v, (lo, hi) in iv.items() if a < lo and hi < b)
        key = (-len(interior), a, b)
        if best is None or key < best[0]:
            best = (key, a, b, interior)
    _, a, b, interior = best
    left = interior | pd.bags[a] | pd.bags[b]
    right = frozenset(range(g.n)) - interior
    sub = PathDecomposition(pd.bags[a:b + 1]) if a < b else PathDecomposition((pd.bags[a],))
    return TSeparation(Separation(left, right), sub, t)


def refine_separation(g: Graph, tsep: TSeparation, marked: Iterable[int], ell: int) -> TSeparation:
    """Shrink the left side of a t-separation to exactly ``ell`` vertices.

    Requires ``1 <= ell <= ceil(|G1| / (k+1))``.  Small targets take any ell
    vertices of G1 as a single bag with G2 = G; larger ones walk a nice
    decomposition from a marked bag until the union of bags has ell vertices.
    """
    marked = set(marked)
    k = len(marked)
    left = sorted(tsep.sep.left)
    n1 = len(left)
    t = tsep.t
    upper = -(-n1 // (k + 1))
    if not 1 <= ell <= upper:
        raise ValueError(f"ell={ell} outside [1, {upper}]")
    if ell <= t + 1:
        y = frozenset(left[:ell])
        return TSeparation(Separation(y, frozenset(range(g.n))), PathDecomposition((y,)), t)
    nice = make_nice(tsep.decomposition)
    bags = nice.bags
    p = len(bags)
    iv = nice.intervals()
    stops = {0, p - 1}
    for v in marked:
        if v in iv:
            stops.add(iv[v][0])
    stops = sorted(stops)
    for a, c in zip(stops, stops[1:]):
        union = set(bags[a])
        for b in range(a + 1, c + 1):
            union |= bags[b]
            if len(union) == ell:
                y = frozenset(union)
                interior = y - bags[a] - bags[b]
                right = frozenset(range(g.n)) - interior
                return TSeparation(Separation(y, right), PathDecomposition(bags[a:b + 1]), t)
            if len(union) > ell:
                break
    raise AssertionError("no window of the requested size; decomposition is not nice")


def apex_join(g1: Graph, v1: int, g2: Graph, v2: int, g3: Graph, v3: int) -> Graph:
    """Disjoint union of three connected graphs plus a new vertex on v1, v2, v3.

    The apex is the last vertex; g1, g2, g3 keep their ids shifted by offsets.
    """
    parts = [(g1, v1), (g2, v2), (g3, v3)]
    edges = []
    offset = 0
    anchors = []
    for h, v in parts:
        if not h.is_connected() or h.n == 0:
            raise ValueError("apex_join needs three non-empty connected graphs")
        if not 0 <= v < h.n:
            raise ValueError(f"vertex {v} out of range")
        edges.extend((a + offset, b + offset) for a, b in h.edges())
        anchors.append(v + offset)
        offset += h.n
    edges.extend((a, offset) for a in anchors)
    return Graph(offset + 1, edges)


def induced_pathwidth(g: Graph, vertices: Iterable[int], cap: int = DEFAULT_PW_CAP) -> int:
    sub, _ = induced_subgraph(g, vertices)
    return exact_pathwidth(sub, cap)[0]
