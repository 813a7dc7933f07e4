"""Packings, transversals and the duality driver for families with a forest.

Exact packing and covering numbers come from :class:`MinorOracle`, which
tabulates for every vertex subset whether it contains a member as a minor.
Everything else builds certificates constructively and checks them with
:func:`find_model` before returning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Callable, Sequence

import mpmath

from .canon import CapExceeded
from .generators import spanning_tree_completion
from .graph import (
    Graph,
    RootedGraph,
    Separation,
    bits,
    induced_subgraph,
    mask_of,
    shortest_path,
    bfs_distances,
)
from .minors import (
    MinorModel,
    SearchBudgetExceeded,
    find_model,
    find_rooted_model,
    q_folio,
    reduce_separation,
    validate_model,
)
from .pathwidth import (
    DEFAULT_PW_CAP,
    PathDecomposition,
    TSeparation,
    exact_pathwidth,
    make_nice,
    marked_separation,
    pathwidth_at_most,
    refine_separation,
    validate_tseparation,
)

__all__ = [
    "Family",
    "Packing",
    "Transversal",
    "DualityCertificate",
    "MainPwConstants",
    "MinorOracle",
    "ConstantOverflowError",
    "LemmaGuaranteeFailed",
    "DEFAULT_ORACLE_CAP",
    "nu_exact",
    "tau_exact",
    "select_disjoint_subpaths",
    "packing_or_transversal_bounded_pw",
    "klogk_transversal",
    "klogk_bound",
    "forest_transversal",
    "main_pw_constants",
    "find_small_pw_subgraph",
    "minimal_pw_subgraph",
    "reduce_and_solve",
    "ep_duality",
    "fpt_pw_deletion",
    "verify_packing",
    "verify_transversal",
    "verify_certificate",
]

DEFAULT_ORACLE_CAP = 12


class ConstantOverflowError(OverflowError):
    """A constant has more digits than the configured limit."""


class LemmaGuaranteeFailed(RuntimeError):
    """A size guarantee did not hold; only possible with injected constants."""


# ---------------------------------------------------------------- families

@dataclass(frozen=True, eq=False)
class Family:
    """A finite set of excluded minors."""

    members: tuple

    def __post_init__(self):
        members = tuple(self.members)
        object.__setattr__(self, "members", members)
        if not members:
            raise ValueError("family must be non-empty")
        if any(h.n == 0 for h in members):
            raise ValueError("family members must be non-empty")

    @property
    def q(self) -> int:
        return len(self.members)

    @property
    def r(self) -> int:
        return max(len(h.component_masks()) for h in self.members)

    @property
    def forest_index(self) -> int | None:
        for i, h in enumerate(self.members):
            if h.is_forest():
                return i
        return None

    @property
    def t(self) -> int | None:
        i = self.forest_index
        return None if i is None else self.members[i].n

    def components(self, i: int) -> list[tuple[Graph, dict[int, int]]]:
        """Components of member ``i`` with maps component id -> member id."""
        h = self.members[i]
        out = []
        for c in h.component_masks():
            sub, mp = induced_subgraph(h, bits(c))
            out.append((sub, {new: old for old, new in mp.items()}))
        return out

    def first_model(self, g: Graph, allowed: int | None = None) -> tuple[int, MinorModel] | None:
        for i, h in enumerate(self.members):
            m = find_model(h, g, allowed)
            if m is not None:
                return i, m
        return None


@dataclass(frozen=True)
class Packing:
    """Vertex-disjoint models, each tagged with the member it realises."""

    models: tuple = ()

    def __len__(self):
        return len(self.models)

    def vertex_set(self) -> frozenset:
        out = frozenset()
        for _, m in self.models:
            out |= m.vertex_set()
        return out


@dataclass(frozen=True)
class Transversal:
    vertices: frozenset = frozenset()

    def __len__(self):
        return len(self.vertices)


@dataclass(frozen=True)
class DualityCertificate:
    packing: Packing
    transversal: Transversal
    ratio: float
    constant_used: int
    mode: str = "practical"
    warnings: tuple = ()


def verify_packing(fam: Family, g: Graph, packing: Packing) -> bool:
    seen: set = set()
    for entry in packing.models:
        try:
            i, model = entry
        except (TypeError, ValueError):
            return False
        if not isinstance(i, int) or not 0 <= i < fam.q:
            return False
        if not validate_model(fam.members[i], g, model):
            return False
        vs = model.vertex_set()
        if vs & seen:
            return False
        seen |= vs
    return True


def verify_transversal(fam: Family, g: Graph, transversal: Transversal) -> bool:
    xs = transversal.vertices
    if any(not isinstance(v, int) or not 0 <= v < g.n for v in xs):
        return False
    rest = g.full & ~mask_of(xs)
    return fam.first_model(g, rest) is None


def verify_certificate(fam: Family, g: Graph, cert: DualityCertificate) -> bool:
    """Re-check both halves of a certificate from scratch."""
    if not verify_packing(fam, g, cert.packing):
        return False
    if not verify_transversal(fam, g, cert.transversal):
        return False
    return len(cert.packing) <= len(cert.transversal)


# ---------------------------------------------------------------- exact oracles

class MinorOracle:
    """For every vertex subset of ``g``, does it contain a member as a minor?

    The table is filled in increasing mask order.  A subset inherits a yes
    from any subset one vertex smaller; the sets that need a fresh search and
    answer yes are exactly the minimal member-containing sets, which drive
    the packing recursion.
    """

    def __init__(self, fam: Family, g: Graph, cap: int = DEFAULT_ORACLE_CAP):
        if g.n > cap:
            raise CapExceeded(f"exact oracle capped at {cap} vertices, got {g.n}")
        self.fam = fam
        self.g = g
        n = g.n
        smallest = min(h.n for h in fam.members)
        has = bytearray(1 << n)
        minimal: list[list[int]] = [[] for _ in range(n)]
        for mask in range(1, 1 << n):
            rest = mask
            hit = False
            while rest:
                low = rest & -rest
                rest ^= low
                if has[mask ^ low]:
                    hit = True
                    break
            if not hit and mask.bit_count() >= smallest:
                if fam.first_model(g, mask) is not None:
                    hit = True
                    minimal[(mask & -mask).bit_length() - 1].append(mask)
            has[mask] = hit
        if smallest == 0:  # pragma: no cover - members are non-empty
            has[0] = 1
        self.has = has
        self.minimal = minimal
        self._nu: dict[int, int] = {0: 0}

    def contains(self, mask: int) -> bool:
        return bool(self.has[mask])

    def nu_mask(self, mask: int) -> int:
        memo = self._nu
        if mask in memo:
            return memo[mask]
        if not self.has[mask]:
            memo[mask] = 0
            return 0
        low = mask & -mask
        best = self.nu_mask(mask ^ low)
        for s in self.minimal[low.bit_length() - 1]:
            if s & mask == s:
                val = 1 + self.nu_mask(mask & ~s)
                if val > best:
                    best = val
        memo[mask] = best
        return best

    def packing_sets(self, mask: int) -> list[int]:
        """Disjoint minimal sets achieving ``nu_mask(mask)``."""
        out = []
        while self.has[mask]:
            target = self.nu_mask(mask)
            low = mask & -mask
            if self.nu_mask(mask ^ low) == target:
                mask ^= low
                continue
            for s in self.minimal[low.bit_length() - 1]:
                if s & mask == s and 1 + self.nu_mask(mask & ~s) == target:
                    out.append(s)
                    mask &= ~s
                    break
        return out

    def packing(self, mask: int | None = None) -> Packing:
        if mask is None:
            mask = self.g.full
        models = []
        for s in self.packing_sets(mask):
            found = self.fam.first_model(self.g, s)
            assert found is not None
            models.append(found)
        return Packing(tuple(models))

    def tau_mask(self, mask: int) -> tuple[int, frozenset]:
        verts = bits(mask)
        for k in range(len(verts) + 1):
            for xs in combinations(verts, k):
                if not self.has[mask & ~mask_of(xs)]:
                    return k, frozenset(xs)
        raise AssertionError("deleting everything leaves no member")


def nu_exact(fam: Family, g: Graph, cap: int = DEFAULT_ORACLE_CAP) -> tuple[int, Packing]:
    oracle = MinorOracle(fam, g, cap)
    packing = oracle.packing()
    return len(packing), packing


def tau_exact(fam: Family, g: Graph, cap: int = DEFAULT_ORACLE_CAP) -> tuple[int, Transversal]:
    oracle = MinorOracle(fam, g, cap)
    k, xs = oracle.tau_mask(g.full)
    return k, Transversal(xs)


# ---------------------------------------------------------------- interval selection

class SelectionHypothesisError(ValueError):
    """Some family has fewer than sum(x) pairwise disjoint intervals."""


def _max_disjoint(intervals) -> int:
    count, end = 0, -math.inf
    for a, b in sorted(intervals, key=lambda iv: (iv[1], iv[0])):
        if a > end:
            count += 1
            end = b
    return count


def select_disjoint_subpaths(p_len: int, families: Sequence[Sequence[tuple[int, int]]],
                             x: Sequence[int]) -> list[list[tuple[int, int]]]:
    """Pick ``x[i]`` intervals from family ``i``, all pairwise disjoint.

    Intervals are inclusive index pairs on a path with ``p_len`` vertices.
    Repeatedly takes the interval ending first, among families that still
    need one, that starts after everything chosen so far.
    """
    if len(families) != len(x):
        raise ValueError("one demand per family")
    if any(v < 0 for v in x):
        raise ValueError("demands must be non-negative")
    for fam in families:
        for a, b in fam:
            if not 0 <= a <= b < p_len:
                raise ValueError(f"interval ({a}, {b}) outside the path")
    k = sum(x)
    for i, fam in enumerate(families):
        if x[i] or k:
            if _max_disjoint(fam) < k:
                raise SelectionHypothesisError(f"family {i} has fewer than {k} disjoint intervals")
    demand = list(x)
    chosen: list[list[tuple[int, int]]] = [[] for _ in families]
    end = -1
    while any(demand):
        best = None
        for i, fam in enumerate(families):
            if not demand[i]:
                continue
            for a, b in fam:
                if a > end and (best is None or (b, i, a) < best):
                    best = (b, i, a)
        if best is None:  # pragma: no cover - excluded by the hypothesis
            raise SelectionHypothesisError("ran out of intervals")
        b, i, a = best
        chosen[i].append((a, b))
        demand[i] -= 1
        end = b
    return chosen


# ---------------------------------------------------------------- bounded pathwidth

def _window_mask(iv, a: int, b: int) -> int:
    m = 0
    for v, (lo, hi) in iv.items():
        if a <= lo and hi <= b:
            m |= 1 << v
    return m


def _greedy_windows(h: Graph, g: Graph, iv, p: int) -> list[tuple[int, int]]:
    """Maximum family of disjoint windows whose eligible set holds ``h``."""
    out = []
    start = 0
    while start < p:
        for b in range(start, p):
            if find_model(h, g, _window_mask(iv, start, b)) is not None:
                out.append((start, b))
                start = b + 1
                break
        else:
            break
    return out


def packing_or_transversal_bounded_pw(fam: Family, g: Graph, pd: PathDecomposition, s: int,
                                      t: int | None = None) -> Packing | Transversal:
    """Either ``s`` disjoint models or a transversal of at most s*q*r*t vertices.

    A window ``[a, b]`` of bags is eligible for a connected pattern when the
    vertices living only in bags ``a..b`` contain it; disjoint windows give
    disjoint models.  ``t`` defaults to the largest bag size.
    """
    from .pathwidth import validate_path_decomposition

    if not validate_path_decomposition(g, pd):
        raise ValueError("invalid path decomposition")
    if s < 1:
        raise ValueError("s must be >= 1")
    if t is None:
        t = pd.width + 1
    if pd.width > t - 1:
        raise ValueError(f"decomposition width {pd.width} exceeds t-1 = {t - 1}")
    iv = pd.intervals()
    p = len(pd.bags)
    windows = {}
    for i in range(fam.q):
        comps = fam.components(i)
        ws = [_greedy_windows(c, g, iv, p) for c, _ in comps]
        windows[i] = ws
        c_i = len(comps)
        if all(len(w) >= s * c_i for w in ws):
            chosen = select_disjoint_subpaths(p, ws, [s] * c_i)
            models = []
            for rep in range(s):
                branch = {}
                for j, (comp, back) in enumerate(comps):
                    a, b = chosen[j][rep]
                    m = find_model(comp, g, _window_mask(iv, a, b))
                    for x, vs in m.branch_sets.items():
                        branch[back[x]] = vs
                models.append((i, MinorModel(branch)))
            return Packing(tuple(models))
    xs: set[int] = set()
    for i in range(fam.q):
        if find_model(fam.members[i], g) is None:
            continue
        ws = windows[i]
        j = min(range(len(ws)), key=lambda j: (len(ws[j]), j))
        for _, b in ws[j]:
            xs |= pd.bags[b]
    return Transversal(frozenset(xs))


def _bounded_pw_duality(fam: Family, g: Graph, pd: PathDecomposition, t: int) -> tuple[Packing, Transversal]:
    """Raise s from 1 until the transversal branch fires."""
    best = Packing()
    s = 1
    while True:
        res = packing_or_transversal_bounded_pw(fam, g, pd, s, t)
        if isinstance(res, Transversal):
            if not best.models:
                found = fam.first_model(g)
                if found is not None:
                    best = Packing((found,))
            return best, res
        best = res
        s += 1


# ---------------------------------------------------------------- k log k transversal

def klogk_bound(t: int, k: int) -> float:
    """3(t+1) k log2((t+1)k) - t, or 0 when k = 0."""
    if k == 0:
        return 0.0
    return 3 * (t + 1) * k * math.log2((t + 1) * k) - t


def klogk_transversal(tree: Graph, g: Graph, cap: int = DEFAULT_ORACLE_CAP,
                      oracle: MinorOracle | None = None) -> Transversal:
    """A tree transversal by balanced splitting of a nice decomposition.

    The split bag has at most ceil(k/2) disjoint models to its left and
    floor(k/2) to its right; both sides recurse.
    """
    if not tree.is_tree():
        raise ValueError("pattern must be a tree")
    fam = Family((tree,))
    if oracle is None:
        oracle = MinorOracle(fam, g, cap)
    xs = _klogk(g, oracle, g.full, max(cap, DEFAULT_PW_CAP))
    return Transversal(frozenset(bits(xs)))


def _klogk(g: Graph, oracle: MinorOracle, mask: int, pw_cap: int) -> int:
    k = oracle.nu_mask(mask)
    if k == 0:
        return 0
    keep = bits(mask)
    sub, _ = induced_subgraph(g, keep)
    _, pd = exact_pathwidth(sub, pw_cap)
    bags = [mask_of(keep[v] for v in bag) for bag in make_nice(pd).bags]
    p = len(bags)
    before = [0] * p
    for i in range(1, p):
        before[i] = before[i - 1] | bags[i - 1]
    after = [0] * p
    for i in range(p - 2, -1, -1):
        after[i] = after[i + 1] | bags[i + 1]
    for j in range(p):
        left = before[j] & ~bags[j]
        right = after[j] & ~bags[j]
        lj, rj = oracle.nu_mask(left), oracle.nu_mask(right)
        if lj <= -(-k // 2) and rj <= k // 2:
            break
    else:  # pragma: no cover - a split always exists
        raise AssertionError("no balanced split bag")
    if k == 1:
        return bags[j] if lj == 0 else bags[j - 1] | bags[j]
    return bags[j] | _klogk(g, oracle, left, pw_cap) | _klogk(g, oracle, right, pw_cap)


def forest_transversal(fam: Family, g: Graph, cap: int = DEFAULT_ORACLE_CAP) -> Transversal:
    """Tree transversal for a spanning tree of the forest, then a bounded-pathwidth pass."""
    fi = fam.forest_index
    if fi is None:
        raise ValueError("family has no forest")
    t = fam.members[fi].n
    tree = spanning_tree_completion(fam.members[fi])
    xs = klogk_transversal(tree, g, cap).vertices
    rest = [v for v in range(g.n) if v not in xs]
    sub, mp = induced_subgraph(g, rest)
    back = {new: old for old, new in mp.items()}
    _, pd = exact_pathwidth(sub, max(cap, DEFAULT_PW_CAP))
    nu_rest, _ = nu_exact(fam, sub, cap)
    res = packing_or_transversal_bounded_pw(fam, sub, pd, nu_rest + 1, max(t, pd.width + 1))
    assert isinstance(res, Transversal)
    out = Transversal(frozenset(xs) | frozenset(back[v] for v in res.vertices))
    if not verify_transversal(fam, g, out):  # pragma: no cover - guaranteed
        raise AssertionError("forest transversal failed verification")
    return out


# ---------------------------------------------------------------- small subgraphs of large pathwidth

@dataclass(frozen=True)
class MainPwConstants:
    t: int
    r: int
    r1: int = 0
    r2: int = 0
    r3: int = 0
    delta: int = 0
    eps: Fraction = Fraction(0)
    d: float = 0.0
    f: int = 1
    inner: tuple = ()  # f(t-1, r1), f(t-1, r2), f(t-1, r3)


DEFAULT_DIGIT_LIMIT = 2000


@lru_cache(maxsize=None)
def _constants(t: int, r: int, digit_limit: int) -> MainPwConstants:
    if t == 0:
        return MainPwConstants(0, r)
    base = (r + t) * 2 * t + r
    r1 = (r + t - 1) + base
    f1 = _constants(t - 1, r1, digit_limit).f
    r2 = (r + t - 1) * (1 + f1) + base
    f2 = _constants(t - 1, r2, digit_limit).f
    r3 = (r + t - 1) * (1 + f1 + f2) + base
    f3 = _constants(t - 1, r3, digit_limit).f
    delta = (r + t) * (f1 + f2 + f3 + 2 * t + 1) + r - 1
    eps = Fraction(1, 2 * r + t)
    with mpmath.workdps(30):
        ln_eps = mpmath.log1p(mpmath.mpf(eps.numerator) / eps.denominator)
        d = max(2 * t * mpmath.log(delta + 1) / ln_eps, (2 * t / ln_eps) ** 2)
        digits = int((d + 1) * mpmath.log10(max(delta, 1))) + 1
    if digits > digit_limit:
        raise ConstantOverflowError(f"f({t}, {r}) has about {digits} digits (limit {digit_limit})")
    with mpmath.workdps(digits + 30):
        ln_eps = mpmath.log1p(mpmath.mpf(eps.numerator) / eps.denominator)
        d_hi = max(2 * t * mpmath.log(delta + 1) / ln_eps, (2 * t / ln_eps) ** 2)
        value = max(mpmath.power(delta, d_hi + 1), delta + d_hi + 1)
        f = int(mpmath.ceil(value))
    return MainPwConstants(t, r, r1, r2, r3, delta, eps, float(d), f, (f1, f2, f3))


def main_pw_constants(t: int, r: int, digit_limit: int = DEFAULT_DIGIT_LIMIT) -> MainPwConstants:
    """Constants of the small-subgraph search; ``f`` is exact (arbitrary precision).

    Raises :class:`ConstantOverflowError` when ``f`` or one of the values it
    depends on would exceed ``digit_limit`` decimal digits.
    """
    if t < 0 or r < 0:
        raise ValueError("t and r must be non-negative")
    return _constants(t, r, digit_limit)


ConstantsFn = Callable[[int, int], MainPwConstants]


def _connected_pw_at_least(g: Graph, mask: int, t: int, cap: int) -> bool:
    sub, _ = induced_subgraph(g, bits(mask))
    return not pathwidth_at_most(sub, t - 1, cap)[0]


def _sub_decomposition(g: Graph, mask: int, cap: int) -> tuple[Graph, list[int], PathDecomposition]:
    keep = bits(mask)
    sub, _ = induced_subgraph(g, keep)
    _, pd = exact_pathwidth(sub, cap)
    return sub, keep, pd


def _lift_tsep(g: Graph, keep: list[int], ts: TSeparation, outside_left: int = 0) -> TSeparation:
    """Turn a t-separation of G[keep] into one of G.

    The interior of the left side has no neighbour outside ``keep``; every
    vertex not in ``keep`` joins the right side.
    """
    left = frozenset(keep[v] for v in ts.sep.left)
    interior = frozenset(keep[v] for v in ts.sep.left - ts.sep.right)
    right = frozenset(range(g.n)) - interior
    pd = PathDecomposition(tuple(frozenset(keep[v] for v in b) for b in ts.decomposition.bags))
    return TSeparation(Separation(left, right), pd, ts.t)


def find_small_pw_subgraph(g: Graph, w: int, t: int, r: int, constants: ConstantsFn | None = None,
                           cap: int = DEFAULT_PW_CAP) -> frozenset | TSeparation:
    """A small connected set around ``w`` of pathwidth >= t, or a (t-1)-separation
    whose left side has at least ``r`` vertices.

    ``constants`` maps (t, r) to :class:`MainPwConstants`; the default uses
    :func:`main_pw_constants`, and an overflowing ``f`` is treated as larger
    than the graph.  With injected constants the size guarantees may fail;
    that raises :class:`LemmaGuaranteeFailed`.
    """
    if not g.is_connected():
        raise ValueError("graph must be connected")
    if not 0 <= w < g.n:
        raise ValueError(f"vertex {w} out of range")
    if t > 0 and pathwidth_at_most(g, t - 1, cap)[0]:
        raise ValueError(f"graph has pathwidth below {t}")
    out = _small_pw(g, w, t, r, constants or main_pw_constants, cap)
    if isinstance(out, TSeparation):
        if not (validate_tseparation(g, out) and out.t <= t - 1 and len(out.sep.left) >= r):
            raise LemmaGuaranteeFailed("separation outcome failed verification")
    else:
        m = mask_of(out)
        if not (out and w in out and g.is_connected_mask(m) and _connected_pw_at_least(g, m, t, cap)):
            raise LemmaGuaranteeFailed("subgraph outcome failed verification")
    return out


def _small_pw(g: Graph, w: int, t: int, r: int, constants: ConstantsFn, cap: int):
    if t == 0:
        return frozenset({w})
    if r <= 1:
        v = 0
        return TSeparation(Separation({v}, range(g.n)), PathDecomposition((frozenset({v}),)), t - 1)
    try:
        c = constants(t, r)
    except ConstantOverflowError:
        return frozenset(range(g.n))
    if g.n <= c.f:
        return frozenset(range(g.n))
    radius = int(math.floor(c.d))
    dist = bfs_distances(g, w)
    heavy = sorted((dist[v], v) for v in range(g.n) if dist[v] <= radius and g.degree(v) > c.delta)
    if not heavy:
        return _case_ball(g, w, t, r, c, dist, radius, cap)
    return _case_hub(g, w, t, r, c, heavy[0][1], constants, cap)


def _case_ball(g, w, t, r, c, dist, radius, cap):
    balls = [mask_of(v for v in range(g.n) if dist[v] <= i) for i in range(radius + 1)]
    if _connected_pw_at_least(g, balls[radius], t, cap):
        return frozenset(bits(balls[radius]))
    eps = c.eps
    for j in range(1, radius + 1):
        if balls[j].bit_count() <= (1 + eps) * balls[j - 1].bit_count():
            break
    else:
        raise LemmaGuaranteeFailed("balls grew by more than 1+eps at every step")
    sub, keep, pd = _sub_decomposition(g, balls[j], cap)
    pos = {v: i for i, v in enumerate(keep)}
    marked = [pos[v] for v in bits(balls[j] & ~balls[j - 1])]
    ts = marked_separation(sub, pd, marked)
    ts = TSeparation(ts.sep, ts.decomposition, t - 1)
    return _lift_tsep(g, keep, ts)


def _hub_threshold(r: int, t: int, size: int) -> int:
    return (r + t - 1) * size + (r + t) * 2 * t + r


def _link_up(g: Graph, w: int, h_mask: int) -> frozenset:
    path = shortest_path(g, w, h_mask)
    return frozenset(bits(h_mask)) | frozenset(path)


def _with_separated_remainder(g, w, t, r, x_mask, h_sep: TSeparation, h_keep, cap):
    """Given connected X and a (t-1)-separation of G - X (ids ``h_keep``), finish."""
    need = _hub_threshold(r, t, x_mask.bit_count())
    if len(h_sep.sep.left) < need:
        raise LemmaGuaranteeFailed("remainder separation smaller than required")
    rest_graph, _ = induced_subgraph(g, h_keep)
    h_sep = refine_separation(rest_graph, h_sep, (), need)
    h1 = mask_of(h_keep[v] for v in h_sep.sep.left)
    h_cut = mask_of(h_keep[v] for v in h_sep.sep.left & h_sep.sep.right)
    j_mask = h1 | x_mask
    if _connected_pw_at_least(g, j_mask, t, cap):
        x_low = x_mask & -x_mask
        comp = next(cm for cm in g.component_masks(j_mask) if cm & x_low)
        return _link_up(g, w, comp)
    sub, keep, pd = _sub_decomposition(g, j_mask, cap)
    pos = {v: i for i, v in enumerate(keep)}
    marked = [pos[v] for v in bits(x_mask | h_cut)]
    ts = marked_separation(sub, pd, marked)
    ts = TSeparation(ts.sep, ts.decomposition, t - 1)
    return _lift_tsep(g, keep, ts)


def _separation_of_remainder(g, x_mask, part_mask, part_sep: TSeparation, part_keep) -> tuple[TSeparation, list[int]]:
    """Extend a separation of G[part] to G - X by adding the other components to the right."""
    rest_keep = bits(g.full & ~x_mask)
    pos = {v: i for i, v in enumerate(rest_keep)}
    left = frozenset(pos[part_keep[v]] for v in part_sep.sep.left)
    interior = frozenset(pos[part_keep[v]] for v in part_sep.sep.left - part_sep.sep.right)
    right = frozenset(range(len(rest_keep))) - interior
    pd = PathDecomposition(tuple(frozenset(pos[part_keep[v]] for v in b) for b in part_sep.decomposition.bags))
    return TSeparation(Separation(left, right), pd, part_sep.t), rest_keep


def _case_hub(g, w, t, r, c, x, constants, cap):
    x_nbrs = g.nbr[x]
    x_mask = 1 << x
    inner_r = (c.r1, c.r2, c.r3)
    for j in range(3):
        rest = g.full & ~x_mask
        touching = [cm for cm in g.component_masks(rest) if cm & x_nbrs]
        big = [cm for cm in touching if _connected_pw_at_least(g, cm, t, cap)]
        if not big:
            h_mask = 0
            for cm in touching:
                h_mask |= cm
            sub, keep, pd = _sub_decomposition(g, h_mask, cap)
            ts = marked_separation(sub, pd, ())
            ts = TSeparation(ts.sep, ts.decomposition, t - 1)
            sep, rest_keep = _separation_of_remainder(g, x_mask, h_mask, ts, keep)
            return _with_separated_remainder(g, w, t, r, x_mask, sep, rest_keep, cap)
        comp = big[0]
        anchor = (comp & x_nbrs & -(comp & x_nbrs)).bit_length() - 1
        keep = bits(comp)
        sub, _ = induced_subgraph(g, keep)
        pos = {v: i for i, v in enumerate(keep)}
        inner = _small_pw(sub, pos[anchor], t - 1, inner_r[j], constants, cap)
        if isinstance(inner, TSeparation):
            sep, rest_keep = _separation_of_remainder(g, x_mask, comp, inner, keep)
            sep = TSeparation(sep.sep, sep.decomposition, t - 1)
            return _with_separated_remainder(g, w, t, r, x_mask, sep, rest_keep, cap)
        x_mask |= mask_of(keep[v] for v in inner)
    return _link_up(g, w, x_mask)


def minimal_pw_subgraph(g: Graph, t: int, cap: int = DEFAULT_PW_CAP, within: int | None = None) -> frozenset:
    """A connected vertex set of pathwidth >= t from which no single vertex can be dropped.

    Vertices are tried in increasing order; after a removal, the first
    component that still has pathwidth >= t is kept.
    """
    if within is None:
        within = g.full
    current = None
    for cm in g.component_masks(within):
        if _connected_pw_at_least(g, cm, t, cap):
            current = cm
            break
    if current is None:
        raise ValueError(f"pathwidth is below {t}")
    changed = True
    while changed:
        changed = False
        for v in bits(current):
            rest = current & ~(1 << v)
            for cm in g.component_masks(rest):
                if _connected_pw_at_least(g, cm, t, cap):
                    current = cm
                    changed = True
                    break
            if changed:
                break
    return frozenset(bits(current))


# ---------------------------------------------------------------- duality driver

@dataclass
class _DriverState:
    tree: Graph
    mode: str
    reduction_threshold: int
    constants: ConstantsFn | None
    cap: int
    max_harvest: int = 0
    warnings: list = field(default_factory=list)


def _remap_models(models, back):
    return [{x: frozenset(back[v] for v in s) for x, s in m.items()} for m in models]


def _tree_stage(g: Graph, st: _DriverState) -> tuple[list[dict], set]:
    models: list[dict] = []
    xs: set = set()
    for cm in g.component_masks():
        keep = bits(cm)
        sub, _ = induced_subgraph(g, keep)
        ms, cx = _tree_component(sub, st)
        models.extend(_remap_models(ms, keep))
        xs |= {keep[v] for v in cx}
    return models, xs


def _harvest(c: Graph, h: frozenset, st: _DriverState) -> tuple[list[dict], set]:
    m = find_model(st.tree, c, mask_of(h))
    if m is None:  # pragma: no cover - pathwidth >= |T|-1 forces the tree
        raise AssertionError("harvested subgraph has no tree model")
    st.max_harvest = max(st.max_harvest, len(h))
    keep = [v for v in range(c.n) if v not in h]
    sub, _ = induced_subgraph(c, keep)
    ms, xs = _tree_stage(sub, st)
    return [dict(m.branch_sets)] + _remap_models(ms, keep), set(h) | {keep[v] for v in xs}


def _tree_component(c: Graph, st: _DriverState) -> tuple[list[dict], set]:
    t = st.tree.n
    if c.n < t:
        return [], set()
    fits, pd = pathwidth_at_most(c, t - 2, max(st.cap, DEFAULT_PW_CAP))
    if fits:
        packing, tr = _bounded_pw_duality(Family((st.tree,)), c, pd, t - 1)
        return [dict(m.branch_sets) for _, m in packing.models], set(tr.vertices)
    if st.mode == "faithful":
        try:
            out = find_small_pw_subgraph(c, 0, t - 1, st.reduction_threshold, st.constants,
                                         max(st.cap, DEFAULT_PW_CAP))
        except (LemmaGuaranteeFailed, CapExceeded) as exc:
            st.warnings.append(f"small-subgraph search failed ({exc}); used minimal subgraph")
            out = None
        if isinstance(out, TSeparation):
            res = _separation_branch(c, out, st)
            if res is not None:
                return res
        elif out is not None:
            return _harvest(c, out, st)
    return _harvest(c, minimal_pw_subgraph(c, t - 1, max(st.cap, DEFAULT_PW_CAP)), st)


def _separation_branch(c: Graph, ts: TSeparation, st: _DriverState):
    """Harvest a small left side holding the tree, or reduce it and lift back."""
    rt = st.reduction_threshold
    try:
        ts = refine_separation(c, ts, (), rt)
    except ValueError as exc:
        st.warnings.append(f"refinement failed ({exc})")
        return None
    left = frozenset(ts.sep.left)
    if find_model(st.tree, c, mask_of(left)) is not None:
        return _harvest(c, left, st)
    return _reduce_and_lift(c, ts.sep, st)


def _reduce_and_lift(c: Graph, sep: Separation, st: _DriverState):
    try:
        red = reduce_separation(c, sep, st.tree)
    except SearchBudgetExceeded as exc:
        st.warnings.append(f"reduction skipped ({exc})")
        return None
    if red is None:
        st.warnings.append("no smaller replacement; used minimal subgraph")
        return None
    ms, xs = _tree_stage(red.graph, st)
    try:
        lifted = _lift_packing(c, sep, red, ms, st.tree)
        lx = _lift_transversal(c, sep, red, xs, st.tree)
    except LemmaGuaranteeFailed as exc:
        st.warnings.append(f"lift failed ({exc}); used minimal subgraph")
        return None
    return lifted, lx


def reduce_and_solve(tree: Graph, g: Graph, sep: Separation, mode: str = "practical",
                     cap: int = DEFAULT_PW_CAP) -> tuple[Packing, Transversal] | None:
    """Shrink the tree-free left side of ``sep``, solve the smaller graph, lift back.

    Returns None when no smaller replacement exists or lifting fails.
    """
    st = _DriverState(tree, mode, 2, None, cap)
    out = _reduce_and_lift(g, sep, st)
    if out is None:
        return None
    models, xs = out
    return Packing(tuple((0, MinorModel(m)) for m in models)), Transversal(frozenset(xs))


def _split_by_roots(g: Graph, piece: int, roots: list[int]) -> list[int]:
    """Split a connected piece into connected parts with one root each (multi-source BFS)."""
    owner = {r: i for i, r in enumerate(roots)}
    frontier = list(roots)
    while frontier:
        nxt = []
        for u in frontier:
            for v in bits(g.nbr[u] & piece):
                if v not in owner:
                    owner[v] = owner[u]
                    nxt.append(v)
        frontier = nxt
    parts = [0] * len(roots)
    for v, i in owner.items():
        parts[i] |= 1 << v
    return parts


def _lift_packing(c: Graph, sep: Separation, red, models: list[dict], tree: Graph) -> list[dict]:
    cand = red.replacement
    cg = cand.graph
    n_right = len(red.right_ids)
    to_cand = {gid: v for v, gid in enumerate(red.replacement_ids)}
    cut = red.cut
    root_pos = {r: i for i, r in enumerate(cand.roots)}
    lifted = []
    pieces = []  # (model index, pattern vertex, cand mask)
    for mi, m in enumerate(models):
        for x, s in m.items():
            part = mask_of(to_cand[v] for v in s if v in to_cand)
            for comp in cg.component_masks(part):
                rs = [v for v in bits(comp) if v in root_pos]
                if len(rs) <= 1:
                    pieces.append((mi, x, comp))
                else:
                    for sub in _split_by_roots(cg, comp, rs):
                        pieces.append((mi, x, sub))
    g1_keep = sorted(sep.left)
    g1, g1_map = induced_subgraph(c, g1_keep)
    if pieces:
        edges = [(a, b) for a, b in combinations(range(len(pieces)), 2)
                 if cg.neighbourhood_mask(pieces[a][2]) & pieces[b][2]]
        rooted = []
        for i, (_, _, pm) in enumerate(pieces):
            for v in bits(pm):
                if v in root_pos:
                    rooted.append((root_pos[v], i))
        rooted.sort()
        h_star = RootedGraph(Graph(len(pieces), edges), tuple(i for _, i in rooted))
        g1_roots = tuple(g1_map[cut[pos]] for pos, _ in rooted)
        found = find_rooted_model(h_star, RootedGraph(g1, g1_roots))
        if found is None:
            raise LemmaGuaranteeFailed("replacement minor not realised on the original side")
    for mi, m in enumerate(models):
        new = {}
        for x, s in m.items():
            keep = {red.right_ids[v] for v in s if v < n_right and red.right_ids[v] not in sep.left}
            for pi, (pmi, px, _) in enumerate(pieces):
                if pmi == mi and px == x:
                    keep |= {g1_keep[v] for v in found.branch_sets[pi]}
            new[x] = frozenset(keep)
        if not validate_model(tree, c, MinorModel(new)):
            raise LemmaGuaranteeFailed("lifted model is invalid")
        lifted.append(new)
    return lifted


def _lift_transversal(c: Graph, sep: Separation, red, xs: set, tree: Graph) -> set:
    cand = red.replacement
    n_right = len(red.right_ids)
    to_cand = {gid: v for v, gid in enumerate(red.replacement_ids)}
    cut = red.cut
    root_pos = {r: i for i, r in enumerate(cand.roots)}
    outside = {red.right_ids[v] for v in xs if v < n_right and red.right_ids[v] not in sep.left}
    i1 = sorted(root_pos[to_cand[v]] for v in xs if v in to_cand and to_cand[v] in root_pos)
    j1 = [to_cand[v] for v in xs if v in to_cand and to_cand[v] not in root_pos]
    if len(i1) + len(j1) >= len(cut):
        out = outside | set(cut)
    else:
        kept_pos = [i for i in range(len(cut)) if i not in i1]
        gone = {cand.roots[i] for i in i1} | set(j1)
        ck = [v for v in range(cand.n) if v not in gone]
        csub, cmap = induced_subgraph(cand.graph, ck)
        target = q_folio(RootedGraph(csub, tuple(cmap[cand.roots[i]] for i in kept_pos)), red.q,
                         positions=tuple(kept_pos))
        inner = sorted(set(sep.left) - set(cut))
        out = None
        for ys in combinations(inner, len(j1)):
            dropped = {cut[i] for i in i1} | set(ys)
            keep = [v for v in sorted(sep.left) if v not in dropped]
            sub, mp = induced_subgraph(c, keep)
            folio = q_folio(RootedGraph(sub, tuple(mp[cut[i]] for i in kept_pos)), red.q,
                            positions=tuple(kept_pos))
            if folio == target:
                out = outside | dropped
                break
        if out is None:
            raise LemmaGuaranteeFailed("no deletion set with a matching folio")
    if find_model(tree, c, c.full & ~mask_of(out)) is not None:
        raise LemmaGuaranteeFailed("lifted transversal misses a model")
    return out


def _prune_transversal(fam: Family, g: Graph, xs: set) -> set:
    xs = set(xs)
    for v in sorted(xs):
        trial = xs - {v}
        if fam.first_model(g, g.full & ~mask_of(trial)) is None:
            xs = trial
    return xs


def ep_duality(fam: Family, g: Graph, mode: str = "practical", reduction_threshold: int = 2,
               constants: ConstantsFn | None = None, cap: int = DEFAULT_PW_CAP) -> DualityCertificate:
    """A verified packing and transversal for a family containing a forest.

    The forest is completed to a tree T.  A tree stage harvests T-models
    component by component (bounded pathwidth parts use the window
    argument), then the remainder, which has no T-minor, is handled by the
    bounded-pathwidth routine for the whole family.
    """
    if mode not in ("faithful", "practical"):
        raise ValueError("mode must be 'faithful' or 'practical'")
    fi = fam.forest_index
    if fi is None:
        raise ValueError("family must contain a forest")
    forest = fam.members[fi]
    t = forest.n
    tree = spanning_tree_completion(forest)
    st = _DriverState(tree, mode, reduction_threshold, constants, cap)
    constant_faithful = None
    if mode == "faithful":
        try:
            ft = (constants or main_pw_constants)(t - 1, reduction_threshold).f
            constant_faithful = max(1, 2 * (t - 1), reduction_threshold, ft)
        except ConstantOverflowError as exc:
            st.warnings.append(f"faithful constants overflow ({exc}); degraded to practical")
            st.mode = "practical"
    tree_models, x_tree = _tree_stage(g, st)

    rest_keep = [v for v in range(g.n) if v not in x_tree]
    rest, _ = induced_subgraph(g, rest_keep)
    _, pd = exact_pathwidth(rest, max(cap, DEFAULT_PW_CAP))
    bound_t = max(t, pd.width + 1)
    p_rest, y = _bounded_pw_duality(fam, rest, pd, bound_t)

    first = [(fi, MinorModel(m)) for m in tree_models]
    used = set()
    for _, m in first:
        used |= m.vertex_set()
    second = []
    for i, m in p_rest.models:
        lifted = m.relabel(rest_keep)
        second.append((i, lifted))
    merged = list(first)
    for i, m in second:
        if not m.vertex_set() & used:
            merged.append((i, m))
            used |= m.vertex_set()
    chosen = merged if len(merged) >= len(second) else second
    used = set()
    for _, m in chosen:
        used |= m.vertex_set()
    while True:
        found = fam.first_model(g, g.full & ~mask_of(used))
        if found is None:
            break
        chosen.append(found)
        used |= found[1].vertex_set()
    packing = Packing(tuple(chosen))

    xs = set(x_tree) | {rest_keep[v] for v in y.vertices}
    xs = _prune_transversal(fam, g, xs)
    transversal = Transversal(frozenset(xs))
    qrt = 2 * fam.q * fam.r * t
    if st.mode == "faithful":
        constant = constant_faithful + qrt
    else:
        constant = max(1, 2 * (t - 1), st.max_harvest) + qrt
    ratio = len(transversal) / max(1, len(packing))
    cert = DualityCertificate(packing, transversal, ratio, constant, st.mode, tuple(st.warnings))
    if not verify_certificate(fam, g, cert):  # pragma: no cover - construction guarantees it
        raise AssertionError("duality certificate failed verification")
    return cert


# ---------------------------------------------------------------- FPT pathwidth deletion

def fpt_pw_deletion(g: Graph, t: int, k: int, mode: str = "practical",
                    cap: int = DEFAULT_PW_CAP, constants: ConstantsFn | None = None) -> frozenset | None:
    """At most ``k`` vertices whose deletion leaves pathwidth below ``t``, or None.

    Components get the least budget that works for each; a connected graph
    of pathwidth >= t is branched on the non-empty subsets (size <= k) of a
    small subgraph of pathwidth >= t, since every solution meets it.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    if k < 0:
        raise ValueError("k must be >= 0")
    if mode not in ("faithful", "practical"):
        raise ValueError("mode must be 'faithful' or 'practical'")
    pw_memo: dict[int, bool] = {}
    memo: dict[tuple[int, int], int | None] = {}

    def small(mask: int) -> bool:
        if mask not in pw_memo:
            sub, _ = induced_subgraph(g, bits(mask))
            pw_memo[mask] = pathwidth_at_most(sub, t - 1, cap)[0]
        return pw_memo[mask]

    def witness(mask: int) -> int:
        if mode == "faithful":
            keep = bits(mask)
            sub, _ = induced_subgraph(g, keep)
            try:
                out = find_small_pw_subgraph(sub, 0, t, 2, constants, cap)
            except (LemmaGuaranteeFailed, CapExceeded):
                out = None
            if out is not None and not isinstance(out, TSeparation):
                return mask_of(keep[v] for v in out)
        return mask_of(minimal_pw_subgraph(g, t, cap, within=mask))

    def solve(mask: int, budget: int) -> int | None:
        key = (mask, budget)
        if key in memo:
            return memo[key]
        comps = g.component_masks(mask)
        result = None
        if len(comps) > 1:
            total = 0
            spent = 0
            for cm in comps:
                for ell in range(budget - spent + 1):
                    part = solve(cm, ell)
                    if part is not None:
                        total |= part
                        spent += ell
                        break
                else:
                    total = None
                    break
            result = total
        elif not mask or small(mask):
            result = 0
        elif budget > 0:
            core = bits(witness(mask))
            for size in range(1, min(budget, len(core)) + 1):
                for xs in combinations(core, size):
                    xm = mask_of(xs)
                    rest = solve(mask & ~xm, budget - size)
                    if rest is not None:
                        result = xm | rest
                        break
                if result is not None:
                    break
        memo[key] = result
        return result

    out = solve(g.full, k)
    return None if out is None else frozenset(bits(out))
