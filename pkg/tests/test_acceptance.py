"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py`` (the summary lines appear at the end
of the run) or ``python tests/test_acceptance.py`` for the same lines alone.
"""

from __future__ import annotations

import math
import random
import time
from fractions import Fraction
from itertools import combinations

import pytest

from forestminors.cli import ratio_rows
from forestminors.erdosposa import (
    Family,
    MinorOracle,
    Transversal,
    ep_duality,
    fpt_pw_deletion,
    klogk_bound,
    klogk_transversal,
    packing_or_transversal_bounded_pw,
    verify_certificate,
    verify_transversal,
)
from forestminors.generators import (
    all_graphs,
    complete_binary_tree,
    complete_graph,
    connected_graphs,
    forests,
    path_graph,
    random_connected_graph,
    random_graph,
    rooted_trees,
    star_graph,
)
from forestminors.graph import Graph, RootedGraph, Separation, induced_subgraph, validate_separation
from forestminors.io import parse_family
from forestminors.minors import find_model, find_rooted_model, has_rooted_binary_tree_minor, reduce_separation, validate_model
from forestminors.pathwidth import (
    apex_join,
    exact_pathwidth,
    marked_separation,
    refine_separation,
    validate_tseparation,
)
from oracles import matching_number, separation_number, vertex_cover_number
from sampling import random_decomposition

# criterion number -> (passed, detail); filled as the tests run
RESULTS: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion(request):
    """Yields a dict for the detail text and records the outcome afterwards."""
    num = int(request.node.name.split("_")[2])
    note = {"detail": ""}
    start = time.time()
    yield note
    rep = getattr(request.node, "rep_call", None)
    ok = rep is not None and rep.passed
    RESULTS[num] = (ok, f"{note['detail']} [{time.time() - start:.1f}s]".strip())


def _bfs_depths(g: Graph, root: int) -> dict[int, int]:
    depth = {root: 0}
    queue = [root]
    for u in queue:
        for v in g.adjacency[u]:
            if v not in depth:
                depth[v] = depth[u] + 1
                queue.append(v)
    return depth


# ---------------------------------------------------------------- 1


def test_criterion_01_forest_minor_from_pathwidth(criterion):
    small_forests = [f for size in range(1, 6) for f in forests(size)]
    checks = violations = 0
    for n in range(1, 8):
        for g in connected_graphs(n):
            width = separation_number(g)
            assert exact_pathwidth(g)[0] == width
            for f in small_forests:
                if width >= f.n - 1:
                    checks += 1
                    model = find_model(f, g)
                    if model is None or not validate_model(f, g, model):
                        violations += 1
    tight = []
    for t in (3, 4, 5):
        clique = complete_graph(t - 1)
        width = exact_pathwidth(clique)[0]
        blocked = all(find_model(f, clique) is None for f in forests(t))
        tight.append(width == t - 2 and blocked)
    criterion["detail"] = f"{checks} implications, {violations} violations, tightness rows {tight}"
    assert violations == 0 and all(tight)


# ---------------------------------------------------------------- 2


def test_criterion_02_konig_agreement(criterion):
    k2 = Family((complete_graph(2),))
    count = mismatches = 0
    for n in range(1, 8):
        for g in all_graphs(n):
            oracle = MinorOracle(k2, g)
            count += 1
            if oracle.nu_mask(g.full) != matching_number(g):
                mismatches += 1
            if oracle.tau_mask(g.full)[0] != vertex_cover_number(g):
                mismatches += 1
    criterion["detail"] = f"{count} graphs, {mismatches} mismatches"
    assert mismatches == 0


# ---------------------------------------------------------------- 3


def test_criterion_03_klogk_transversal_bound(criterion):
    rng = random.Random(2025)
    trees = [Graph(1), complete_graph(2), path_graph(3), path_graph(4), star_graph(3)]
    violations = 0
    slack = []
    for _ in range(500):
        g = random_graph(rng.randint(4, 12), rng.uniform(0.05, 0.5), rng)
        tree = rng.choice(trees)
        oracle = MinorOracle(Family((tree,)), g)
        xs = klogk_transversal(tree, g, oracle=oracle)
        k = oracle.nu_mask(g.full)
        bound = klogk_bound(tree.n, k)
        if not verify_transversal(Family((tree,)), g, xs) or len(xs) > bound:
            violations += 1
        if k:
            slack.append(len(xs) / bound)
    criterion["detail"] = f"500 instances, {violations} violations, max |X|/bound {max(slack):.3f}"
    assert violations == 0


# ---------------------------------------------------------------- 4


FAMILIES_4 = ["K2", "P3", "2K2", "K3", "P3+K1", "P3,K3", "C4", "S3", "K2+K3", "P4,2K2"]


def test_criterion_04_bounded_pathwidth_transversal(criterion):
    rng = random.Random(404)
    done = violations = 0
    while done < 200:
        g = random_graph(rng.randint(2, 10), rng.uniform(0.1, 0.45), rng)
        width, pd = exact_pathwidth(g)
        if width > 2:
            continue
        t = rng.randint(max(width + 1, 1), 3)
        fam = parse_family(rng.choice(FAMILIES_4))
        nu = MinorOracle(fam, g).nu_mask(g.full)
        out = packing_or_transversal_bounded_pw(fam, g, pd, nu + 1, t)
        done += 1
        if not isinstance(out, Transversal):
            violations += 1
        elif not verify_transversal(fam, g, out) or len(out) > 2 * fam.q * fam.r * t * nu:
            violations += 1
    criterion["detail"] = f"{done} graphs of pathwidth < t <= 3, {violations} violations"
    assert violations == 0


# ---------------------------------------------------------------- 5


def test_criterion_05_marked_and_refined_separations(criterion):
    rng = random.Random(55)
    marked_bad = refine_bad = refine_runs = 0
    for _ in range(1000):
        g = random_graph(rng.randint(1, 12), rng.uniform(0.1, 0.6), rng)
        pd = random_decomposition(g, rng)
        marked = rng.sample(range(g.n), rng.randint(0, g.n))
        k, t = len(marked), max(pd.width, 0)
        ts = marked_separation(g, pd, marked)
        interior = ts.sep.left - ts.sep.right
        if not (validate_separation(g, ts.sep) and validate_tseparation(g, ts)
                and len(ts.sep.left) >= (g.n - k * (t + 1)) / (k + 1)
                and not interior & set(marked)):
            marked_bad += 1
            continue
        upper = -(-len(ts.sep.left) // (k + 1))
        if upper < 1:
            continue
        for ell in {rng.randint(1, upper), upper}:
            refine_runs += 1
            out = refine_separation(g, ts, marked, ell)
            if not (validate_tseparation(g, out) and len(out.sep.left) == ell
                    and out.sep.left <= ts.sep.left and ts.sep.right <= out.sep.right
                    and not (out.sep.left - out.sep.right) & set(marked)):
                refine_bad += 1
    criterion["detail"] = (f"1000 marked triples ({marked_bad} violations), "
                           f"{refine_runs} refinements ({refine_bad} violations)")
    assert refine_runs >= 1000 and marked_bad == 0 and refine_bad == 0


# ---------------------------------------------------------------- 6


def test_criterion_06_binary_tree_free_size_bound(criterion):
    checked = violations = 0
    for n in range(1, 13):
        for rt in rooted_trees(n):
            g, root = rt.graph, rt.roots[0]
            height = max(_bfs_depths(g, root).values())
            degree = max((len(a) for a in g.adjacency), default=0)
            for k in (0, 1, 2):
                contains = has_rooted_binary_tree_minor(rt, k + 1)
                if n <= 8 and k + 1 <= 2:
                    # second route: direct rooted model search
                    assert contains == (find_rooted_model(complete_binary_tree(k + 1), rt) is not None)
                if not contains:
                    checked += 1
                    if n > (height + 1) ** (k + 1) * (degree + 1) ** (k + 1):
                        violations += 1
    criterion["detail"] = f"{checked} binary-tree-free (tree, k) pairs, {violations} violations"
    assert violations == 0


# ---------------------------------------------------------------- 7


def _small_rooted_trees():
    return [
        RootedGraph(Graph(1), (0,)),
        RootedGraph(complete_graph(2), (0,)),
        RootedGraph(path_graph(3), (0,)),
        RootedGraph(path_graph(3), (1,)),
    ]


def test_criterion_07_rooted_tree_models(criterion):
    checks = violations = 0
    for n in range(1, 8):
        for g in connected_graphs(n):
            width = exact_pathwidth(g)[0]
            for tree in _small_rooted_trees():
                t = tree.graph.n
                if width < 2 * t - 2:
                    continue
                for w in range(n):
                    host = RootedGraph(g, (w,))
                    checks += 1
                    model = find_rooted_model(tree, host)
                    if model is None or not validate_model(tree, host, model):
                        violations += 1
    criterion["detail"] = f"{checks} rooted hosts, {violations} violations"
    assert violations == 0


# ---------------------------------------------------------------- 8


def test_criterion_08_apex_join_pathwidth(criterion):
    rng = random.Random(808)
    violations = 0
    for k in (1, 2, 3):
        for _ in range(100):
            parts = []
            while len(parts) < 3:
                h = random_connected_graph(rng.randint(k + 1, 8), rng.uniform(0.3, 0.9), rng)
                if exact_pathwidth(h)[0] >= k:
                    parts.append((h, rng.randrange(h.n)))
            joined = apex_join(*[x for part in parts for x in part])
            if exact_pathwidth(joined, cap=25)[0] < k + 1:
                violations += 1
    criterion["detail"] = f"300 joins, {violations} violations"
    assert violations == 0


# ---------------------------------------------------------------- 9

# right-hand tails hang off the cut vertex 0 (local ids; 0 is the cut)
TAILS = {
    "triangle": (2, [(0, 1), (1, 2), (0, 2)]),
    "p3": (2, [(0, 1), (1, 2)]),
    "p5": (4, [(0, 1), (1, 2), (2, 3), (3, 4)]),
    "p8": (7, [(i, i + 1) for i in range(7)]),
    "c4-tail": (5, [(0, 1), (1, 2), (2, 3), (3, 0), (2, 4), (4, 5)]),
    "c6": (5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]),
    "two-paths": (6, [(0, 1), (1, 2), (2, 3), (0, 4), (4, 5), (5, 6)]),
    "two-triangles": (4, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]),
    "k4": (3, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
}

REDUCTION_CASES = [
    ("centre", 6, "triangle"), ("centre", 9, "triangle"), ("centre", 7, "p3"), ("centre", 10, "p3"),
    ("centre", 6, "p5"), ("centre", 8, "p5"), ("centre", 6, "p8"), ("centre", 6, "c4-tail"),
    ("centre", 6, "c6"), ("centre", 7, "c6"), ("centre", 6, "two-paths"), ("centre", 7, "two-triangles"),
    ("centre", 8, "k4"), ("leaf", 6, "triangle"), ("leaf", 8, "p3"), ("leaf", 7, "p5"),
    ("leaf", 6, "c4-tail"), ("leaf", 7, "c4-tail"), ("leaf", 6, "c6"), ("leaf", 6, "two-paths"),
    ("leaf", 6, "two-triangles"), ("leaf", 7, "two-triangles"), ("leaf", 7, "k4"),
]


def pendant_star_instance(where: str, leaves: int, tail: str) -> tuple[Graph, Separation]:
    """A star on the left of a one-vertex cut, a tail on the right.

    ``where`` puts the cut at the star centre or at one of its leaves.
    """
    if where == "centre":
        left_edges = [(0, i) for i in range(1, leaves + 1)]
        n1 = leaves + 1
    else:
        left_edges = [(0, 1)] + [(1, i) for i in range(2, leaves + 2)]
        n1 = leaves + 2
    extra, tail_edges = TAILS[tail]

    def shift(v):
        return 0 if v == 0 else v + n1 - 1

    n = n1 + extra
    edges = left_edges + [(shift(a), shift(b)) for a, b in tail_edges]
    return Graph(n, edges), Separation(set(range(n1)), {0} | set(range(n1, n)))


@pytest.mark.slow
def test_criterion_09_reduction_preserves_nu_and_tau(criterion):
    tree = path_graph(4)
    fam = Family((tree,))
    violations = 0
    pairs = []
    for where, leaves, tail in REDUCTION_CASES:
        g, sep = pendant_star_instance(where, leaves, tail)
        assert g.n <= 14 and validate_separation(g, sep)
        red = reduce_separation(g, sep, tree)
        assert red is not None and red.graph.n < g.n
        before, after = MinorOracle(fam, g, 14), MinorOracle(fam, red.graph, 14)
        old = (before.nu_mask(g.full), before.tau_mask(g.full)[0])
        new = (after.nu_mask(red.graph.full), after.tau_mask(red.graph.full)[0])
        pairs.append(old)
        if old != new:
            violations += 1
    seen = sorted(set(pairs))
    criterion["detail"] = f"{len(REDUCTION_CASES)} reductions, (nu, tau) values {seen}, {violations} violations"
    assert violations == 0


# ---------------------------------------------------------------- 10


def _pathwidth_below(g: Graph, t: int) -> bool:
    """pathwidth < 1: no edges; pathwidth < 2: every component is a caterpillar."""
    if t == 1:
        return g.m == 0
    if t == 2:
        if not g.is_forest():
            return False
        spine = [v for v in range(g.n) if len(g.adjacency[v]) > 1]
        return all(sum(1 for u in g.adjacency[v] if len(g.adjacency[u]) > 1) <= 2 for v in spine)
    raise ValueError(t)


def _without(g: Graph, xs) -> Graph:
    return induced_subgraph(g, [v for v in range(g.n) if v not in xs])[0]


def test_criterion_10_fpt_against_exhaustive_search(criterion):
    # the characterisation itself is checked against the subset recurrence first
    for n in range(1, 8):
        for g in all_graphs(n):
            width = separation_number(g)
            assert _pathwidth_below(g, 1) == (width < 1)
            assert _pathwidth_below(g, 2) == (width < 2)
    runs = disagreements = 0
    for n in range(1, 8):
        for g in all_graphs(n):
            for t in (1, 2):
                least = next(size for size in range(n + 1)
                             if any(_pathwidth_below(_without(g, xs), t) for xs in combinations(range(n), size)))
                for k in range(4):
                    runs += 1
                    out = fpt_pw_deletion(g, t, k)
                    if (out is not None) != (least <= k):
                        disagreements += 1
                    elif out is not None and (len(out) > k or not _pathwidth_below(_without(g, out), t)):
                        disagreements += 1
    criterion["detail"] = f"{runs} (graph, t, k) runs, {disagreements} disagreements"
    assert disagreements == 0


# ---------------------------------------------------------------- 11


DESK_FAMILIES = ["K2", "P3", "P4", "S3", "2K2", "P3+K1", "P3,K3", "K2,C4", "P4,K4"]


def test_criterion_11_duality_driver_and_ratio_rows(criterion):
    rng = random.Random(1111)
    attempted = failures = 0
    worst = Fraction(0)
    for mode in ("practical", "faithful"):
        for _ in range(100):
            g = random_graph(rng.randint(1, 11), rng.uniform(0.1, 0.5), rng)
            fam = parse_family(rng.choice(DESK_FAMILIES))
            cert = ep_duality(fam, g, mode=mode)
            attempted += 1
            if not verify_certificate(fam, g, cert) or len(cert.transversal) < len(cert.packing):
                failures += 1
            if mode == "practical" and cert.packing:
                assert math.isclose(cert.ratio, len(cert.transversal) / len(cert.packing))
                worst = max(worst, Fraction(len(cert.transversal), len(cert.packing)))
    rows_ok = []
    for n in (4, 6, 8):
        row = ratio_rows("K2", n, samples=3, seed=0, cap=24)[0]
        rows_ok.append(row["graph"] == f"K{n}" and Fraction(row["ratio"]) == Fraction(n - 1, n // 2))
    criterion["detail"] = (f"{attempted} certificates, {failures} failures, "
                           f"max practical ratio {worst}, K_n rows exact {rows_ok}")
    assert failures == 0 and all(rows_ok)


def _report_lines() -> list[str]:
    lines = []
    for num in range(1, 12):
        if num in RESULTS:
            ok, detail = RESULTS[num]
            lines.append(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        else:
            lines.append(f"criterion {num:2d}: NOT RUN")
    return lines


if __name__ == "__main__":
    import sys

    code = pytest.main([__file__, "-q", "-p", "no:cacheprovider"])
    sys.exit(code)
