"""
Deleting vertices to small pathwidth
====================================

How many vertices must go before a graph has pathwidth below t?
"""

from forestminors import exact_pathwidth, fpt_pw_deletion
from forestminors.generators import complete_graph, cycle_graph, path_graph
from forestminors.graph import delete_vertices, disjoint_union

cases = {
    "two K4": disjoint_union(complete_graph(4), complete_graph(4)),
    "C9": cycle_graph(9),
    "P7 + K5": disjoint_union(path_graph(7), complete_graph(5)),
}

for name, g in cases.items():
    for t in (1, 2, 3):
        k = 0
        while (xs := fpt_pw_deletion(g, t, k)) is None:
            k += 1
        rest, _ = delete_vertices(g, xs)
        print(f"{name}, t={t}: delete {sorted(xs)} (k={k}), pathwidth left {exact_pathwidth(rest)[0]}")
