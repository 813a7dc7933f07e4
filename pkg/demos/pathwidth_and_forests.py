"""
Pathwidth and forest minors
===========================

Exact pathwidth of a few familiar graphs, then a check that every forest
on t vertices shows up as a minor once the pathwidth reaches t - 1.
"""

from forestminors import exact_pathwidth, find_model
from forestminors.generators import complete_binary_tree, complete_graph, connected_graphs, cycle_graph, forests, path_graph

for name, g in [("P8", path_graph(8)), ("C8", cycle_graph(8)), ("K5", complete_graph(5))]:
    width, pd = exact_pathwidth(g)
    print(f"{name}: pathwidth {width}, {len(pd.bags)} bags")

# complete binary trees grow pathwidth by one every two levels
for h in range(1, 5):
    tree = complete_binary_tree(h).graph
    print(f"B{h} ({tree.n} vertices): pathwidth {exact_pathwidth(tree, cap=32)[0]}")

# every connected graph on 6 vertices against every forest on 4 vertices
hits = misses = 0
for g in connected_graphs(6):
    if exact_pathwidth(g)[0] < 3:
        continue
    for f in forests(4):
        if find_model(f, g) is None:
            misses += 1
        else:
            hits += 1
print(f"pathwidth >= 3 on 6 vertices: {hits} forest models found, {misses} missing")

# a model is a map from pattern vertices to connected branch sets
model = find_model(path_graph(4), cycle_graph(6))
print("P4 inside C6:", {x: sorted(s) for x, s in sorted(model.branch_sets.items())})
