"""
Shrinking a pendant star
========================

A big star hangs off a single cut vertex.  Its rooted folio only sees
minors up to a fixed size, so a smaller star with the same folio can take
its place without changing packing or transversal numbers for P4.
"""

from forestminors import Family, MinorOracle, Separation, reduce_separation
from forestminors.generators import path_graph
from forestminors.graph import Graph

leaves = 9
edges = [(0, i) for i in range(1, leaves + 1)]
base = leaves + 1
edges += [(0, base), (base, base + 1), (base + 1, base + 2)]  # a path on the other side
g = Graph(base + 3, edges)
sep = Separation(set(range(base)), {0, base, base + 1, base + 2})

tree = path_graph(4)
red = reduce_separation(g, sep, tree)
print(f"q = {red.q}, {g.n} vertices -> {red.graph.n} vertices")
print("replacement edges:", red.replacement.graph.edges(), "roots", red.replacement.roots)

fam = Family((tree,))
before, after = MinorOracle(fam, g, 14), MinorOracle(fam, red.graph, 14)
print("nu:", before.nu_mask(g.full), "->", after.nu_mask(red.graph.full))
print("tau:", before.tau_mask(g.full)[0], "->", after.tau_mask(red.graph.full)[0])
