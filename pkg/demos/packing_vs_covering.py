"""
Packing versus covering
=======================

Exact packing and transversal numbers for a few families, a checked
duality certificate, and the tau/nu ratio of single edges on cliques.
"""

import random
from fractions import Fraction

from forestminors import MinorOracle, ep_duality, verify_certificate
from forestminors.cli import ratio_rows
from forestminors.generators import cycle_graph, random_graph
from forestminors.io import parse_family

g = cycle_graph(7)
for spec in ["K2", "P3", "P3,K3"]:
    fam = parse_family(spec)
    oracle = MinorOracle(fam, g)
    tau, xs = oracle.tau_mask(g.full)
    print(f"C7, family {{{spec}}}: nu = {oracle.nu_mask(g.full)}, tau = {tau}, transversal {sorted(xs)}")

# the driver returns a packing and a transversal that verify on their own
rng = random.Random(7)
h = random_graph(11, 0.3, rng)
fam = parse_family("P4")
cert = ep_duality(fam, h)
print(f"random G(11, 0.3): {len(cert.packing)} disjoint P4 models, "
      f"transversal of size {len(cert.transversal)}, verified {verify_certificate(fam, h, cert)}")

# on K_n, a matching has n//2 edges while a vertex cover needs n - 1 vertices
for n in (4, 6, 8):
    row = ratio_rows("K2", n, samples=0, seed=0, cap=24)[0]
    print(f"K{n}: nu {row['nu']}, tau {row['tau']}, ratio {row['ratio']}, "
          f"expected {Fraction(n - 1, n // 2)}")
