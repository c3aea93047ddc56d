"""Minimal injective resolutions and extension along monomorphisms.

Run:  python3 demos/02_resolutions.py
"""

import random

from eqrat import diagrams as dg
from eqrat.diagrams import DiagramOfGVS, OrbitShape
from eqrat.randgen import random_subdiagram, random_vs_diagram

print(__doc__.splitlines()[0])

s = OrbitShape(3)
point = DiagramOfGVS(s, {"e": {2: 0}, "G": {2: 1}}, {})
res = dg.min_injective_resolution(point)
print("\nQ placed at the top level only, over C_3:")
for i, t in enumerate(res.terms):
    print("  term %d: %s" % (i, t.dim_table()))
print("  exact:", dg.resolution_is_exact(res))
print("The envelope is the constant diagram; the cokernel Q at e is already injective.")

print("\nRandom two-prime diagrams: resolution lengths")
lengths = {}
for seed in range(200):
    rng = random.Random(seed)
    d = random_vs_diagram(OrbitShape(3, 2), rng, max_total=8, degree=4)
    d, _ = random_subdiagram(d, rng, 4)
    res = dg.min_injective_resolution(d)
    assert dg.resolution_is_exact(res)
    lengths[res.length] = lengths.get(res.length, 0) + 1
print("  length -> count:", dict(sorted(lengths.items())))

print("\nExtending a map along a monomorphism into an injective target")
for seed in range(100):
    rng = random.Random(seed)
    shape = OrbitShape(2, 3)
    C = random_vs_diagram(shape, rng, max_total=6, degree=2)
    B, j = random_subdiagram(C, rng, 2)
    U = dg.envelope(random_vs_diagram(shape, rng, max_total=6, degree=2)).envelope
    f = [h for h in dg.natural_maps_basis(B, U, 2) if any(h[L][2].rows and h[L][2].cols and
                                                          any(x for r in h[L][2].data for x in r)
                                                          for L in shape.levels)]
    if f:
        break
g = dg.extend_along_mono(j, f[0], B, C, U)
ok = all(g[L][2] @ j[L][2] == f[0][L][2] for L in shape.levels)
print("  seed %d: B %s -> C %s, U %s" % (seed, B.dim_table(), C.dim_table(), U.dim_table()))
print("  g . j == f:", ok, " g natural:", dg.is_natural(g, C, U))
