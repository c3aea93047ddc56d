"""Minimal Sullivan models, lifting, and formality certificates.

Run:  python3 demos/04_models.py
"""

from eqrat.cdga import Presentation, cohomology_dims, realize, wedge
from eqrat.sullivan import formality_certificate, lift, linear_part, minimal_model


def alg(gens, rels=(), d=None, cap=10):
    return realize(Presentation(list(gens), list(rels), dict(d or {}), cap))


print(__doc__.splitlines()[0])

m, mm = minimal_model(alg([("x", 2)], ["x^2"], cap=9), 7)
print("\nCohomology of the 2-sphere, model through degree 7:\n ", m)

w = wedge(alg([("a", 3)], cap=10), alg([("b", 3)], cap=10))
m, mm = minimal_model(w, 9)
print("\nWedge of two 3-spheres: generator counts", m.counts())
print("  degree 5 generator:", [g for g in repr(m).split(", ") if "(5)" in g])

g = lift(mm.rho, mm.rho)
print("  lifting the model map through itself succeeds:", (mm.rho @ g).maps[6] == mm.rho.maps[6])
print("  linear part of the identity lift is surjective:", linear_part(g).all_surjective)

s2 = alg([("x", 2), ("y", 3)], d={"y": "x^2"}, cap=9)
print("\nFormality of the 2-sphere model through 6:", formality_certificate(s2, 6) is not None)

h = alg([("a", 3), ("b", 3), ("k", 5)], d={"k": "a*b"}, cap=12)
print("\nd k = a b: cohomology", cohomology_dims(h))
print("  certificate through 6:", formality_certificate(h, 6) is not None)
print("  certificate through 8:", formality_certificate(h, 8) is not None)
print("""  The classes [a k] and [b k] in degree 8 are Massey products <a,a,b> and
  <b,a,b>; they are not products of lower classes, so no map from the model
  of the cohomology can hit them and the search correctly comes back empty.""")
