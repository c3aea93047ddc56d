"""Truncated graded-commutative algebras: signs, cohomology, wedges, pullbacks.

Run:  python3 demos/03_algebras.py
"""

from eqrat.cdga import (Presentation, battery, cohomology_dims, from_generators, pullback, realize,
                        verify_retraction, wedge, wedge_morphisms)


def alg(gens, rels=(), d=None, cap=10):
    return realize(Presentation(list(gens), list(rels), dict(d or {}), cap))


print(__doc__.splitlines()[0])

x = alg([("x", 3)])
print("\nOne odd generator: dims", x.dims(), "(x^2 vanishes by the sign rule)")

gens = [("x1", 3), ("x2", 3), ("x3", 3), ("y1", 5), ("y2", 5)]
rels = ["%s*%s" % (a, b) for a in ("x1", "x2", "x3") for b in ("y1", "y2")]
e = alg(gens, rels)
print("Three odd 3-classes and two 5-classes, mixed products killed:", e.dims())
print("  axiom violations:", battery(e))

s2 = alg([("x", 2), ("y", 3)], d={"y": "x^2"}, cap=8)
print("\nThe free model of the 2-sphere has cohomology", cohomology_dims(s2))

w = wedge(alg([("x", 3)]), alg([("y", 5)]))
print("Wedge of a 3-sphere and a 5-sphere:", w.dims())

big = alg([("a", 3), ("b", 5)], cap=9)
small = alg([("a", 3)], cap=9)
other = alg([("c", 3), ("e", 5)], cap=9)
f = from_generators(big, small, {"a": "a", "b": "0"})
g = from_generators(other, small, {"c": "a", "e": "0"})
pb = pullback(f, g)
print("\nPullback of two surjections onto a 3-sphere:", pb.algebra.dims())

r = from_generators(big, small, {"a": "a", "b": "0"})
i = from_generators(small, big, {"a": "a"})
verify_retraction(r, i)
rr = wedge_morphisms(r, r, wedge(big, big), wedge(small, small))
ii = wedge_morphisms(i, i, rr.target, rr.source)
verify_retraction(rr, ii)
print("A retraction wedged with itself is again a retraction: verified degree by degree.")
