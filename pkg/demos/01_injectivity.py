"""Deciding injectivity of diagrams over the orbit posets of C_p and C_pq.

Run:  python3 demos/01_injectivity.py
"""

from eqrat import diagrams as dg
from eqrat.fileio import load_corpus


def show_envelope(name):
    d = load_corpus(name).underlying()
    env = dg.envelope(d)
    print("\n== %s over %r" % (name, d.shape))
    for L in d.shape.levels:
        print("  V_%s dims %-22s source %-28s envelope %s"
              % (L, env.corners.dims(L), dict(sorted(d.dims[L].items())),
                 dict(sorted(env.envelope.dims[L].items()))))
    print("  injective:", env.injective)
    return d, env


print(__doc__.splitlines()[0])
print("""
A diagram is injective exactly when it equals the sum of its corner
systems: each level's corner kernel V_H is pushed down to every smaller
level.  Comparing dimensions level by level decides the question.""")

# single prime: surjectivity is the whole story
d, env = show_envelope("s3_reflection_c2.json")
print("  e->G surjective in every degree:", dg.is_injective_cp(d))
print("  failures (arrow, degree):", dg.surjectivity_failures(d))

# two primes: surjective maps are not enough
d, env = show_envelope("cpq_noninjective.json")
r = dg.property_I(d)
print("  P->G surjective %s, Q->G surjective %s" % (r.surj_PG, r.surj_QG))
print("  pullback of P -> G <- Q has dims %s, level e has %s" % (r.pullback_K, r.source_dims))
print("  e maps onto the pullback:", r.surj_to_K)

# the lifting oracle reaches the same verdict independently
v = dg.lifting_oracle(d, trials=20, seed=0)
print("  lifting oracle consistent with injectivity:", v.injective_consistent)
print("  witness:", v.counterexample)

d, env = show_envelope("c6_T.json")
print("  Property I:", dg.property_I(d).satisfied)
for which in "PQ":
    for mode in ("ambient", "fixed"):
        r = dg.restrict_to_subgroup(d, which, mode)
        print("  restricted to %s (%s): %r injective=%s" % (which, mode, r.shape, dg.is_injective_cp(r)))
