"""Seeded random diagrams for oracles and regression tests."""

from . import linalg as la
from .linalg import Mat, ZERO, ONE
from .diagrams import DiagramOfGVS


def convex_supports(shape):
    out = []
    levels = shape.levels
    n = len(levels)
    for mask in range(1, 1 << n):
        s = {levels[i] for i in range(n) if mask >> i & 1}
        ok = all(b in s for a in s for c in s for b in levels
                 if shape.leq(a, b) and shape.leq(b, c))
        if ok:
            out.append(frozenset(s))
    return out


def random_invertible(n, rng, lo=-2, hi=2):
    while True:
        m = Mat(n, n, [[la.rat(rng.randint(lo, hi)) for _ in range(n)] for _ in range(n)])
        if la.rank(m) == n:
            return m


def random_vs_diagram(shape, rng, max_total=6, degree=0, basis_change=True):
    """Random direct sum of thin convex pieces, scrambled by a basis change per level."""
    supports = convex_supports(shape)
    pieces = []
    budget = rng.randint(1, max(1, max_total))
    while budget > 0:
        s = rng.choice(supports)
        if len(s) > budget:
            s = rng.choice([t for t in supports if len(t) <= budget])
        pieces.append(s)
        budget -= len(s)
    idx = {L: [i for i, s in enumerate(pieces) if L in s] for L in shape.levels}
    dims = {L: {degree: len(idx[L])} for L in shape.levels}
    maps = {}
    for (a, b) in shape.arrows:
        m = Mat(len(idx[b]), len(idx[a]))
        for c, i in enumerate(idx[a]):
            if i in idx[b]:
                m.data[idx[b].index(i)][c] = ONE
        maps[(a, b)] = {degree: m}
    if basis_change:
        P = {L: random_invertible(len(idx[L]), rng) for L in shape.levels}
        for (a, b) in shape.arrows:
            maps[(a, b)][degree] = P[b] @ maps[(a, b)][degree] @ la.inverse(P[a])
    return DiagramOfGVS(shape, dims, maps)


def generated_subdiagram(C, k, gens):
    """Sub-diagram generated by vectors ``gens[L]`` (lists) at each level."""
    shape = C.shape
    spans = {}
    for L in shape.levels:
        vecs = []
        for H in shape.down(L):
            m = C.map(H, L, k)
            for v in gens.get(H, []):
                vecs.append(m.apply(v))
        spans[L] = la.Subspace(C.dim(L, k), vecs)
    j = {L: {k: spans[L].basis} for L in shape.levels}
    dims = {L: {k: spans[L].dim} for L in shape.levels}
    maps = {}
    for (a, b) in shape.arrows:
        ja = spans[a].basis
        img = C.map(a, b, k) @ ja
        cols = [spans[b].coords(img.col(c)) for c in range(img.cols)]
        maps[(a, b)] = {k: Mat.from_cols(cols, spans[b].dim)}
    return DiagramOfGVS(shape, dims, maps), j


def random_subdiagram(C, rng, k):
    gens = {}
    for L in C.shape.levels:
        n = C.dim(L, k)
        if n and rng.random() < 0.5:
            gens[L] = [[la.rat(rng.randint(-2, 2)) for _ in range(n)]
                       for _ in range(rng.randint(1, n))]
    return generated_subdiagram(C, k, gens)


def random_graded_diagram(shape, rng, degrees=(2, 3, 4), max_per_degree=4):
    """Random diagram spread over several degrees (independent per degree)."""
    dims, maps = {L: {} for L in shape.levels}, {a: {} for a in shape.arrows}
    for k in degrees:
        d = random_vs_diagram(shape, rng, max_total=max_per_degree, degree=k)
        for L in shape.levels:
            dims[L][k] = d.dim(L, k)
        for a in shape.arrows:
            maps[a][k] = d.maps[a][k]
    return DiagramOfGVS(shape, dims, maps)


def random_retract_diagram(prime, rng, cap=11, max_gens=3, degrees=(3, 5)):
    """C_p diagram e -> G of exterior algebras with a retraction structure.

    Returns (diagram, section) where ``section`` maps G generators to the e
    generators they split onto.
    """
    from .cdga import realize, Presentation, from_generators
    from .diagrams import OrbitShape
    from .equivariant import CdgaDiagram
    ng = rng.randint(1, max_gens)
    e_gens = [("e%d" % (i + 1), rng.choice(degrees)) for i in range(ng)]
    # every G generator is split by a distinct e generator of the same degree
    chosen = rng.sample(range(ng), rng.randint(1, ng))
    chosen.sort()
    g_gens = [("g%d" % (j + 1), e_gens[i][1]) for j, i in enumerate(chosen)]
    images = {}
    for i, (n, k) in enumerate(e_gens):
        if i in chosen:
            images[n] = g_gens[chosen.index(i)][0]
        else:
            terms = ["%d*%s" % (rng.randint(-2, 2), gn) for gn, gk in g_gens if gk == k]
            images[n] = " + ".join(terms) if terms else "0"
    E = realize(Presentation(e_gens, [], {}, cap))
    G = realize(Presentation(g_gens, [], {}, cap))
    f = from_generators(E, G, images)
    d = CdgaDiagram(OrbitShape(prime), {"e": E, "G": G}, {("e", "G"): f}, True)
    d.flags = {"one_connected": True, "expect_injective": True}
    section = {g_gens[j][0]: e_gens[i][0] for j, i in enumerate(chosen)}
    return d, section
