"""Diagrams of CDGAs over C_p / C_pq and their equivariant minimal models.

A model is a :class:`FreeDiagram`: one global list of generators, each
living on the down-set of a "top" level H (its summand in the injective
decomposition).  Level L is free on the generators whose top contains L,
and structure maps send a generator to itself or to zero.  This makes every
underlying vector-space diagram a sum of the injective corners, so the
underlying diagram of a model is injective by construction (and is checked).
"""

from dataclasses import dataclass

from . import linalg as la
from .linalg import Mat, ZERO, ONE
from . import diagrams as dg
from .diagrams import DiagramOfGVS, OrbitShape
from .cdga import (AlgebraError, MorphismError, CdgaMorphism, MonomialCDGA, cohomology,
                   cohomology_algebra, from_generators, image_of_mono, induced_map, wedge,
                   wedge_morphisms, wedge_presented, vec_to_poly)
from .sullivan import (SullivanAlgebra, ModelMap, minimal_model, quasi_iso_report, linear_part,
                       cone_classes, _stack_rows)


class DiagramError(ValueError):
    pass


class CdgaDiagram:
    """Levels keyed e/G or e/P/Q/G, CdgaMorphism per covering arrow."""

    def __init__(self, shape, levels, maps, one_connected=None, check=True):
        self.shape = shape
        self.levels = dict(levels)
        self.maps = dict(maps)
        missing = [L for L in shape.levels if L not in self.levels]
        if missing:
            raise DiagramError("missing levels %s" % missing)
        for a in shape.arrows:
            if a not in self.maps:
                raise DiagramError("missing structure map %s->%s" % a)
        self.cap = min(l.cap for l in self.levels.values())
        self.one_connected = one_connected
        if check:
            self.check()

    def check(self, products=True):
        for (a, b), f in self.maps.items():
            if f.source is not self.levels[a] or f.target is not self.levels[b]:
                raise DiagramError("map %s->%s has wrong endpoints" % (a, b))
            bad = f.failures(products)
            if bad:
                raise DiagramError("map %s->%s: %s" % (a, b, bad[0]))
        if self.shape.kind == "CyclicPQ":
            for k in range(self.cap + 1):
                left = self.maps[("P", "G")].maps[k] @ self.maps[("e", "P")].maps[k]
                right = self.maps[("Q", "G")].maps[k] @ self.maps[("e", "Q")].maps[k]
                if left != right:
                    raise DiagramError("square does not commute in degree %d" % k)
        return self

    def map(self, a, b):
        f = None
        for arrow in self.shape.path(a, b):
            g = self.maps[arrow]
            f = g if f is None else g @ f
        return f

    def degree_diagram(self, k):
        """Underlying vector-space diagram in degree k."""
        dims = {L: {k: self.levels[L].dim(k)} for L in self.shape.levels}
        maps = {a: {k: f.maps[k] if k <= f.cap else Mat(self.levels[a[1]].dim(k), self.levels[a[0]].dim(k))}
                for a, f in self.maps.items()}
        return DiagramOfGVS(self.shape, dims, maps, check=False)

    def underlying(self, upto=None):
        upto = self.cap if upto is None else upto
        dims = {L: {k: self.levels[L].dim(k) for k in range(upto + 1)} for L in self.shape.levels}
        maps = {a: {k: f.maps[k] for k in range(upto + 1)} for a, f in self.maps.items()}
        return DiagramOfGVS(self.shape, dims, maps, check=False)

    def is_zero_differential(self):
        return all(l.is_zero_differential() for l in self.levels.values())

    def injectivity_failures(self, upto=None):
        upto = self.cap if upto is None else upto
        return [k for k in range(upto + 1) if not dg.envelope(self.degree_diagram(k)).injective]

    def is_one_connected(self):
        for l in self.levels.values():
            h = cohomology(l, 1)
            if h.dims.get(0) != 1 or h.dims.get(1, 0):
                return False
        return True

    def restrict(self, which, mode):
        lo, hi, prime = dg.restriction_levels(self.shape, which, mode)
        shape = OrbitShape(prime)
        return CdgaDiagram(shape, {"e": self.levels[lo], "G": self.levels[hi]},
                           {("e", "G"): self.map(lo, hi)}, self.one_connected, check=False)

    def dim_table(self):
        return {L: self.levels[L].dims() for L in self.shape.levels}


def constant_diagram(shape, alg):
    from .cdga import identity_morphism
    idm = identity_morphism(alg)
    return CdgaDiagram(shape, {L: alg for L in shape.levels}, {a: idm for a in shape.arrows})


# ---------------------------------------------------------------------------
# equivariant wedge


def equivariant_wedge(u1, u2):
    """C_p diagram v C_q diagram -> C_pq diagram."""
    if u1.shape.kind != "CyclicP" or u2.shape.kind != "CyclicP":
        raise DiagramError("equivariant_wedge needs two C_p-shaped diagrams")
    if u1.cap != u2.cap:
        raise AlgebraError("cap mismatch (%d vs %d)" % (u1.cap, u2.cap))
    shape = OrbitShape(u1.shape.p, u2.shape.p)
    a_e, a_g = u1.levels["e"], u1.levels["G"]
    b_e, b_g = u2.levels["e"], u2.levels["G"]
    f, g = u1.maps[("e", "G")], u2.maps[("e", "G")]
    one = None if u1.one_connected is None or u2.one_connected is None else (u1.one_connected and u2.one_connected)
    if all(isinstance(x, MonomialCDGA) for x in (a_e, a_g, b_e, b_g)):
        return _presented_wedge(shape, a_e, a_g, b_e, b_g, f, g, one)
    from .cdga import identity_morphism
    levels = {"e": wedge(a_e, b_e), "P": wedge(a_g, b_e), "Q": wedge(a_e, b_g), "G": wedge(a_g, b_g)}
    maps = {
        ("e", "P"): wedge_morphisms(f, identity_morphism(b_e), levels["e"], levels["P"]),
        ("e", "Q"): wedge_morphisms(identity_morphism(a_e), g, levels["e"], levels["Q"]),
        ("P", "G"): wedge_morphisms(identity_morphism(a_g), g, levels["P"], levels["G"]),
        ("Q", "G"): wedge_morphisms(f, identity_morphism(b_g), levels["Q"], levels["G"]),
    }
    return CdgaDiagram(shape, levels, maps, one, check=False)


def _presented_wedge(shape, a_e, a_g, b_e, b_g, f, g, one):
    pairs = {"e": (a_e, b_e), "P": (a_g, b_e), "Q": (a_e, b_g), "G": (a_g, b_g)}
    levels = {L: wedge_presented(*pairs[L])[0] for L in shape.levels}
    side_maps = {("e", "P"): (f, None), ("e", "Q"): (None, g), ("P", "G"): (None, g), ("Q", "G"): (f, None)}
    maps = {}
    for (s, t), fs in side_maps.items():
        src, tgt = levels[s], levels[t]
        emb = tgt.summand_layout
        imgs = {}
        pos = 0
        for side in (0, 1):
            alg = pairs[s][side]
            for i, (nm, k) in enumerate(alg.gs.gens()):
                h = fs[side]
                if h is None:
                    mono = tuple(1 if j == i else 0 for j in range(len(alg.gs)))
                    poly = emb[side]({mono: ONE})
                elif k <= h.cap:
                    v = h.maps[k].apply(alg.generator_vec(nm)[1])
                    poly = emb[side](vec_to_poly(h.target, k, v))
                else:
                    poly = {}
                imgs[src.gs.names[pos]] = poly
                pos += 1
        maps[(s, t)] = from_generators(src, tgt, imgs)
    return CdgaDiagram(shape, levels, maps, one, check=False)


# ---------------------------------------------------------------------------
# free diagrams (models)


def _pad(p, n):
    return {m + (0,) * n: c for m, c in p.items()}


class FreeDiagram(CdgaDiagram):
    """Free algebras on down-set supported generators; projections as structure maps.

    ``gens``: list of (name, degree, top); ``dlev[L][name]``: d of the
    generator at level L as a free polynomial in that level's layout.
    """

    def __init__(self, shape, gens, dlev, cap, check=True):
        self.gens = list(gens)
        self.dlev = dlev
        self.sullivan = {}
        levels = {}
        for L in shape.levels:
            present = [(n, k) for n, k, top in self.gens if shape.leq(L, top)]
            s = SullivanAlgebra(present, dlev.get(L, {}), cap)
            self.sullivan[L] = s
            levels[L] = s.realized
        maps = {}
        for (a, b) in shape.arrows:
            names_b = set(levels[b].gs.names)
            imgs = {n: (n if n in names_b else "0") for n in levels[a].gs.names}
            maps[(a, b)] = from_generators(levels[a], levels[b], imgs, check=check)
        super().__init__(shape, levels, maps, True, check=False)

    @classmethod
    def trivial(cls, shape, cap):
        return cls(shape, [], {}, cap)

    def generators_at(self, L, upto=None):
        return [(n, k) for n, k, top in self.gens
                if self.shape.leq(L, top) and (upto is None or k <= upto)]

    def counts(self, upto=None):
        out = {}
        for L in self.shape.levels:
            c = {}
            for n, k in self.generators_at(L, upto):
                c[k] = c.get(k, 0) + 1
            out[L] = dict(sorted(c.items()))
        return out


@dataclass
class ElementaryExtensionStep:
    base: FreeDiagram
    v: DiagramOfGVS
    degree: int
    alpha: dict
    resolution: dg.InjectiveResolution
    alpha_lifts: list
    result: FreeDiagram
    new_generators: list            # (name, degree, top) in order
    rho_images: dict = None         # level -> {name: vector} for the new generators


def _shift(d, src, dst):
    """Re-key a diagram concentrated in degree ``src`` to degree ``dst``."""
    return DiagramOfGVS(d.shape, {L: {dst: d.dim(L, src)} for L in d.shape.levels},
                        {a: {dst: d.maps[a][src]} for a in d.shape.arrows if src in d.maps[a]},
                        check=False)


def _rekey(phi, src, dst):
    return {L: {dst: m[src]} for L, m in phi.items()}


def _lift_through_cokernel(phi, prev, prev_src, term, env_next, nxt, U, n):
    """Extend ``phi`` (vanishing on im prev) along w = embedding . quotient."""
    cok, q, sec = dg.cokernel(prev, prev_src, term)
    phibar = {L: {n: phi[L][n] @ sec[L][n]} for L in term.shape.levels}
    return dg.extend_along_mono(env_next.embedding, phibar, cok, nxt, U)


def _term_names(res, n, prefix):
    """Global generator names per resolution term: [(name, degree, top)]."""
    out = []
    shape = res.source.shape
    for i, e in enumerate(res.envelopes):
        names = []
        for H in shape.top_down():
            for j in range(e.corners.spaces[H][n].dim if n in e.corners.spaces[H] else 0):
                names.append(("%s%d_%d%s%d" % (prefix, n, i, H, j + 1), n + i, H))
        out.append(names)
    return out


def elementary_extension(base, v, alpha, rho_v=None, target=None, prefix="u", verify=True):
    """Extend ``base`` by the minimal injective resolution of ``v``.

    ``alpha[L][n]`` maps v(L) into cocycles of degree n+1 of the base level.
    With ``target`` (a zero-differential diagram) and ``rho_v[L][n]`` (v(L) ->
    target^n) the model map is extended to the new generators as well.
    """
    shape = base.shape
    degs = v.degrees
    if not degs:
        return ElementaryExtensionStep(base, v, None, alpha, None, [], base, [], {})
    if len(degs) != 1:
        raise ValueError("v must be concentrated in one degree")
    n = degs[0]
    for L in shape.levels:
        a = alpha[L][n]
        if not (base.levels[L].d(n + 1) @ a).is_zero():
            raise AlgebraError("alpha is not cocycle-valued at level %s" % L)
    res = dg.min_injective_resolution(v)
    terms = res.terms
    r = len(terms)

    def Udeg(alg_diag, k):
        return _shift(alg_diag.degree_diagram(k), k, n)

    alphas = [dg.extend_along_mono(res.augmentation, alpha, v, terms[0], Udeg(base, n + 1))]
    rhos = None
    if target is not None:
        rhos = [dg.extend_along_mono(res.augmentation, rho_v, v, terms[0], Udeg(target, n))]
    prev, prev_src = res.augmentation, v
    for i in range(r - 1):
        dai = {L: {n: base.levels[L].d(n + i + 1) @ alphas[i][L][n]} for L in shape.levels}
        nxt = _lift_through_cokernel(dai, prev, prev_src, terms[i], res.envelopes[i + 1],
                                     terms[i + 1], Udeg(base, n + i + 2), n)
        alphas.append(nxt)
        if target is not None:
            sign = -ONE if i % 2 == 0 else ONE
            rai = {L: {n: (base_rho_matrix(base, target, L, n + i + 1) @ alphas[i][L][n]).scale(sign)}
                   for L in shape.levels}
            rhos.append(_lift_through_cokernel(rai, prev, prev_src, terms[i], res.envelopes[i + 1],
                                               terms[i + 1], Udeg(target, n + i + 1), n))
        prev, prev_src = res.maps[i], terms[i]
    if verify:
        for i in range(r - 1):
            for L in shape.levels:
                lhs = alphas[i + 1][L][n] @ res.maps[i][L][n]
                rhs = base.levels[L].d(n + i + 1) @ alphas[i][L][n]
                if lhs != rhs:
                    raise AlgebraError("alpha lift check failed at term %d level %s" % (i + 1, L))
    names = _term_names(res, n, prefix)
    new = [g for t in names for g in t]
    gens = base.gens + new
    dlev = {}
    rho_imgs = {}
    for L in shape.levels:
        old = base.levels[L]
        pad = sum(1 for (_, _, top) in new if shape.leq(L, top))
        dl = {name: _pad(p, pad) for name, p in base.dlev.get(L, {}).items()}
        present = [(nm, k) for nm, k, top in gens if shape.leq(L, top)]
        idx = {nm: t for t, (nm, _) in enumerate(present)}
        width = len(present)
        here = [[g for g in t if shape.leq(L, g[2])] for t in names]
        rho_imgs[L] = {}
        for i in range(r):
            sign = ONE if i % 2 == 0 else -ONE
            A = alphas[i][L][n]
            W = res.maps[i][L][n] if i < r - 1 else None
            for p, (nm, k, top) in enumerate(here[i]):
                poly = {}
                col = A.col(p)
                for t, c in enumerate(col):
                    if c:
                        m = old.normal[n + i + 1][t] + (0,) * pad
                        poly[m] = poly.get(m, ZERO) + sign * c
                if W is not None:
                    for t, c in enumerate(W.col(p)):
                        if c:
                            gname = here[i + 1][t][0]
                            m = tuple(1 if s == idx[gname] else 0 for s in range(width))
                            poly[m] = poly.get(m, ZERO) + c
                dl[nm] = {m: c for m, c in poly.items() if c}
                if rhos is not None:
                    rho_imgs[L][nm] = rhos[i][L][n].col(p)
        dlev[L] = dl
    result = FreeDiagram(shape, gens, dlev, base.cap)
    if verify:
        for k in range(n, min(n + r, result.cap) + 1):
            if not dg.envelope(result.degree_diagram(k)).injective:
                raise AlgebraError("underlying diagram of the extension is not injective in degree %d" % k)
    return ElementaryExtensionStep(base, v, n, alpha, res, alphas, result, new, rho_imgs)


def base_rho_matrix(base, target, L, k):
    rho = getattr(base, "rho", None)
    if rho is None:
        return Mat(target.levels[L].dim(k), base.levels[L].dim(k))
    return rho[L].maps[k]


def _attach_rho(model, target, images):
    rho = {}
    for L in model.shape.levels:
        rho[L] = from_generators(model.levels[L], target.levels[L], images[L], cap=target.levels[L].cap)
    model.rho = rho
    return model


# ---------------------------------------------------------------------------
# stage data and the minimal model


@dataclass
class AssociatedVecDiagram:
    stage: int
    v: DiagramOfGVS
    injective: bool


def stage_data(model, target, k):
    """Diagram V = coker H^k(rho) + ker H^(k+1)(rho) with a natural section.

    Returns (V, alpha, rho_v) with alpha[L][k]: V(L) -> Z^(k+1)(model L) and
    rho_v[L][k]: V(L) -> target^k.
    """
    shape = model.shape
    info = {}
    for L in shape.levels:
        M, A, rho = model.levels[L], target.levels[L], model.rho[L]
        mk1, ak = M.dim(k + 1), A.dim(k)
        zs, avs = cone_classes(M, A, rho, k)
        reps = [z + a for z, a in zip(zs, avs)]
        bcols = []
        dm, rm = M.d(k), rho.maps[k]
        for c in range(M.dim(k)):
            bcols.append(dm.col(c) + rm.col(c))
        if k >= 1:
            da = A.d(k - 1)
            for c in range(A.dim(k - 1)):
                bcols.append([ZERO] * mk1 + da.col(c))
        bsp = la.Subspace(mk1 + ak, bcols)
        h = len(reps)
        if h:
            full = Mat.from_cols(reps + bsp.rows, mk1 + ak)
            Linv = la.left_inverse_zero_on_complement(full)
            P = Mat(h, mk1 + ak, [list(r) for r in Linv.data[:h]])
        else:
            P = Mat(0, mk1 + ak)
        info[L] = (mk1, ak, reps, Mat.from_cols(bcols, mk1 + ak), P)

    def F(a, b):
        return la.block_diag([model.map(a, b).maps[k + 1], target.map(a, b).maps[k]])

    vmaps = {}
    for (a, b) in shape.arrows:
        R = Mat.from_cols(info[a][2], info[a][0] + info[a][1])
        vmaps[(a, b)] = info[b][4] @ F(a, b) @ R
    dims = {L: {k: len(info[L][2])} for L in shape.levels}
    V = DiagramOfGVS(shape, dims, {a: {k: m} for a, m in vmaps.items()})
    section = {}
    for L in shape.top_down():
        mk1, ak, reps, Bm, P = info[L]
        outs = shape.out_arrows(L)
        cols = []
        for c, r in enumerate(reps):
            if not outs:
                cols.append(r)
                continue
            blocks, rhs = [], []
            for t in outs:
                Fm = F(L, t)
                want = section[t].apply(vmaps[(L, t)].col(c))
                have = Fm.apply(r)
                blocks.append(Fm @ Bm)
                rhs.extend(w - x for w, x in zip(want, have))
            system = _stack_rows(*blocks)
            if system.cols == 0:
                u = [] if not any(rhs) else None
            else:
                u = la.solve(system, rhs)
            if u is None:
                raise AlgebraError("no natural choice of representatives at level %s, degree %d" % (L, k))
            cols.append([x + y for x, y in zip(r, Bm.apply(u))] if u else r)
        section[L] = Mat.from_cols(cols, mk1 + ak)
    alpha, rho_v = {}, {}
    for L in shape.levels:
        mk1 = info[L][0]
        S = section[L]
        alpha[L] = {k: Mat(mk1, S.cols, [list(r) for r in S.data[:mk1]])}
        rho_v[L] = {k: Mat(S.rows - mk1, S.cols, [list(r) for r in S.data[mk1:]])}
    return V, alpha, rho_v


@dataclass
class EquivariantMinimalModel:
    model: FreeDiagram
    target: CdgaDiagram
    stages: list                   # ElementaryExtensionStep per nonzero stage
    associated: list               # AssociatedVecDiagram per stage 2..n
    rho: dict                      # level -> ModelMap
    through: int

    def stage_counts(self):
        """stage -> level -> degree -> number of new generators."""
        out = {}
        for st in self.stages:
            c = {L: {} for L in self.model.shape.levels}
            for name, k, top in st.new_generators:
                for L in self.model.shape.levels:
                    if self.model.shape.leq(L, top):
                        c[L][k] = c[L].get(k, 0) + 1
            out[st.degree] = c
        return out


def equivariant_minimal_model(a, n, verify=True):
    """Equivariant minimal model of a zero-differential injective diagram through ``n``."""
    if a.cap < n + 1:
        raise AlgebraError("cap %d too small for a model through degree %d" % (a.cap, n))
    if not a.is_zero_differential():
        raise AlgebraError("target must have zero differential (use equivariant_formality)")
    bad = a.injectivity_failures()
    if bad:
        raise dg.NotInjectiveError("target diagram is not injective in degrees %s; run envelope first" % bad)
    if not a.is_one_connected():
        raise AlgebraError("target is not cohomologically 1-connected")
    shape = a.shape
    model = FreeDiagram.trivial(shape, a.cap + 1)
    _attach_rho(model, a, {L: {} for L in shape.levels})
    images = {L: {} for L in shape.levels}
    stages, assoc = [], []
    for k in range(2, n + 1):
        V, alpha, rho_v = stage_data(model, a, k)
        if V.is_zero():
            assoc.append(AssociatedVecDiagram(k, V, True))
            continue
        assoc.append(AssociatedVecDiagram(k, V, dg.envelope(V).injective))
        step = elementary_extension(model, V, alpha, rho_v, a, verify=verify)
        for L in shape.levels:
            images[L].update(step.rho_images[L])
        model = _attach_rho(step.result, a, images)
        stages.append(step)
    rho = {}
    for L in shape.levels:
        rep = quasi_iso_report(model.rho[L], n)
        if not all(rep.values()):
            bad = min(k for k, ok in rep.items() if not ok)
            raise AlgebraError("H^%d(rho) is not an isomorphism at level %s" % (bad, L))
        rho[L] = ModelMap(model.rho[L], n)
    return EquivariantMinimalModel(model, a, stages, assoc, rho, n)


@dataclass
class LevelVerdict:
    equivariant_counts: dict
    classical_counts: dict
    minimality_failures: list

    @property
    def ok(self):
        return self.equivariant_counts == self.classical_counts and not self.minimality_failures


def levelwise_minimality_report(m, targets=None):
    targets = targets or m.target
    out = {}
    n = m.through
    counts = m.model.counts(n)
    for L in m.model.shape.levels:
        classical, _ = minimal_model(targets.levels[L], n)
        s = m.model.sullivan[L]
        fails = [f for f in s.minimality_failures()
                 if any(f.startswith("d(%s)" % nm) or f.startswith("generator %s " % nm)
                        for nm, k in s.generators if k <= n)]
        out[L] = LevelVerdict(counts[L], classical.counts(n), fails)
    return out


# ---------------------------------------------------------------------------
# the combination construction


def _renamed(s, prefix):
    gens = [(prefix + n, k) for n, k in s.generators]
    return SullivanAlgebra(gens, {prefix + n: p for n, p in s.d.items()}, s.cap)


def _tensor(x, y, cap):
    """Free algebra on the generators of x then y."""
    gens = x.generators + y.generators
    px, py = len(y.generators), len(x.generators)
    d = {}
    for n, p in x.d.items():
        d[n] = {m + (0,) * px: c for m, c in p.items()}
    for n, p in y.d.items():
        d[n] = {(0,) * py + m: c for m, c in p.items()}
    return SullivanAlgebra(gens, d, cap)


@dataclass
class Corner:
    x: SullivanAlgebra
    y: SullivanAlgebra
    algebra: SullivanAlgebra        # free on X + Y + K
    target: object                  # wedge of the realized x and y
    phi: CdgaMorphism
    killers: list                   # names of K generators


def _corner(x, y, n, kprefix):
    cap = n + 2
    xr = MonomialCDGA(x.gs, (), x.d, n + 1, check=False)
    yr = MonomialCDGA(y.gs, (), y.d, n + 1, check=False)
    W = wedge(xr, yr)
    s = _tensor(x, y, cap)
    nx = len(x.generators)

    def phi_of(s):
        imgs = {}
        for t, (nm, k) in enumerate(s.generators):
            if k > W.cap:
                continue
            v = W.zero(k)
            if t < nx:
                v[xr.normal_index[k][x.gs.gen(nm)]] = ONE
            elif t < nx + len(y.generators):
                v[xr.dim(k) + yr.normal_index[k][y.gs.gen(nm)]] = ONE
            imgs[nm] = v
        return from_generators(s.realized, W, imgs, cap=W.cap, check=False)

    phi = phi_of(s)
    killers = []
    for j in range(2, n + 1):
        M = s.realized
        zs, avs = cone_classes(M, W, phi, j)
        if not zs:
            continue
        new, nd = [], {}
        for i, (z, av) in enumerate(zip(zs, avs)):
            if not any(z):
                raise AlgebraError("cohomology of the wedge is not generated by the factors in degree %d" % j)
            if any(av):
                pre = la.solve(phi.maps[j], av)
                dpre = M.d(j).apply(pre)
                z = [p - q for p, q in zip(z, dpre)]
            name = "%s%d_%d" % (kprefix, j, i + 1)
            new.append((name, j))
            nd[name] = {M.normal[j + 1][t]: c for t, c in enumerate(z) if c}
            killers.append(name)
        pad = len(new)
        d = {nm: _pad(p, pad) for nm, p in s.d.items()}
        d.update({nm: _pad(p, pad) for nm, p in nd.items()})
        s = SullivanAlgebra(s.generators + new, d, cap)
        phi = phi_of(s)
    return Corner(x, y, s, W, phi, killers)


@dataclass
class CombinationModel:
    diagram: CdgaDiagram
    corners: dict                  # level -> Corner
    associated: dict               # degree -> (DiagramOfGVS, PropertyIReport)

    def counts(self, upto=None):
        return {L: c.algebra.counts(upto) for L, c in self.corners.items()}


def combination_model(m1, m2, n):
    """Four-corner diagram of wedge models built from C_p and C_q models."""
    m1 = getattr(m1, "model", m1)
    m2 = getattr(m2, "model", m2)
    for m in (m1, m2):
        if not isinstance(m, FreeDiagram) or m.shape.kind != "CyclicP":
            raise AlgebraError("combination_model needs free C_p-shaped models")
        for L in m.shape.levels:
            bad = m.sullivan[L].minimality_failures()
            if bad:
                raise AlgebraError("input level %s is not minimal: %s" % (L, bad[0]))
    shape = OrbitShape(m1.shape.p, m2.shape.p)
    src = {"e": ("e", "e"), "P": ("G", "e"), "Q": ("e", "G"), "G": ("G", "G")}
    X = {L: _renamed(_truncate(m1.sullivan[L], n), "a.") for L in ("e", "G")}
    Y = {L: _renamed(_truncate(m2.sullivan[L], n), "b.") for L in ("e", "G")}
    corners = {}
    for L in shape.levels:
        a, b = src[L]
        corners[L] = _corner(X[a], Y[b], n, "k.%s" % L)
    f1 = m1.maps[("e", "G")]
    f2 = m2.maps[("e", "G")]
    # images of X and Y generators under each arrow
    base_imgs = {}
    for (s, t) in shape.arrows:
        cs, ct = corners[s], corners[t]
        imgs = {}
        for side, (mm, f, pref) in enumerate(((m1, f1, "a."), (m2, f2, "b."))):
            lvl_s, lvl_t = src[s][side], src[t][side]
            for nm, k in mm.sullivan[lvl_s].generators:
                if k > n:
                    continue
                if lvl_s == lvl_t:
                    imgs[pref + nm] = pref + nm
                else:
                    v = f.maps[k].apply(mm.levels[lvl_s].generator_vec(nm)[1])
                    poly = {}
                    tgt_alg = mm.levels[lvl_t]
                    for t_i, c in enumerate(v):
                        if c:
                            poly[tgt_alg.normal[k][t_i]] = c
                    imgs[pref + nm] = _reembed(poly, tgt_alg.gs, ct.algebra.gs, pref)
        base_imgs[(s, t)] = imgs
    images = {a: dict(base_imgs[a]) for a in shape.arrows}
    order = [("P", "G"), ("Q", "G")]
    for arrow in order:
        s, t = arrow
        for nm in corners[s].killers:
            images[arrow][nm] = _solve_killer(corners[s], corners[t], images[arrow], nm)
    for nm_e in corners["e"].killers:
        vp, vq = _solve_killer_pair(corners, images, nm_e)
        images[("e", "P")][nm_e] = vp
        images[("e", "Q")][nm_e] = vq
    levels = {L: corners[L].algebra.realized for L in shape.levels}
    maps = {}
    for (s, t) in shape.arrows:
        maps[(s, t)] = from_generators(levels[s], levels[t], images[(s, t)])
    diagram = CdgaDiagram(shape, levels, maps, True, check=False)
    diagram.check(products=False)
    associated = {}
    for j in range(2, n + 1):
        dims = {L: {j: corners[L].algebra.counts().get(j, 0)} for L in shape.levels}
        lmaps = {}
        for a_ in shape.arrows:
            lp = linear_part(maps[a_])
            lmaps[a_] = {j: lp.maps.get(j, Mat(dims[a_[1]][j], dims[a_[0]][j]))}
        vd = DiagramOfGVS(shape, dims, lmaps)
        associated[j] = (vd, dg.property_I(vd))
    return CombinationModel(diagram, corners, associated)


def _truncate(s, n):
    keep = [(nm, k) for nm, k in s.generators if k <= n]
    names = {nm for nm, _ in keep}
    idx = [t for t, (nm, _) in enumerate(s.generators) if nm in names]
    d = {}
    for nm, _ in keep:
        p = s.d[nm]
        d[nm] = {tuple(m[t] for t in idx): c for m, c in p.items()}
    return SullivanAlgebra(keep, d, n + 2)


def _reembed(poly, gs_from, gs_to, prefix):
    """Free polynomial in one layout -> polynomial string over prefixed names."""
    terms = []
    for m, c in poly.items():
        factors = []
        for e, nm in zip(m, gs_from.names):
            if e:
                factors.append(prefix + nm if e == 1 else "%s%s^%d" % (prefix, nm, e))
        terms.append((c, factors))
    out = {}
    for c, factors in terms:
        mono = gs_to.unit()
        coef = c
        for fct in factors:
            p = gs_to.parse(fct)
            (mm, cc), = p.items()
            s_, mono = gs_to.mono_mul(mono, mm)
            coef *= s_ * cc
        out[mono] = out.get(mono, ZERO) + coef
    return {m: c for m, c in out.items() if c}


def _killer_system(cs, ct, imgs, nm):
    """Rows/rhs for d u = F(dk), phi_t(u) = 0 with u in ct.algebra degree |k|."""
    S = cs.algebra.realized
    T = ct.algebra.realized
    k = S.gs.degs[S.gs.index[nm]]
    vecs = {}
    for g, img in imgs.items():
        if isinstance(img, str):
            vecs[g] = T.reduce_poly(T.gs.parse(img), S.gs.degs[S.gs.index[g]])
        elif isinstance(img, dict):
            vecs[g] = T.reduce_poly(img, S.gs.degs[S.gs.index[g]])
        else:
            vecs[g] = img
    memo = {}
    fdk = T.zero(k + 1)
    for mono, c in S.dgen[nm].items():
        for t, x in enumerate(image_of_mono(S, T, vecs, mono, memo)):
            fdk[t] += c * x
    return T, k, T.d(k), fdk, ct.phi.maps[k]


def _k_columns(ct, k):
    T = ct.algebra.realized
    return [T.normal_index[k][T.gs.gen(g)] for g in ct.killers if T.gs.degs[T.gs.index[g]] == k]


def _solve_restricted(blocks_list, rhs, widths, restrict):
    """Solve sum-of-blocks system, first on restricted columns then in full."""
    for use in (restrict, None):
        cols_map = []
        for b, (w, r) in enumerate(zip(widths, use if use else [None] * len(widths))):
            cols_map.append(list(range(w)) if r is None else r)
        ncols = sum(len(c) for c in cols_map)
        rows = []
        for blk_row in blocks_list:
            row = []
            for b, m in enumerate(blk_row):
                for c in cols_map[b]:
                    row.append(m[c] if m is not None else ZERO)
            rows.append(row)
        sys = Mat(len(rows), ncols, rows)
        u = la.solve(sys, rhs) if ncols else ([] if not any(rhs) else None)
        if u is not None:
            out, off = [], 0
            for b, w in enumerate(widths):
                v = [ZERO] * w
                for c in cols_map[b]:
                    v[c] = u[off]
                    off += 1
                out.append(v)
            return out
        if use is None:
            break
    return None


def _block_rows(mat, nblocks, which):
    """Rows of ``mat`` placed at block position ``which`` (others None)."""
    out = []
    for r in mat.data:
        row = [None] * nblocks
        row[which] = r
        out.append(row)
    return out


def _solve_killer(cs, ct, imgs, nm):
    T, k, D, fdk, PHI = _killer_system(cs, ct, imgs, nm)
    rows = _block_rows(D, 1, 0) + _block_rows(PHI, 1, 0)
    rhs = list(fdk) + [ZERO] * PHI.rows
    sol = _solve_restricted(rows, rhs, [T.dim(k)], [_k_columns(ct, k)])
    if sol is None:
        raise AlgebraError("no compatible image for %s" % nm)
    return sol[0]


def _solve_killer_pair(corners, images, nm):
    ce, cp, cq, cg = corners["e"], corners["P"], corners["Q"], corners["G"]
    Tp, k, Dp, fp, PHp = _killer_system(ce, cp, images[("e", "P")], nm)
    Tq, _, Dq, fq, PHq = _killer_system(ce, cq, images[("e", "Q")], nm)
    G = cg.algebra.realized
    fpg = _morph_matrix(cp, cg, images[("P", "G")], k)
    fqg = _morph_matrix(cq, cg, images[("Q", "G")], k)
    rows = (_block_rows(Dp, 2, 0) + _block_rows(PHp, 2, 0)
            + _block_rows(Dq, 2, 1) + _block_rows(PHq, 2, 1))
    rhs = list(fp) + [ZERO] * PHp.rows + list(fq) + [ZERO] * PHq.rows
    for r in range(G.dim(k)):
        rows.append([fpg.data[r], [-x for x in fqg.data[r]]])
        rhs.append(ZERO)
    sol = _solve_restricted(rows, rhs, [Tp.dim(k), Tq.dim(k)], [_k_columns(cp, k), _k_columns(cq, k)])
    if sol is None:
        raise AlgebraError("no compatible images for %s" % nm)
    return sol[0], sol[1]


def _morph_matrix(cs, ct, imgs, k):
    S, T = cs.algebra.realized, ct.algebra.realized
    vecs = {}
    for g, img in imgs.items():
        kg = S.gs.degs[S.gs.index[g]]
        if isinstance(img, str):
            vecs[g] = T.reduce_poly(T.gs.parse(img), kg)
        elif isinstance(img, dict):
            vecs[g] = T.reduce_poly(img, kg)
        else:
            vecs[g] = img
    memo = {}
    cols = [image_of_mono(S, T, vecs, m, memo) for m in S.normal[k]]
    return Mat.from_cols(cols, T.dim(k))


# ---------------------------------------------------------------------------
# formality


@dataclass
class EquivariantFormalityCertificate:
    model: EquivariantMinimalModel
    cohomology_diagram: CdgaDiagram
    psi: dict                       # level -> CdgaMorphism model -> u
    through: int


def cohomology_diagram(u):
    """H(u) as a zero-differential diagram (cap one below u's)."""
    algs, hs = {}, {}
    for L in u.shape.levels:
        algs[L], hs[L] = cohomology_algebra(u.levels[L])
    maps = {}
    for (a, b), f in u.maps.items():
        cap = min(algs[a].cap, algs[b].cap)
        maps[(a, b)] = CdgaMorphism(algs[a], algs[b], {k: induced_map(f, hs[a], hs[b], k)
                                                      for k in range(cap + 1)}, cap)
    return CdgaDiagram(u.shape, algs, maps, u.one_connected, check=False), hs


def equivariant_formality(u, n):
    """Certificate that ``u`` is weakly equivalent to its cohomology diagram, or None."""
    if u.is_zero_differential():
        if u.injectivity_failures():
            return None
        m = equivariant_minimal_model(u, n)
        return EquivariantFormalityCertificate(m, u, {L: m.rho[L].rho for L in u.shape.levels}, n)
    H, hs = cohomology_diagram(u)
    if H.cap < n + 1:
        raise AlgebraError("need cap >= %d to certify through degree %d" % (n + 2, n))
    if H.injectivity_failures():
        return None
    m = equivariant_minimal_model(H, n)
    model = m.model
    shape = u.shape
    images = {L: {} for L in shape.levels}
    memo = {L: {} for L in shape.levels}
    # process generators extension by extension: the generators of one
    # extension are solved jointly over all levels
    groups = [st.new_generators for st in m.stages]
    cap = {L: min(model.levels[L].cap, u.levels[L].cap) for L in shape.levels}
    for group in groups:
        sol = _solve_psi_group(model, u, hs, m, group, images, memo, cap)
        if sol is None:
            return None
    psi = {}
    for L in shape.levels:
        psi[L] = from_generators(model.levels[L], u.levels[L], images[L], cap=cap[L], check=False)
        if psi[L].failures(products=False):
            return None
        rep = quasi_iso_report(psi[L], n)
        if not all(rep.values()):
            return None
    for (a, b), f in u.maps.items():
        c = min(cap[a], cap[b])
        for k in range(c + 1):
            if f.maps[k] @ psi[a].maps[k] != psi[b].maps[k] @ model.maps[(a, b)].maps[k]:
                return None
    return EquivariantFormalityCertificate(m, H, psi, n)


def _solve_psi_group(model, u, hs, m, group, images, memo, cap):
    """Choose psi on one extension's generators at every level at once.

    Unknowns: a correction c_L(g) added to a representative of rho_L(g).
    Equations: d psi(g) = psi(d g) and naturality along every arrow.
    """
    shape = model.shape
    unknowns = []       # (L, name, k, offset)
    off = 0
    for L in shape.levels:
        for nm, k, top in group:
            if shape.leq(L, top) and k <= cap[L]:
                unknowns.append((L, nm, k, off))
                off += u.levels[L].dim(k)
    index = {(L, nm): (k, o) for L, nm, k, o in unknowns}
    base = {}
    for L, nm, k, o in unknowns:
        M = model.levels[L]
        cls = m.rho[L].rho.maps[k].apply(M.generator_vec(nm)[1])
        h = hs[L]
        base[(L, nm)] = h.reps[k].apply(cls) if k <= h.top else u.levels[L].zero(k)
    rows, rhs = [], []

    def lin_of_poly(L, p, k):
        """psi_L(p) = const + sum over unknown blocks; returns (const, {key: coef})."""
        U = u.levels[L]
        M = model.levels[L]
        const = U.zero(k)
        lin = {}
        for mono, c in p.items():
            if sum(mono) == 1:
                t = mono.index(1)
                g = M.gs.names[t]
                if (L, g) in index:
                    lin[(L, g)] = lin.get((L, g), ZERO) + c
                    for s, x in enumerate(base[(L, g)]):
                        const[s] += c * x
                    continue
            for s, x in enumerate(image_of_mono(M, U, images[L], mono, memo[L])):
                const[s] += c * x
        return const, lin

    for L, nm, k, o in unknowns:
        U = u.levels[L]
        M = model.levels[L]
        if k + 1 <= cap[L]:
            D = U.d(k)
            const, lin = lin_of_poly(L, M.dgen[nm], k + 1)
            dbase = D.apply(base[(L, nm)])
            for r in range(D.rows):
                row = [ZERO] * off
                for s in range(D.cols):
                    if D.data[r][s]:
                        row[o + s] += D.data[r][s]
                for key, c in lin.items():
                    # psi(g') = base + correction; the base part sits in const
                    row[index[key][1] + r] -= c
                rows.append(row)
                rhs.append(const[r] - dbase[r])
    for (a, b), f in u.maps.items():
        for L, nm, k, o in unknowns:
            if L != a or k > min(cap[a], cap[b]):
                continue
            Fm = f.maps[k]
            present = (b, nm) in index
            for r in range(Fm.rows):
                row = [ZERO] * off
                for s in range(Fm.cols):
                    if Fm.data[r][s]:
                        row[o + s] += Fm.data[r][s]
                val = -Fm.apply(base[(a, nm)])[r]
                if present:
                    kb, ob = index[(b, nm)]
                    row[ob + r] -= ONE
                    val += base[(b, nm)][r]
                rows.append(row)
                rhs.append(val)
    if off == 0:
        return True
    sol = la.solve(Mat(len(rows), off, rows), rhs) if rows else [ZERO] * off
    if sol is None:
        return None
    for L, nm, k, o in unknowns:
        images[L][nm] = [x + y for x, y in zip(base[(L, nm)], sol[o:o + u.levels[L].dim(k)])]
    for L in shape.levels:
        for nm, k, top in group:
            if shape.leq(L, top) and k > cap[L]:
                images[L][nm] = []
    return True
