"""Free (Sullivan) algebras, minimal models, lifting and formality certificates."""

from dataclasses import dataclass

from . import linalg as la
from .linalg import Mat, ZERO, ONE
from .cdga import (AlgebraError, MonomialCDGA, CdgaMorphism, GenSet, cohomology,
                   cohomology_algebra, from_generators, image_of_mono, induced_map)


class LiftError(RuntimeError):
    pass


class SullivanAlgebra:
    """Free graded-commutative algebra with d given on generators.

    ``d`` maps generator names to polynomial strings or free polynomials over
    the earlier generators.
    """

    def __init__(self, generators, d=None, cap=10):
        self.generators = [(n, int(k)) for n, k in generators]
        self.cap = cap
        self.gs = GenSet(self.generators)
        self.d = {n: self.gs.parse((d or {}).get(n, "0")) for n, _ in self.generators}
        self._realized = None

    @property
    def realized(self):
        if self._realized is None:
            self._realized = MonomialCDGA(self.gs, (), self.d, self.cap)
        return self._realized

    def counts(self, upto=None):
        """Number of generators per degree."""
        out = {}
        for _, k in self.generators:
            if upto is None or k <= upto:
                out[k] = out.get(k, 0) + 1
        return dict(sorted(out.items()))

    def minimality_failures(self):
        out = []
        seen = set()
        for n, k in self.generators:
            if k < 2:
                out.append("generator %s has degree %d < 2" % (n, k))
            for m in self.d[n]:
                if sum(m) == 1:
                    out.append("d(%s) has a linear term" % n)
                    break
            used = {self.gs.names[i] for m in self.d[n] for i, e in enumerate(m) if e}
            if not used <= seen:
                out.append("d(%s) uses later generators" % n)
            seen.add(n)
        return out

    @property
    def minimal(self):
        return not self.minimality_failures()

    def __repr__(self):
        return "SullivanAlgebra(%s)" % ", ".join(
            "%s(%d)%s" % (n, k, "" if not self.d[n] else ": d=" + self.gs.fmt_poly(self.d[n]))
            for n, k in self.generators)


@dataclass
class ModelMap:
    rho: CdgaMorphism
    quasi_iso_through: int


def quasi_iso_report(f, upto, hs=None, ht=None):
    """Per degree k <= upto: is H^k(f) an isomorphism?"""
    hs = hs or cohomology(f.source, upto)
    ht = ht or cohomology(f.target, upto)
    out = {}
    for k in range(upto + 1):
        m = induced_map(f, hs, ht, k)
        out[k] = m.rows == m.cols and la.rank(m) == m.rows
    return out


def _verified_through(report):
    k = -1
    while report.get(k + 1):
        k += 1
    return k


def _stack_rows(*mats):
    cols = mats[0].cols
    rows = []
    for m in mats:
        rows.extend(m.data)
    return Mat(len(rows), cols, rows)


def cone_classes(M, A, rho, k):
    """Stage-k data of a Hirsch extension along ``rho: M -> A``.

    Returns (z_list, a_list): pairs with dz = 0 and rho(z) = d a representing a
    basis of coker H^k(rho) (z = 0) followed by ker H^(k+1)(rho).
    """
    mk1, ak = M.dim(k + 1), A.dim(k)
    dz = M.d(k + 1)
    top = la.hstack([dz, Mat(dz.rows, ak)], rows=dz.rows)
    bottom = la.hstack([rho.maps[k + 1], -A.d(k)], rows=A.dim(k + 1))
    system = _stack_rows(top, bottom)
    cycles = la.kernel(system)
    bvecs = []
    dm, rm = M.d(k), rho.maps[k]
    for c in range(M.dim(k)):
        bvecs.append(dm.col(c) + rm.col(c))
    if k >= 1:
        da = A.d(k - 1)
        for c in range(A.dim(k - 1)):
            bvecs.append([ZERO] * mk1 + da.col(c))
    closed = la.intersect(cycles, la.Subspace(mk1 + ak, [[ZERO] * mk1 + [ONE if i == j else ZERO for i in range(ak)]
                                                        for j in range(ak)]))
    chosen = la.extend_basis(bvecs, closed.rows + cycles.rows, mk1 + ak)
    return [v[:mk1] for v in chosen], [v[mk1:] for v in chosen]


def minimal_model(a, n, prefix="v"):
    """Minimal Sullivan model of ``a`` through degree ``n``.

    Stage k adds degree-k generators for coker H^k and ker H^(k+1) of the map
    built so far.  The model is realized one degree beyond ``a.cap``.
    """
    if a.cap < n + 1:
        raise AlgebraError("cap %d too small for a model through degree %d (need >= %d)" % (a.cap, n, n + 1))
    h = cohomology(a, 1)
    if h.dims.get(0) != 1 or h.dims.get(1, 0) != 0:
        raise AlgebraError("algebra is not cohomologically 1-connected")
    cap = a.cap + 1
    m = SullivanAlgebra([], {}, cap)
    images = {}
    rho = from_generators(m.realized, a, images, cap=a.cap, check=False)
    for k in range(2, n + 1):
        M = m.realized
        zs, avs = cone_classes(M, a, rho, k)
        if not zs:
            continue
        new, nd = [], {}
        for i, (z, av) in enumerate(zip(zs, avs)):
            name = "%s%d_%d" % (prefix, k, i + 1)
            new.append((name, k))
            nd[name] = {M.normal[k + 1][t]: c for t, c in enumerate(z) if c}
            images[name] = av
        m = _extend_free(m, new, nd)
        rho = from_generators(m.realized, a, images, cap=a.cap, check=False)
    report = quasi_iso_report(rho, n)
    through = _verified_through(report)
    if through < n:
        raise AlgebraError("model check failed: H^%d(rho) is not an isomorphism" % (through + 1))
    return m, ModelMap(rho, through)


def _extend_free(m, new, nd):
    """Append generators; ``nd`` holds free polynomials in the old exponent layout."""
    gens = m.generators + new
    pad = len(new)
    d = {}
    for name, p in m.d.items():
        d[name] = {mono + (0,) * pad: c for mono, c in p.items()}
    for name, p in nd.items():
        d[name] = {mono + (0,) * pad: c for mono, c in p.items()}
    return SullivanAlgebra(gens, d, m.cap)


def lift(f, rho, cap=None):
    """``g: M -> U`` with ``rho . g == f`` for free ``M = f.source``.

    Solved generator by generator: d g(x) = g(dx) and rho(g(x)) = f(x).
    """
    M = f.source
    U = rho.source
    if not isinstance(M, MonomialCDGA) or M.relations:
        raise AlgebraError("lift needs a free source algebra")
    cap = min(f.cap, U.cap, rho.cap) if cap is None else cap
    gs = M.gs
    images = {}
    memo = {}
    for name, k in zip(gs.names, gs.degs):
        if k > cap:
            images[name] = U.zero(k) if k <= U.cap else []
            continue
        fx = f.maps[k].apply(M.generator_vec(name)[1])
        rows = [rho.maps[k]]
        rhs = list(fx)
        if k + 1 <= cap:
            dx = M.dgen[name]
            gdx = U.zero(k + 1)
            for mono, c in dx.items():
                v = image_of_mono(M, U, images, mono, memo)
                for t, x in enumerate(v):
                    gdx[t] += c * x
            rows.insert(0, U.d(k))
            rhs = gdx + rhs
        sys = _stack_rows(*rows)
        u = la.solve(sys, rhs)
        if u is None:
            raise LiftError("lift obstruction at degree %d (generator %s)" % (k, name))
        images[name] = u
    g = from_generators(M, U, images, cap=cap, check=False)
    comp = rho @ g
    for k in range(min(comp.cap, f.cap) + 1):
        if comp.maps[k] != f.maps[k]:
            raise LiftError("lift obstruction at degree %d (rho . g != f)" % k)
    return g


@dataclass
class LinearPart:
    maps: dict            # degree -> Mat  V^k -> W^k
    surjective: dict      # degree -> bool

    @property
    def all_surjective(self):
        return all(self.surjective.values())


def generator_coords(alg, name_order=None):
    """Per degree: indices of single-generator monomials in the normal basis."""
    out = {}
    gs = alg.gs
    for n, k in zip(gs.names, gs.degs):
        if k > alg.cap:
            continue
        idx = alg.normal_index[k].get(gs.gen(n))
        out.setdefault(k, []).append(idx)
    return out


def linear_part(phi):
    """Projection onto generators of phi restricted to generators."""
    S, T = phi.source, phi.target
    src = generator_coords(S)
    tgt = generator_coords(T)
    maps, surj = {}, {}
    for k in sorted(set(src) | set(tgt)):
        if k > phi.cap:
            continue
        cols = []
        for i in src.get(k, []):
            img = phi.maps[k].col(i)
            cols.append([img[j] for j in tgt.get(k, [])])
        m = Mat.from_cols(cols, len(tgt.get(k, [])))
        maps[k] = m
        surj[k] = la.is_surjective(m)
    return LinearPart(maps, surj)


@dataclass
class FormalityCertificate:
    model: SullivanAlgebra        # minimal model of the cohomology algebra
    model_map: ModelMap           # model -> H(a)
    psi: CdgaMorphism             # model -> a, iso in cohomology through `through`
    through: int


def formality_certificate(a, n):
    """Try to build a quasi-isomorphism from the model of H(a) to ``a``.

    Returns None when the greedy construction does not give an isomorphism
    in cohomology (inconclusive).
    """
    if a.is_zero_differential():
        m, mm = minimal_model(a, n)
        return FormalityCertificate(m, mm, mm.rho, mm.quasi_iso_through)
    if a.cap < n + 2:
        raise AlgebraError("need cap >= %d to read H^%d of an algebra with differential" % (n + 2, n + 1))
    H, h = cohomology_algebra(a)
    m, mm = minimal_model(H, n)
    M = m.realized
    gs = M.gs
    cap = min(M.cap, a.cap)
    images = {}
    memo = {}
    for name, k in zip(gs.names, gs.degs):
        if k > cap:
            continue
        cls = mm.rho.maps[k].apply(M.generator_vec(name)[1])
        rep = h.reps[k].apply(cls) if k <= h.top else a.zero(k)
        dx = M.dgen[name]
        if not dx:
            images[name] = rep
            continue
        target = a.zero(k + 1)
        for mono, c in dx.items():
            for t, x in enumerate(image_of_mono(M, a, images, mono, memo)):
                target[t] += c * x
        u = la.solve(a.d(k), target)
        if u is None:
            return None
        images[name] = [x + y for x, y in zip(u, rep)]
    psi = from_generators(M, a, images, cap=cap, check=False)
    rep = quasi_iso_report(psi, n)
    if not all(rep.values()):
        return None
    return FormalityCertificate(m, mm, psi, n)
