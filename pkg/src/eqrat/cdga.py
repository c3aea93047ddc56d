"""Truncated commutative differential graded algebras over Q.

Two concrete representations share one interface:

* :class:`MonomialCDGA` -- a presented algebra ``free(generators)/ideal``
  with a differential given on generators.  Basis elements are normal-form
  monomials.
* :class:`TableCDGA` -- an explicit basis per degree with sparse
  multiplication tables; used for wedges, pullbacks and cohomology algebras.

Every algebra is connected: degree 0 is spanned by the unit, basis index 0.
Vectors are plain lists of ``mpq``.
"""

import re
from dataclasses import dataclass

from . import linalg as la
from .linalg import Mat, ZERO, ONE, rat


class AlgebraError(ValueError):
    pass


class MorphismError(ValueError):
    pass


# ---------------------------------------------------------------------------
# free graded-commutative monomials


class GenSet:
    """Ordered generators with degrees; monomials are exponent tuples."""

    def __init__(self, gens):
        self.names = [g[0] for g in gens]
        self.degs = [int(g[1]) for g in gens]
        if len(set(self.names)) != len(self.names):
            raise AlgebraError("duplicate generator names")
        for n, d in zip(self.names, self.degs):
            if d < 1:
                raise AlgebraError("generator %s has degree %d < 1" % (n, d))
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_.:']*", n):
                raise AlgebraError("bad generator name %r" % n)
        self.index = {n: i for i, n in enumerate(self.names)}
        self.odd = [d % 2 == 1 for d in self.degs]
        self._mons = {}

    def __len__(self):
        return len(self.names)

    def gens(self):
        return list(zip(self.names, self.degs))

    def unit(self):
        return (0,) * len(self.names)

    def gen(self, name):
        i = self.index[name]
        return tuple(1 if j == i else 0 for j in range(len(self.names)))

    def deg(self, m):
        return sum(e * d for e, d in zip(m, self.degs))

    def mono_mul(self, m1, m2):
        """(sign, m1*m2) in canonical order; sign 0 when an odd square appears."""
        sign = 1
        odd = self.odd
        n = len(m1)
        # parity of pairs i > j with m1[i], m2[j] both odd
        suffix = 0
        for j in range(n - 1, -1, -1):
            if odd[j]:
                if m1[j] and m2[j]:
                    return 0, None
                if m2[j] and suffix % 2:
                    sign = -sign
                if m1[j]:
                    suffix += 1
        return sign, tuple(a + b for a, b in zip(m1, m2))

    @staticmethod
    def key(m):
        return (sum(m), tuple(-e for e in m))

    def monomials(self, k):
        """Monomials of degree k, ascending in graded-lex order."""
        if k in self._mons:
            return self._mons[k]
        out = []
        n = len(self.names)

        def rec(i, left, cur):
            if i == n:
                if left == 0:
                    out.append(tuple(cur))
                return
            d = self.degs[i]
            top = min(left // d, 1 if self.odd[i] else left // d)
            for e in range(top + 1):
                cur.append(e)
                rec(i + 1, left - e * d, cur)
                cur.pop()

        if k >= 0:
            rec(0, k, [])
        out.sort(key=self.key)
        self._mons[k] = out
        return out

    def fmt_mono(self, m):
        parts = []
        for e, name in zip(m, self.names):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append("%s^%d" % (name, e))
        return "*".join(parts) if parts else "1"

    # polynomials: dict mono -> mpq

    def poly_mul(self, p, q):
        out = {}
        for m1, c1 in p.items():
            for m2, c2 in q.items():
                s, m = self.mono_mul(m1, m2)
                if s:
                    out[m] = out.get(m, ZERO) + s * c1 * c2
        return {m: c for m, c in out.items() if c}

    def poly_add(self, p, q, c=ONE):
        out = dict(p)
        for m, x in q.items():
            out[m] = out.get(m, ZERO) + c * x
        return {m: x for m, x in out.items() if x}

    def poly_deg(self, p):
        degs = {self.deg(m) for m in p}
        if len(degs) > 1:
            raise AlgebraError("inhomogeneous polynomial %s" % self.fmt_poly(p))
        return degs.pop() if degs else None

    def fmt_poly(self, p):
        if not p:
            return "0"
        out = []
        for m in sorted(p, key=self.key):
            c = p[m]
            mono = self.fmt_mono(m)
            if mono == "1":
                term = str(abs(c))
            elif abs(c) == 1:
                term = mono
            else:
                term = "%s*%s" % (abs(c), mono)
            if not out:
                out.append(("-" if c < 0 else "") + term)
            else:
                out.append(("- " if c < 0 else "+ ") + term)
        return " ".join(out)

    def parse(self, s):
        """Parse a polynomial string such as ``"2*x1*y1 - 1/3*x^2"``."""
        if isinstance(s, dict):
            return s
        text = re.sub(r"\s+", "", str(s))
        while re.search(r"[+-]{2}", text):
            text = re.sub(r"[+-]{2}", lambda m: "+" if m.group(0) in ("++", "--") else "-", text)
        if text in ("", "0"):
            return {}
        terms = re.findall(r"[+-]?[^+-]+", text)
        if "".join(terms) != text:
            raise AlgebraError("cannot parse polynomial %r" % s)
        out = {}
        for t in terms:
            sign = ONE
            if t[0] in "+-":
                if t[0] == "-":
                    sign = -ONE
                t = t[1:]
            coef = sign
            mono = self.unit()
            for factor in t.split("*"):
                if not factor:
                    raise AlgebraError("empty factor in %r" % s)
                if re.fullmatch(r"\d+(/\d+)?", factor):
                    coef *= rat(factor)
                    continue
                mt = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_.:']*)(\^(\d+))?", factor)
                if not mt or mt.group(1) not in self.index:
                    raise AlgebraError("unknown generator %r in %r" % (factor, s))
                g = self.gen(mt.group(1))
                for _ in range(int(mt.group(3) or 1)):
                    sg, mono2 = self.mono_mul(mono, g)
                    if not sg:
                        coef = ZERO
                        break
                    coef *= sg
                    mono = mono2
            if coef:
                out[mono] = out.get(mono, ZERO) + coef
        return {m: c for m, c in out.items() if c}


# ---------------------------------------------------------------------------
# algebras


def _vec_add(acc, sparse, c):
    for i, x in sparse.items():
        acc[i] += c * x


class CDGA:
    """Common interface.  Subclasses fill ``cap``, ``names`` and implement
    ``_mul_basis`` and ``_diff``."""

    one_connected = True

    def dim(self, k):
        if k < 0 or k > self.cap:
            return 0
        return len(self.names[k])

    def dims(self):
        return {k: self.dim(k) for k in range(self.cap + 1) if self.dim(k)}

    def zero(self, k):
        return [ZERO] * self.dim(k)

    def unit(self):
        return [ONE]

    def basis_vec(self, k, i):
        v = self.zero(k)
        v[i] = ONE
        return v

    def mul_basis(self, i, a, j, b):
        """Sparse product of basis elements (i, a) and (j, b)."""
        if i + j > self.cap:
            return {}
        if i == 0:
            return {b: ONE}
        if j == 0:
            return {a: ONE}
        key = (i, a, j, b)
        c = self._cache.get(key)
        if c is None:
            c = self._mul_basis(i, a, j, b)
            self._cache[key] = c
        return c

    def mul(self, i, u, j, v):
        out = self.zero(i + j)
        if i + j > self.cap:
            return out
        for a, x in enumerate(u):
            if not x:
                continue
            for b, y in enumerate(v):
                if y:
                    _vec_add(out, self.mul_basis(i, a, j, b), x * y)
        return out

    def d(self, k):
        """Differential A^k -> A^(k+1); for k == cap an empty 0-row matrix."""
        if k >= self.cap:
            return Mat(0, self.dim(k))
        m = self._dcache.get(k)
        if m is None:
            m = self._diff(k)
            self._dcache[k] = m
        return m

    def is_zero_differential(self):
        return all(self.d(k).is_zero() for k in range(self.cap))

    def _init_caches(self):
        self._cache = {}
        self._dcache = {}

    def label(self, k, i):
        return self.names[k][i]


class MonomialCDGA(CDGA):
    """``free(gens) / (relations)`` truncated at ``cap`` with ``d`` on generators."""

    def __init__(self, gens, relations=(), differential=None, cap=10, check=True):
        self.gs = gens if isinstance(gens, GenSet) else GenSet(gens)
        self.cap = cap
        self._init_caches()
        gs = self.gs
        self.relations = [gs.parse(r) for r in relations]
        self.relations = [r for r in self.relations if r]
        for r in self.relations:
            gs.poly_deg(r)
        self.dgen = {}
        for n, dg in zip(gs.names, gs.degs):
            p = gs.parse((differential or {}).get(n, "0"))
            if p and gs.poly_deg(p) != dg + 1:
                raise AlgebraError("d(%s) must have degree %d" % (n, dg + 1))
            self.dgen[n] = p
        self._dmono = {}
        self._build_normal_forms()
        if check:
            self._check_relations()

    def _build_normal_forms(self):
        gs = self.gs
        self.normal = {}
        self.normal_index = {}
        self.reduce = {}
        self.names = {}
        for k in range(self.cap + 1):
            mons = gs.monomials(k)
            N = len(mons)
            idx = {m: i for i, m in enumerate(mons)}
            rows = []
            for r in self.relations:
                dr = gs.deg(next(iter(r)))
                if dr > k:
                    continue
                for m in gs.monomials(k - dr):
                    prod = gs.poly_mul({m: ONE}, r)
                    if prod:
                        row = [ZERO] * N
                        for mm, c in prod.items():
                            row[N - 1 - idx[mm]] = c
                        rows.append(row)
            piv = la._rref_rows(rows, N) if rows else []
            rows = rows[:len(piv)]
            pivset = {N - 1 - p for p in piv}
            normal = [m for i, m in enumerate(mons) if i not in pivset]
            nidx = {m: i for i, m in enumerate(normal)}
            red = {}
            for m in normal:
                red[m] = {nidx[m]: ONE}
            for p, row in zip(piv, rows):
                m = mons[N - 1 - p]
                sp = {}
                for c, x in enumerate(row):
                    if x and c != p:
                        sp[nidx[mons[N - 1 - c]]] = -x
                red[m] = sp
            self.normal[k] = normal
            self.normal_index[k] = nidx
            self.reduce[k] = red
            self.names[k] = [gs.fmt_mono(m) for m in normal]

    def reduce_poly(self, p, k=None):
        """Coordinates of a free polynomial in the normal basis."""
        if k is None:
            k = self.gs.poly_deg(p)
            if k is None:
                return None
        out = self.zero(k)
        if k > self.cap:
            return out
        red = self.reduce[k]
        for m, c in p.items():
            _vec_add(out, red[m], c)
        return out

    def element(self, s):
        """Parse a polynomial string to (degree, vector)."""
        p = self.gs.parse(s)
        k = self.gs.poly_deg(p)
        if k is None:
            raise AlgebraError("cannot infer degree of zero element %r" % s)
        return k, self.reduce_poly(p, k)

    def _mul_basis(self, i, a, j, b):
        s, m = self.gs.mono_mul(self.normal[i][a], self.normal[j][b])
        if not s:
            return {}
        r = self.reduce[i + j][m]
        return {t: s * c for t, c in r.items()} if s != 1 else r

    def dmono(self, m):
        """d of a monomial as a free polynomial (Leibniz, left to right)."""
        if m in self._dmono:
            return self._dmono[m]
        gs = self.gs
        i = next((t for t, e in enumerate(m) if e), None)
        if i is None:
            out = {}
        else:
            g = gs.gen(gs.names[i])
            rest = tuple(e - 1 if t == i else e for t, e in enumerate(m))
            out = gs.poly_mul(self.dgen[gs.names[i]], {rest: ONE})
            if any(rest):
                sgn = -ONE if gs.odd[i] else ONE
                out = gs.poly_add(out, gs.poly_mul({g: ONE}, self.dmono(rest)), sgn)
        self._dmono[m] = out
        return out

    def dpoly(self, p):
        out = {}
        for m, c in p.items():
            out = self.gs.poly_add(out, self.dmono(m), c)
        return out

    def _diff(self, k):
        cols = [self.reduce_poly(self.dmono(m), k + 1) for m in self.normal[k]]
        return Mat.from_cols(cols, self.dim(k + 1))

    def _check_relations(self):
        gs = self.gs
        for r in self.relations:
            k = gs.deg(next(iter(r)))
            if k + 1 <= self.cap and any(self.reduce_poly(self.dpoly(r), k + 1)):
                raise AlgebraError("differential does not preserve relation %s" % gs.fmt_poly(r))
        for n, dg in zip(gs.names, gs.degs):
            if dg + 2 <= self.cap:
                dd = self.dpoly(self.dgen[n])
                if any(self.reduce_poly(dd, dg + 2)):
                    raise AlgebraError("d^2(%s) != 0" % n)

    def generator_vec(self, name):
        k = self.gs.degs[self.gs.index[name]]
        return k, self.reduce_poly({self.gs.gen(name): ONE}, k)

    def with_cap(self, cap):
        return MonomialCDGA(self.gs, self.relations, self.dgen, cap, check=False)

    def presentation(self):
        gs = self.gs
        return Presentation(gs.gens(), [gs.fmt_poly(r) for r in self.relations],
                            {n: gs.fmt_poly(p) for n, p in self.dgen.items() if p}, self.cap)

    def __repr__(self):
        return "MonomialCDGA(%s, cap=%d, dims=%s)" % (self.gs.gens(), self.cap, self.dims())


class TableCDGA(CDGA):
    """Explicit basis with sparse multiplication tables.

    ``names[k]`` lists basis labels (``names[0] == ["1"]``);
    ``table[(i, j)][a][b]`` is a sparse dict in degree i+j (i, j >= 1);
    ``diffs[k]`` is the matrix A^k -> A^(k+1).
    """

    def __init__(self, names, table, diffs, cap):
        self.cap = cap
        self.names = {k: list(names.get(k, [])) for k in range(cap + 1)}
        if self.names[0] != ["1"] and len(self.names[0]) != 1:
            raise AlgebraError("degree 0 must be one-dimensional")
        self.table = table
        self.diffs = diffs
        self._init_caches()

    def _mul_basis(self, i, a, j, b):
        t = self.table.get((i, j))
        if t is None:
            return {}
        return t[a][b]

    def _diff(self, k):
        m = self.diffs.get(k)
        if m is None:
            return Mat(self.dim(k + 1), self.dim(k))
        return m

    def __repr__(self):
        return "TableCDGA(cap=%d, dims=%s)" % (self.cap, self.dims())


def to_table(a, cap=None):
    """Multiplication tables of ``a`` through ``cap``."""
    cap = a.cap if cap is None else cap
    names = {k: list(a.names[k]) for k in range(cap + 1)}
    table = {}
    for i in range(1, cap + 1):
        for j in range(1, cap + 1 - i):
            if a.dim(i) and a.dim(j):
                table[(i, j)] = [[dict(a.mul_basis(i, x, j, y)) for y in range(a.dim(j))]
                                 for x in range(a.dim(i))]
    diffs = {k: a.d(k) for k in range(cap)}
    return TableCDGA(names, table, diffs, cap)


def table_from_product(names, product, diffs, cap):
    """TableCDGA from a function ``product(i, a, j, b) -> vector``."""
    table = {}
    for i in range(1, cap + 1):
        for j in range(1, cap + 1 - i):
            if names.get(i) and names.get(j):
                rows = []
                for x in range(len(names[i])):
                    row = []
                    for y in range(len(names[j])):
                        v = product(i, x, j, y)
                        row.append({t: c for t, c in enumerate(v) if c})
                    rows.append(row)
                table[(i, j)] = rows
    return TableCDGA(names, table, diffs, cap)


@dataclass
class Presentation:
    generators: list
    relations: list
    differential: dict
    cap: int


def realize(p):
    if p.cap < 0:
        raise AlgebraError("cap must be >= 0")
    return MonomialCDGA(p.generators, p.relations, p.differential, p.cap)


def free(gens, differential=None, cap=10):
    return MonomialCDGA(gens, (), differential, cap)


def trivial(cap):
    """The ground field Q as a CDGA."""
    return TableCDGA({0: ["1"]}, {}, {}, cap)


# ---------------------------------------------------------------------------
# morphisms


class CdgaMorphism:
    """Degreewise matrices ``maps[k]: source^k -> target^k`` for k <= cap."""

    def __init__(self, source, target, maps, cap=None):
        self.source = source
        self.target = target
        self.cap = min(source.cap, target.cap) if cap is None else cap
        self.maps = {}
        for k in range(self.cap + 1):
            m = maps.get(k)
            if m is None:
                m = Mat(target.dim(k), source.dim(k))
            if (m.rows, m.cols) != (target.dim(k), source.dim(k)):
                raise MorphismError("degree %d: map is %dx%d, expected %dx%d"
                                    % (k, m.rows, m.cols, target.dim(k), source.dim(k)))
            self.maps[k] = m

    def apply(self, k, v):
        return self.maps[k].apply(v)

    def __matmul__(self, other):
        """Composite self . other."""
        cap = min(self.cap, other.cap)
        return CdgaMorphism(other.source, self.target,
                            {k: self.maps[k] @ other.maps[k] for k in range(cap + 1)}, cap)

    def __eq__(self, other):
        return (isinstance(other, CdgaMorphism) and self.cap == other.cap
                and all(self.maps[k] == other.maps[k] for k in range(self.cap + 1)))

    def failures(self, products=True, upto=None):
        """List of violated morphism axioms (empty when valid)."""
        out = []
        cap = self.cap if upto is None else min(upto, self.cap)
        s, t = self.source, self.target
        if self.maps[0].apply([ONE]) != [ONE]:
            out.append("unit not preserved")
        for k in range(cap):
            left = self.maps[k + 1] @ s.d(k)
            right = t.d(k) @ self.maps[k]
            if left != right:
                out.append("does not commute with d in degree %d" % k)
        if products:
            for i in range(1, cap + 1):
                for j in range(i, cap + 1 - i):
                    for a in range(s.dim(i)):
                        fa = self.maps[i].col(a)
                        for b in range(s.dim(j)):
                            ab = s.zero(i + j)
                            _vec_add(ab, s.mul_basis(i, a, j, b), ONE)
                            left = self.maps[i + j].apply(ab)
                            right = t.mul(i, fa, j, self.maps[j].col(b))
                            if left != right:
                                out.append("not multiplicative on (%s, %s)" % (s.label(i, a), s.label(j, b)))
                                break
                        else:
                            continue
                        break
        return out

    def check(self, products=True):
        f = self.failures(products)
        if f:
            raise MorphismError(f[0])
        return self

    def is_surjective(self, k):
        return la.is_surjective(self.maps[k])


def identity_morphism(a):
    return CdgaMorphism(a, a, {k: Mat.identity(a.dim(k)) for k in range(a.cap + 1)})


def image_of_mono(src, tgt, images, m, memo):
    """Image of a free monomial under the algebra map given on generators."""
    if m in memo:
        return memo[m]
    gs = src.gs
    i = next((t for t, e in enumerate(m) if e), None)
    if i is None:
        out = tgt.unit()
    else:
        rest = tuple(e - 1 if t == i else e for t, e in enumerate(m))
        gdeg = gs.degs[i]
        out = tgt.mul(gdeg, images[gs.names[i]], gs.deg(rest), image_of_mono(src, tgt, images, rest, memo))
    memo[m] = out
    return out


def from_generators(src, tgt, images, cap=None, check=True):
    """Algebra map out of a MonomialCDGA determined by generator images.

    ``images`` maps generator names to target vectors or polynomial strings
    (strings require a MonomialCDGA target).  Relations must map to zero.
    """
    gs = src.gs
    cap = min(src.cap, tgt.cap) if cap is None else cap
    imgs = {}
    for n, dg in zip(gs.names, gs.degs):
        v = images.get(n, 0)
        if isinstance(v, (str, dict)) or v == 0:
            if isinstance(tgt, MonomialCDGA):
                p = tgt.gs.parse(v if v != 0 else "0")
                k = tgt.gs.poly_deg(p)
                if k is not None and k != dg:
                    raise MorphismError("image of %s has degree %d, expected %d" % (n, k, dg))
                v = tgt.reduce_poly(p, dg) if dg <= tgt.cap else []
            elif v == 0 or v == "0":
                v = tgt.zero(dg)
            else:
                raise MorphismError("string images need a presented target")
        v = list(v)
        if dg <= tgt.cap and len(v) != tgt.dim(dg):
            raise MorphismError("image of %s has wrong length" % n)
        imgs[n] = v
    memo = {}
    maps = {}
    for k in range(cap + 1):
        cols = [image_of_mono(src, tgt, imgs, m, memo) for m in src.normal[k]]
        maps[k] = Mat.from_cols(cols, tgt.dim(k))
    if check:
        for r in src.relations:
            k = gs.deg(next(iter(r)))
            if k > cap:
                continue
            v = tgt.zero(k)
            for m, c in r.items():
                for t, x in enumerate(image_of_mono(src, tgt, imgs, m, memo)):
                    v[t] += c * x
            if any(v):
                raise MorphismError("relation %s does not map to zero" % gs.fmt_poly(r))
        for n, dg in zip(gs.names, gs.degs):
            if dg + 1 > cap:
                continue
            lhs = maps[dg + 1].apply(src.reduce_poly(src.dgen[n], dg + 1)) if src.dgen[n] else tgt.zero(dg + 1)
            rhs = tgt.d(dg).apply(imgs[n])
            if lhs != rhs:
                raise MorphismError("map does not commute with d on %s" % n)
    f = CdgaMorphism(src, tgt, maps, cap)
    f.images = imgs
    return f


# ---------------------------------------------------------------------------
# cohomology


@dataclass
class Cohomology:
    algebra: object
    top: int              # highest degree with trustworthy data
    dims: dict
    reps: dict            # k -> Mat whose columns are representative cocycles
    proj: dict            # k -> Mat sending a cocycle to its class coordinates
    cycles: dict
    boundaries: dict

    def class_of(self, k, z):
        return self.proj[k].apply(z)

    def rep(self, k, c):
        return self.reps[k].apply(c)


def cohomology(a, upto=None):
    """H^k(a) for k <= cap - 1 (degree cap is a boundary degree)."""
    top = a.cap - 1 if upto is None else min(upto, a.cap - 1)
    dims, reps, proj, cycles, bounds = {}, {}, {}, {}, {}
    for k in range(top + 1):
        n = a.dim(k)
        Z = la.kernel(a.d(k)) if n else la.Subspace(0)
        B = la.image(a.d(k - 1)) if k > 0 and n else la.Subspace(n)
        chosen = la.extend_basis(B.rows, Z.rows, n)
        h = len(chosen)
        R = Mat.from_cols(chosen, n)
        if h:
            full = la.hstack([R, B.basis]) if B.dim else R
            L = la.left_inverse_zero_on_complement(full)
            P = Mat(h, n, [list(r) for r in L.data[:h]])
        else:
            P = Mat(0, n)
        dims[k] = h
        reps[k] = R
        proj[k] = P
        cycles[k] = Z
        bounds[k] = B
    return Cohomology(a, top, dims, reps, proj, cycles, bounds)


def cohomology_dims(a, upto=None):
    h = cohomology(a, upto)
    return {k: d for k, d in h.dims.items() if d}


def induced_map(f, hs, ht, k):
    """H^k(f) as a matrix between class coordinates."""
    return ht.proj[k] @ f.maps[k] @ hs.reps[k]


def cohomology_algebra(a, upto=None, h=None):
    """H(a) as a zero-differential TableCDGA with cap ``upto`` (default cap-1)."""
    h = h or cohomology(a, upto)
    cap = h.top if upto is None else upto
    names = {k: ["[%d.%d]" % (k, i) for i in range(h.dims.get(k, 0))] for k in range(cap + 1)}
    names[0] = ["1"]

    def product(i, x, j, y):
        z = a.mul(i, h.reps[i].col(x), j, h.reps[j].col(y))
        return h.proj[i + j].apply(z)

    return table_from_product(names, product, {}, cap), h


# ---------------------------------------------------------------------------
# wedge, pullback, retractions


def wedge(a, b):
    """(A + B)/(1_A - 1_B): degreewise sum in positive degrees, cross products 0."""
    if a.cap != b.cap:
        raise AlgebraError("wedge needs equal caps (%d vs %d)" % (a.cap, b.cap))
    cap = a.cap
    names = {0: ["1"]}
    for k in range(1, cap + 1):
        na, nb = a.names[k], b.names[k]
        clash = set(na) & set(nb)
        if clash:
            na = ["a." + x for x in na]
            nb = ["b." + x for x in nb]
        names[k] = list(na) + list(nb)
    table = {}
    for i in range(1, cap + 1):
        for j in range(1, cap + 1 - i):
            da_i, db_i, da_j, db_j = a.dim(i), b.dim(i), a.dim(j), b.dim(j)
            if not (da_i + db_i and da_j + db_j):
                continue
            off = a.dim(i + j)
            rows = []
            for x in range(da_i + db_i):
                row = []
                for y in range(da_j + db_j):
                    if x < da_i and y < da_j:
                        row.append(a.mul_basis(i, x, j, y))
                    elif x >= da_i and y >= da_j:
                        row.append({off + t: c for t, c in b.mul_basis(i, x - da_i, j, y - da_j).items()})
                    else:
                        row.append({})
                rows.append(row)
            table[(i, j)] = rows
    diffs = {}
    for k in range(cap):
        if k == 0:
            diffs[0] = Mat(a.dim(1) + b.dim(1), 1)
        else:
            diffs[k] = la.block_diag([a.d(k), b.d(k)])
    w = TableCDGA(names, table, diffs, cap)
    w.summands = (a, b)
    return w


def wedge_morphisms(f, g, source=None, target=None):
    """f v g between wedges of the sources and targets."""
    source = source or wedge(f.source, g.source)
    target = target or wedge(f.target, g.target)
    cap = min(f.cap, g.cap)
    maps = {0: Mat.identity(1)}
    for k in range(1, cap + 1):
        maps[k] = la.block_diag([f.maps[k], g.maps[k]])
    return CdgaMorphism(source, target, maps, cap)


def inclusion_into_wedge(a, b, w, side):
    maps = {0: Mat.identity(1)}
    for k in range(1, w.cap + 1):
        da, db = a.dim(k), b.dim(k)
        m = Mat(da + db, da if side == 0 else db)
        for i in range(m.cols):
            m.data[i if side == 0 else da + i][i] = ONE
        maps[k] = m
    return CdgaMorphism(a if side == 0 else b, w, maps)


@dataclass
class Pullback:
    algebra: TableCDGA
    pi1: CdgaMorphism
    pi2: CdgaMorphism
    spaces: dict       # k -> Subspace of A^k + B^k
    f: CdgaMorphism
    g: CdgaMorphism

    def mediate(self, h, e):
        """tau: D -> K with pi1 tau = h and pi2 tau = e."""
        cap = min(h.cap, e.cap, self.algebra.cap)
        maps = {}
        for k in range(cap + 1):
            cols = []
            for c in range(h.source.dim(k)):
                v = h.maps[k].col(c) + e.maps[k].col(c)
                co = self.spaces[k].coords(v)
                if co is None:
                    raise MorphismError("h and e do not agree over the base in degree %d" % k)
                cols.append(co)
            maps[k] = Mat.from_cols(cols, self.algebra.dim(k))
        return CdgaMorphism(h.source, self.algebra, maps, cap)


def pullback(f, g):
    if f.target is not g.target:
        raise MorphismError("pullback needs a common target")
    A, B = f.source, g.source
    cap = min(f.cap, g.cap)
    spaces = {}
    names = {}
    for k in range(cap + 1):
        M = la.hstack([f.maps[k], -g.maps[k]], rows=f.target.dim(k))
        vecs = la.kernel_vectors(M)
        if k == 0:
            vecs = [[ONE, ONE]]
        spaces[k] = la.Subspace(A.dim(k) + B.dim(k), vecs)
        names[k] = ["k%d.%d" % (k, i) for i in range(spaces[k].dim)]
    names[0] = ["1"]
    da = {k: A.dim(k) for k in range(cap + 1)}

    def split(k, v):
        return v[:da[k]], v[da[k]:]

    def product(i, x, j, y):
        a1, b1 = split(i, spaces[i].rows[x])
        a2, b2 = split(j, spaces[j].rows[y])
        v = A.mul(i, a1, j, a2) + B.mul(i, b1, j, b2)
        return spaces[i + j].coords(v)

    diffs = {}
    for k in range(cap):
        cols = []
        for x in range(spaces[k].dim):
            a1, b1 = split(k, spaces[k].rows[x])
            v = A.d(k).apply(a1) + B.d(k).apply(b1)
            cols.append(spaces[k + 1].coords(v))
        diffs[k] = Mat.from_cols(cols, spaces[k + 1].dim)
    K = table_from_product(names, product, diffs, cap)
    p1, p2 = {}, {}
    for k in range(cap + 1):
        basis = spaces[k].basis
        p1[k] = Mat(da[k], basis.cols, [list(r) for r in basis.data[:da[k]]])
        p2[k] = Mat(B.dim(k), basis.cols, [list(r) for r in basis.data[da[k]:]])
    return Pullback(K, CdgaMorphism(K, A, p1, cap), CdgaMorphism(K, B, p2, cap), spaces, f, g)


@dataclass
class RetractionWitness:
    r: CdgaMorphism
    i: CdgaMorphism


def verify_retraction(r, i, products=True):
    for name, f in (("r", r), ("i", i)):
        bad = f.failures(products)
        if bad:
            raise MorphismError("%s is not a morphism: %s" % (name, bad[0]))
    comp = r @ i
    for k in range(comp.cap + 1):
        if comp.maps[k] != Mat.identity(comp.source.dim(k)):
            raise MorphismError("r.i != id in degree %d" % k)
    return RetractionWitness(r, i)


# ---------------------------------------------------------------------------
# invariant battery


def battery(a, upto=None):
    """Violations of the graded-commutative dga axioms, as strings."""
    cap = a.cap if upto is None else min(upto, a.cap)
    out = []
    if a.dim(0) != 1:
        out.append("degree 0 is not one-dimensional")
    for i in range(1, cap + 1):
        for j in range(i, cap + 1 - i):
            sign = -1 if (i * j) % 2 else 1
            for x in range(a.dim(i)):
                for y in range(a.dim(j)):
                    u = a.mul_basis(i, x, j, y)
                    v = a.mul_basis(j, y, i, x)
                    if set(u) != set(v) or any(u[t] != sign * v[t] for t in u):
                        out.append("graded commutativity fails on (%s, %s)" % (a.label(i, x), a.label(j, y)))
    for i in range(1, cap + 1):
        for j in range(1, cap + 1 - i):
            for l in range(1, cap + 1 - i - j):
                for x in range(a.dim(i)):
                    for y in range(a.dim(j)):
                        xy = a.zero(i + j)
                        _vec_add(xy, a.mul_basis(i, x, j, y), ONE)
                        for z in range(a.dim(l)):
                            left = a.mul(i + j, xy, l, a.basis_vec(l, z))
                            yz = a.zero(j + l)
                            _vec_add(yz, a.mul_basis(j, y, l, z), ONE)
                            right = a.mul(i, a.basis_vec(i, x), j + l, yz)
                            if left != right:
                                out.append("associativity fails on (%s, %s, %s)"
                                           % (a.label(i, x), a.label(j, y), a.label(l, z)))
    for k in range(cap - 1):
        if not (a.d(k + 1) @ a.d(k)).is_zero():
            out.append("d^2 != 0 in degree %d" % k)
    if cap >= 1 and not a.d(0).is_zero():
        out.append("d(1) != 0")
    for i in range(1, cap):
        for j in range(1, cap - i):
            sign = -ONE if i % 2 else ONE
            for x in range(a.dim(i)):
                ex = a.basis_vec(i, x)
                dx = a.d(i).col(x)
                for y in range(a.dim(j)):
                    ey = a.basis_vec(j, y)
                    prod = a.zero(i + j)
                    _vec_add(prod, a.mul_basis(i, x, j, y), ONE)
                    left = a.d(i + j).apply(prod)
                    r1 = a.mul(i + 1, dx, j, ey)
                    r2 = a.mul(i, ex, j + 1, a.d(j).col(y))
                    right = [p + sign * q for p, q in zip(r1, r2)]
                    if left != right:
                        out.append("Leibniz fails on (%s, %s)" % (a.label(i, x), a.label(j, y)))
    return out


def is_one_connected(a):
    """H^0 = Q and H^1 = 0 (needs cap >= 2)."""
    h = cohomology(a, 1)
    return h.dims.get(0, 0) == 1 and h.dims.get(1, 0) == 0


# ---------------------------------------------------------------------------
# presentations of derived algebras


def vec_to_poly(alg, k, v):
    """Vector in a MonomialCDGA as a free polynomial over its normal monomials."""
    return {alg.normal[k][t]: c for t, c in enumerate(v) if c}


def table_to_presented(a):
    """A MonomialCDGA isomorphic to ``a``: basis elements become generators,
    products become relations."""
    if isinstance(a, MonomialCDGA):
        return a
    gens = []
    pos = {}
    for k in range(1, a.cap + 1):
        for i in range(a.dim(k)):
            name = "b%d_%d" % (k, i + 1)
            pos[(k, i)] = name
            gens.append((name, k))
    gs = GenSet(gens)

    def lin(k, v):
        return " + ".join("%s*%s" % (c, pos[(k, t)]) for t, c in enumerate(v) if c) or "0"

    rels = []
    for i in range(1, a.cap + 1):
        for j in range(i, a.cap + 1 - i):
            for x in range(a.dim(i)):
                for y in range(a.dim(j)):
                    if i == j and y < x:
                        continue
                    prod = a.zero(i + j)
                    _vec_add(prod, a.mul_basis(i, x, j, y), ONE)
                    p = gs.parse("%s*%s" % (pos[(i, x)], pos[(j, y)]))
                    p = gs.poly_add(p, gs.parse(lin(i + j, prod)), -ONE)
                    if p:
                        rels.append(p)
    diff = {}
    for k in range(1, a.cap):
        D = a.d(k)
        for i in range(a.dim(k)):
            col = D.col(i)
            if any(col):
                diff[pos[(k, i)]] = gs.parse(lin(k + 1, col))
    out = MonomialCDGA(gs, rels, diff, a.cap)
    if out.dims() != a.dims():
        raise AlgebraError("table algebra is not associative/commutative enough to present")
    return out


def wedge_presented(a, b):
    """Wedge of two presented algebras as a presentation.

    Returns (w, ren_a, ren_b) with the generator renamings used on a clash.
    """
    if a.cap != b.cap:
        raise AlgebraError("wedge needs equal caps (%d vs %d)" % (a.cap, b.cap))
    na, nb = a.gs.names, b.gs.names
    clash = set(na) & set(nb)
    ren_a = {n: ("a." + n if clash else n) for n in na}
    ren_b = {n: ("b." + n if clash else n) for n in nb}
    gens = [(ren_a[n], k) for n, k in a.gs.gens()] + [(ren_b[n], k) for n, k in b.gs.gens()]
    gs = GenSet(gens)
    la_, lb = len(na), len(nb)

    def emb_a(p):
        return {m + (0,) * lb: c for m, c in p.items()}

    def emb_b(p):
        return {(0,) * la_ + m: c for m, c in p.items()}

    rels = [emb_a(r) for r in a.relations] + [emb_b(r) for r in b.relations]
    for x in na:
        for y in nb:
            rels.append(gs.parse("%s*%s" % (ren_a[x], ren_b[y])))
    diff = {ren_a[n]: emb_a(p) for n, p in a.dgen.items()}
    diff.update({ren_b[n]: emb_b(p) for n, p in b.dgen.items()})
    w = MonomialCDGA(gs, rels, diff, a.cap)
    w.summand_layout = (emb_a, emb_b)
    return w, ren_a, ren_b
