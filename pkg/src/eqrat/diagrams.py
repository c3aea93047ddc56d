"""Diagrams of graded vector spaces over the subgroup posets of C_p and C_pq.

For cyclic groups the orbit category reduces (up to the Weyl actions,
which never change dimensions here) to the subgroup poset, so a diagram is
just a functor on that poset: a graded space per level and a degreewise
matrix per covering arrow ``H -> K`` (``H`` a subgroup of ``K``).

Injectivity is decided by the corner-kernel decomposition
``V_H = intersection of ker(H -> K) over K > H`` and the embedding into
``sum_H V_H`` placed on the down-set of ``H``.  An independent check by
brute-force lifting lives in :func:`lifting_oracle`.
"""

import random
from dataclasses import dataclass, field

from . import linalg as la
from .linalg import Mat, ZERO, ONE


class ShapeError(ValueError):
    pass


class ResolutionError(RuntimeError):
    pass


class NotInjectiveError(ValueError):
    pass


def _is_prime(n):
    return n > 1 and all(n % d for d in range(2, int(n ** 0.5) + 1))


class OrbitShape:
    """Subgroup poset of C_p (levels e, G) or C_pq (levels e, P, Q, G)."""

    def __init__(self, p, q=None):
        if not _is_prime(p) or (q is not None and (not _is_prime(q) or q == p)):
            raise ShapeError("need distinct primes, got p=%r q=%r" % (p, q))
        self.p = p
        self.q = q
        if q is None:
            self.kind = "CyclicP"
            self.levels = ("e", "G")
            self.arrows = (("e", "G"),)
            self.order = {"e": 1, "G": p}
        else:
            self.kind = "CyclicPQ"
            self.levels = ("e", "P", "Q", "G")
            self.arrows = (("e", "P"), ("e", "Q"), ("P", "G"), ("Q", "G"))
            self.order = {"e": 1, "P": p, "Q": q, "G": p * q}

    @classmethod
    def cyclic(cls, p):
        return cls(p)

    @classmethod
    def cyclic_pq(cls, p, q):
        return cls(p, q)

    def __eq__(self, other):
        return isinstance(other, OrbitShape) and (self.p, self.q) == (other.p, other.q)

    def __hash__(self):
        return hash((self.p, self.q))

    def __repr__(self):
        if self.q is None:
            return "OrbitShape(C_%d)" % self.p
        return "OrbitShape(C_%d x C_%d)" % (self.p, self.q)

    def leq(self, a, b):
        """``a`` is a subgroup of ``b``."""
        return self.order[b] % self.order[a] == 0

    def up(self, a):
        return [b for b in self.levels if self.leq(a, b)]

    def down(self, b):
        return [a for a in self.levels if self.leq(a, b)]

    def out_arrows(self, a):
        return [t for (s, t) in self.arrows if s == a]

    def top_down(self):
        """Levels ordered from G down to e (every level after all levels above it)."""
        return sorted(self.levels, key=lambda L: -self.order[L])

    def path(self, a, b):
        """Covering arrows of a chosen path a -> ... -> b."""
        if not self.leq(a, b):
            raise ShapeError("%s is not below %s" % (a, b))
        out = []
        cur = a
        while cur != b:
            nxt = [t for t in self.out_arrows(cur) if self.leq(t, b)][0]
            out.append((cur, nxt))
            cur = nxt
        return out

    def up_closed_subsets(self, a):
        """Nonempty up-closed subsets of the up-set of ``a`` (as frozensets)."""
        ups = self.up(a)
        out = []
        n = len(ups)
        for mask in range(1, 1 << n):
            s = {ups[i] for i in range(n) if mask >> i & 1}
            if all(c in s for b in s for c in self.up(b)):
                out.append(frozenset(s))
        return out

    def to_json(self):
        return {"p": self.p} if self.q is None else {"p": self.p, "q": self.q}


class DiagramOfGVS:
    """Functor from the subgroup poset to finite-dimensional graded Q-spaces.

    ``dims[L][k]`` is the dimension at level ``L`` in degree ``k``;
    ``maps[(L, K)][k]`` is the (dims[K][k] x dims[L][k]) matrix of the
    covering arrow ``L -> K``.  Missing entries mean zero.
    """

    def __init__(self, shape, dims, maps, labels=None, check=True):
        self.shape = shape
        self.dims = {L: {k: n for k, n in dims.get(L, {}).items() if n} for L in shape.levels}
        self.maps = {}
        for a in shape.arrows:
            src, tgt = a
            given = maps.get(a, {})
            self.maps[a] = {}
            for k in self.degrees:
                m = given.get(k)
                if m is None:
                    m = Mat(self.dim(tgt, k), self.dim(src, k))
                self.maps[a][k] = m
        self.labels = labels
        if check:
            self.check()

    def degrees_of(self, *levels):
        return sorted({k for L in levels for k in self.dims[L]})

    @property
    def degrees(self):
        return self.degrees_of(*self.shape.levels)

    def dim(self, L, k):
        return self.dims[L].get(k, 0)

    def total_dim(self):
        return sum(sum(d.values()) for d in self.dims.values())

    def map(self, a, b, k):
        """Structure map a -> b in degree k (composite along a path)."""
        m = Mat.identity(self.dim(a, k))
        for arrow in self.shape.path(a, b):
            m = self.maps[arrow].get(k, Mat(self.dim(arrow[1], k), self.dim(arrow[0], k))) @ m
        return m

    def check(self):
        for (s, t), per in self.maps.items():
            for k, m in per.items():
                if (m.rows, m.cols) != (self.dim(t, k), self.dim(s, k)):
                    raise ShapeError("arrow %s->%s degree %d has shape %dx%d, expected %dx%d"
                                     % (s, t, k, m.rows, m.cols, self.dim(t, k), self.dim(s, k)))
        if self.shape.kind == "CyclicPQ":
            for k in self.degrees:
                via_p = self.map("P", "G", k) @ self.map("e", "P", k)
                via_q = self.map("Q", "G", k) @ self.map("e", "Q", k)
                if via_p != via_q:
                    raise ShapeError("square does not commute in degree %d" % k)

    def is_zero(self):
        return self.total_dim() == 0

    def dim_table(self):
        return {L: dict(sorted(self.dims[L].items())) for L in self.shape.levels}

    def __repr__(self):
        return "DiagramOfGVS(%r, %s)" % (self.shape, self.dim_table())

    def __eq__(self, other):
        return (isinstance(other, DiagramOfGVS) and self.shape == other.shape
                and self.dim_table() == other.dim_table() and all(
                    self.maps[a].get(k) == other.maps[a].get(k)
                    for a in self.shape.arrows for k in self.degrees))

    def in_degree(self, k):
        """The sub-diagram concentrated in degree ``k``."""
        return DiagramOfGVS(self.shape, {L: {k: self.dim(L, k)} for L in self.shape.levels},
                            {a: {k: self.maps[a][k]} for a in self.shape.arrows if k in self.maps[a]},
                            check=False)

    def identity(self):
        return {L: {k: Mat.identity(self.dim(L, k)) for k in self.degrees} for L in self.shape.levels}


def constant_diagram(shape, dims):
    """Same graded space at every level, identity structure maps."""
    return DiagramOfGVS(shape, {L: dict(dims) for L in shape.levels},
                        {a: {k: Mat.identity(n) for k, n in dims.items()} for a in shape.arrows})


def compose_maps(g, f, levels):
    """Levelwise/degreewise composite ``g . f`` of diagram maps."""
    out = {}
    for L in levels:
        out[L] = {}
        for k in set(f[L]) | set(g[L]):
            if k in f[L] and k in g[L]:
                out[L][k] = g[L][k] @ f[L][k]
    return out


def map_entry(phi, L, k, rows, cols):
    m = phi.get(L, {}).get(k)
    if m is None:
        return Mat(rows, cols)
    return m


def is_natural(phi, src, tgt):
    for (a, b) in src.shape.arrows:
        for k in set(src.degrees) | set(tgt.degrees):
            left = tgt.map(a, b, k) @ map_entry(phi, a, k, tgt.dim(a, k), src.dim(a, k))
            right = map_entry(phi, b, k, tgt.dim(b, k), src.dim(b, k)) @ src.map(a, b, k)
            if left != right:
                return False
    return True


# ---------------------------------------------------------------------------
# corner kernels and envelopes


@dataclass
class CornerKernels:
    """V_H per level and degree, as RREF subspaces of the level spaces."""
    spaces: dict

    def dims(self, L):
        return {k: s.dim for k, s in sorted(self.spaces[L].items()) if s.dim}


def corner_kernels(d):
    shape = d.shape
    out = {}
    for L in shape.levels:
        out[L] = {}
        for k in d.degrees:
            n = d.dim(L, k)
            if n == 0:
                continue
            sub = la.Subspace(n, [[ONE if i == j else ZERO for i in range(n)] for j in range(n)])
            for t in shape.out_arrows(L):
                sub = la.intersect(sub, la.kernel(d.maps[(L, t)][k]))
            out[L][k] = sub
    return CornerKernels(out)


@dataclass
class EnvelopeDecomposition:
    corners: CornerKernels
    envelope: DiagramOfGVS
    embedding: dict
    injective: bool
    # summands[K][k] -> list of (H, offset, dim) giving the block layout of E(K)
    summands: dict = field(repr=False, default_factory=dict)


def _summand_layout(shape, corner_dims):
    """Block offsets of V_H inside E(K) = sum over H >= K, in top-down order."""
    layout = {}
    for K in shape.levels:
        layout[K] = {}
        degs = sorted({k for H in shape.levels for k in corner_dims[H]})
        for k in degs:
            off = 0
            blocks = []
            for H in shape.top_down():
                if shape.leq(K, H):
                    n = corner_dims[H].get(k, 0)
                    blocks.append((H, off, n))
                    off += n
            layout[K][k] = blocks
    return layout


def envelope_from_corners(shape, corner_dims):
    """The injective diagram sum_H V_H with the given corner dimensions."""
    layout = _summand_layout(shape, corner_dims)
    dims = {K: {k: sum(b[2] for b in blocks) for k, blocks in layout[K].items()} for K in shape.levels}
    maps = {}
    labels = {}
    for K in shape.levels:
        labels[K] = {k: ["%s:%d" % (H, i) for (H, _, n) in blocks for i in range(n)]
                     for k, blocks in layout[K].items()}
    for (a, b) in shape.arrows:
        maps[(a, b)] = {}
        for k in layout[a]:
            m = Mat(dims[b].get(k, 0), dims[a].get(k, 0))
            tgt = {H: off for (H, off, n) in layout[b][k]}
            for (H, off, n) in layout[a][k]:
                if H in tgt:
                    for i in range(n):
                        m.data[tgt[H] + i][off + i] = ONE
            maps[(a, b)][k] = m
    return DiagramOfGVS(shape, dims, maps, labels=labels, check=False), layout


def envelope(d):
    shape = d.shape
    corners = corner_kernels(d)
    corner_dims = {H: corners.dims(H) for H in shape.levels}
    env, layout = envelope_from_corners(shape, corner_dims)
    # projections X(H) -> V_H, identity on V_H and zero on the standard complement
    proj = {}
    for H in shape.levels:
        proj[H] = {}
        for k, sub in corners.spaces[H].items():
            if sub.dim:
                proj[H][k] = la.left_inverse_zero_on_complement(sub.basis)
    emb = {}
    injective = True
    for K in shape.levels:
        emb[K] = {}
        for k in d.degrees:
            n = d.dim(K, k)
            rows = []
            for (H, off, m) in layout[K].get(k, []):
                if m:
                    block = proj[H][k] @ d.map(K, H, k)
                    rows.extend(block.data)
            emb[K][k] = Mat(len(rows), n, rows) if rows else Mat(0, n)
            if env.dim(K, k) != n:
                injective = False
    return EnvelopeDecomposition(corners, env, emb, injective, layout)


def is_injective(d):
    return envelope(d).injective


def is_injective_cp(d):
    if d.shape.kind != "CyclicP":
        raise ShapeError("is_injective_cp needs a C_p diagram, got %r" % d.shape)
    return all(la.is_surjective(d.maps[("e", "G")][k]) for k in d.degrees)


def surjectivity_failures(d):
    """(arrow, degree) pairs where a structure map is not surjective."""
    out = []
    for a in d.shape.arrows:
        for k in d.degrees:
            if not la.is_surjective(d.maps[a][k]):
                out.append((a, k))
    return out


@dataclass
class PropertyIReport:
    surj_PG: bool
    surj_QG: bool
    surj_to_K: bool
    pullback_K: dict      # degree -> dim of the pullback of P -> G <- Q
    source_dims: dict     # degree -> dim at level e
    failing_degrees: list

    @property
    def satisfied(self):
        return self.surj_PG and self.surj_QG and self.surj_to_K


def property_I(d):
    if d.shape.kind != "CyclicPQ":
        raise ShapeError("Property I is defined for C_pq diagrams")
    surj_pg = surj_qg = surj_k = True
    pull = {}
    src = {}
    failing = []
    for k in d.degrees:
        f = d.maps[("P", "G")][k]
        g = d.maps[("Q", "G")][k]
        ok_p = la.is_surjective(f)
        ok_q = la.is_surjective(g)
        K = la.kernel(la.hstack([f, -g]))
        u = la.vstack([d.maps[("e", "P")][k], d.maps[("e", "Q")][k]])
        ok_k = la.rank(u) == K.dim
        if K.dim:
            pull[k] = K.dim
        if d.dim("e", k):
            src[k] = d.dim("e", k)
        if not (ok_p and ok_q and ok_k):
            failing.append(k)
        surj_pg &= ok_p
        surj_qg &= ok_q
        surj_k &= ok_k
    return PropertyIReport(surj_pg, surj_qg, surj_k, pull, src, failing)


# ---------------------------------------------------------------------------
# cokernels, resolutions, extension along monomorphisms


def image_diagram_dims(phi, src, tgt):
    return {L: {k: la.rank(phi[L][k]) for k in phi[L]} for L in src.shape.levels}


def cokernel(phi, src, tgt):
    """Cokernel diagram of ``phi: src -> tgt`` with quotient maps and sections."""
    shape = tgt.shape
    q, sec, dims = {}, {}, {}
    for L in shape.levels:
        q[L], sec[L], dims[L] = {}, {}, {}
        for k in tgt.degrees:
            n = tgt.dim(L, k)
            m = map_entry(phi, L, k, n, src.dim(L, k))
            qq, c, s = la.quotient_map(n, la.image(m))
            q[L][k], sec[L][k], dims[L][k] = qq, s, c
    maps = {}
    for (a, b) in shape.arrows:
        maps[(a, b)] = {k: q[b][k] @ tgt.maps[(a, b)][k] @ sec[a][k] for k in tgt.degrees}
    return DiagramOfGVS(shape, dims, maps, check=False), q, sec


@dataclass
class InjectiveResolution:
    source: DiagramOfGVS
    terms: list          # injective diagrams V_0, V_1, ...
    augmentation: dict   # source -> V_0
    maps: list           # w_i : V_i -> V_{i+1}
    envelopes: list      # EnvelopeDecomposition of each successive cokernel

    @property
    def length(self):
        return len(self.terms)


def min_injective_resolution(v, max_length=8):
    """Minimal injective resolution of a diagram concentrated in one degree."""
    if len(v.degrees) > 1:
        raise ValueError("resolution input must be concentrated in one degree, got %s" % v.degrees)
    env = envelope(v)
    terms = [env.envelope]
    envs = [env]
    aug = env.embedding
    ws = []
    prev_map, prev_src = aug, v
    while True:
        cok, q, _ = cokernel(prev_map, prev_src, terms[-1])
        if cok.is_zero():
            break
        if len(terms) >= max_length:
            raise ResolutionError("resolution did not terminate within %d terms" % max_length)
        e = envelope(cok)
        w = compose_maps(e.embedding, q, v.shape.levels)
        ws.append(w)
        prev_map, prev_src = w, terms[-1]
        terms.append(e.envelope)
        envs.append(e)
    return InjectiveResolution(v, terms, aug, ws, envs)


def resolution_is_exact(res):
    """Check w_{i+1} w_i = 0 and ker w_i = im w_{i-1} everywhere."""
    shape = res.source.shape
    chain = [res.augmentation] + res.maps
    spaces = [res.source] + res.terms
    for L in shape.levels:
        for k in res.source.degrees:
            mats = [map_entry(chain[i], L, k, spaces[i + 1].dim(L, k), spaces[i].dim(L, k))
                    for i in range(len(chain))]
            if la.kernel(mats[0]).dim:
                return False
            for i in range(1, len(mats)):
                if not (mats[i] @ mats[i - 1]).is_zero():
                    return False
                if la.kernel(mats[i]) != la.image(mats[i - 1]):
                    return False
            last = mats[-1]
            if la.rank(last) != last.rows:
                return False
    return True


def extend_along_mono(j, f, B, C, U, env_U=None):
    """``g: C -> U`` with ``g . j == f`` for a monomorphism ``j: B -> C``.

    ``U`` must be injective.  The extension is built on the summands of
    ``U = sum_H V_H``: a map into V_H is the same as a linear map
    ``C(H) -> V_H``, which is extended off ``j(B(H))`` by zero on the standard
    complement and then pushed down the poset by the structure maps of C.
    """
    shape = U.shape
    env = env_U or envelope(U)
    if not env.injective:
        raise NotInjectiveError("target diagram is not injective")
    layout = env.summands
    degs = sorted(set(C.degrees) | set(B.degrees))
    f_env = {}
    for L in shape.levels:
        f_env[L] = {}
        for k in degs:
            f_env[L][k] = env.embedding[L].get(k, Mat(0, U.dim(L, k))) @ map_entry(
                f, L, k, U.dim(L, k), B.dim(L, k))
    # per summand H: linear map C(H) -> V_H
    top = {}
    for H in shape.levels:
        top[H] = {}
        for k in degs:
            blocks = layout[H].get(k, [])
            own = [b for b in blocks if b[0] == H]
            if not own or own[0][2] == 0:
                continue
            _, off, n = own[0]
            fh = Mat(n, B.dim(H, k), f_env[H][k].data[off:off + n])
            jh = map_entry(j, H, k, C.dim(H, k), B.dim(H, k))
            top[H][k] = la.extend_from_subspace(jh, fh)
    g = {}
    for K in shape.levels:
        g[K] = {}
        for k in degs:
            rows = []
            for (H, off, n) in layout[K].get(k, []):
                if n:
                    rows.extend((top[H][k] @ C.map(K, H, k)).data)
            ge = Mat(len(rows), C.dim(K, k), rows) if rows else Mat(0, C.dim(K, k))
            if U.dim(K, k):
                g[K][k] = la.inverse(env.embedding[K][k]) @ ge
            else:
                g[K][k] = Mat(0, C.dim(K, k))
    return g


# ---------------------------------------------------------------------------
# restriction to C_p / C_q


def restriction_levels(shape, which, mode):
    """(lower, upper, prime) picking the arrow that becomes the C_p diagram."""
    if shape.kind != "CyclicPQ":
        raise ShapeError("restriction needs a C_pq diagram")
    if which not in ("P", "Q") or mode not in ("ambient", "fixed"):
        raise ValueError("which must be P|Q and mode ambient|fixed")
    other = "Q" if which == "P" else "P"
    prime = shape.p if which == "P" else shape.q
    if mode == "ambient":
        return "e", which, prime
    return other, "G", prime


def restrict_to_subgroup(d, which, mode):
    lo, hi, prime = restriction_levels(d.shape, which, mode)
    shape = OrbitShape(prime)
    dims = {"e": dict(d.dims[lo]), "G": dict(d.dims[hi])}
    maps = {("e", "G"): {k: d.map(lo, hi, k) for k in d.degrees_of(lo, hi)}}
    return DiagramOfGVS(shape, dims, maps)


# ---------------------------------------------------------------------------
# the lifting oracle


def _nat_system(src, tgt, k, levels=None):
    """Linear constraints on the entries of a natural map src -> tgt in degree k.

    Variables are the row-major entries of h_L (tgt x src) for each level.
    Returns (offsets, rows) where rows are constraint vectors (== 0).
    """
    shape = src.shape
    levels = levels or shape.levels
    offsets = {}
    n = 0
    for L in levels:
        offsets[L] = n
        n += tgt.dim(L, k) * src.dim(L, k)
    rows = []
    for (a, b) in shape.arrows:
        if a not in offsets or b not in offsets:
            continue
        T = tgt.maps[(a, b)].get(k, Mat(tgt.dim(b, k), tgt.dim(a, k)))
        S = src.maps[(a, b)].get(k, Mat(src.dim(b, k), src.dim(a, k)))
        ta, sa, tb, sb = tgt.dim(a, k), src.dim(a, k), tgt.dim(b, k), src.dim(b, k)
        # (T h_a)[r][c] - (h_b S)[r][c] = 0
        for r in range(tb):
            for c in range(sa):
                row = [ZERO] * n
                for t in range(ta):
                    x = T.data[r][t]
                    if x:
                        row[offsets[a] + t * sa + c] += x
                for s in range(sb):
                    x = S.data[s][c]
                    if x:
                        row[offsets[b] + r * sb + s] -= x
                if any(row):
                    rows.append(row)
    return offsets, n, rows


def _unpack(x, offsets, src, tgt, k, levels):
    out = {}
    for L in levels:
        r, c = tgt.dim(L, k), src.dim(L, k)
        o = offsets[L]
        out[L] = {k: Mat(r, c, [x[o + i * c:o + (i + 1) * c] for i in range(r)])}
    return out


def natural_maps_basis(src, tgt, k):
    """Basis of Nat(src, tgt) in degree k."""
    offsets, n, rows = _nat_system(src, tgt, k)
    if n == 0:
        return []
    vecs = la.kernel_vectors(Mat(len(rows), n, rows)) if rows else [
        [ONE if i == j else ZERO for i in range(n)] for j in range(n)]
    return [_unpack(v, offsets, src, tgt, k, src.shape.levels) for v in vecs]


def extension_exists(j, f, B, C, X, k):
    """Decide whether some natural h: C -> X has h j = f in degree k."""
    offsets, n, rows = _nat_system(C, X, k)
    rhs = [ZERO] * len(rows)
    extra_rows, extra_rhs = [], []
    for L in C.shape.levels:
        jl = map_entry(j, L, k, C.dim(L, k), B.dim(L, k))
        fl = map_entry(f, L, k, X.dim(L, k), B.dim(L, k))
        xc = C.dim(L, k)
        for r in range(X.dim(L, k)):
            for c in range(B.dim(L, k)):
                row = [ZERO] * n
                for s in range(xc):
                    if jl.data[s][c]:
                        row[offsets[L] + r * xc + s] = jl.data[s][c]
                extra_rows.append(row)
                extra_rhs.append(fl.data[r][c])
    allrows = rows + extra_rows
    if not allrows:
        return True
    if n == 0:
        return not any(extra_rhs)
    return la.solve(Mat(len(allrows), n, allrows), rhs + extra_rhs) is not None


def _thin(shape, support, k, levels=None):
    """Q on ``support`` (degree k) with identity maps inside it."""
    dims = {L: {k: 1 if L in support else 0} for L in shape.levels}
    maps = {}
    for (a, b) in shape.arrows:
        m = Mat(1 if b in support else 0, 1 if a in support else 0)
        if a in support and b in support:
            m.data[0][0] = ONE
        maps[(a, b)] = {k: m}
    return DiagramOfGVS(shape, dims, maps, check=False)


def curated_monos(shape, k):
    """Inclusions Q_U -> Q_{up(H)} for all up-closed U inside up(H).

    The targets are the representable (projective) diagrams, so by Baer's
    criterion this family alone decides injectivity.
    """
    out = []
    for H in shape.levels:
        full = frozenset(shape.up(H))
        C = _thin(shape, full, k)
        for U in shape.up_closed_subsets(H):
            if U == full:
                continue
            B = _thin(shape, U, k)
            j = {L: {k: Mat(1 if L in full else 0, 1 if L in U else 0,
                            [[ONE]] if L in U else ([[]] if L in full else []))}
                 for L in shape.levels}
            out.append(("corner", H, tuple(sorted(U)), B, C, j))
    return out


@dataclass
class OracleVerdict:
    injective_consistent: bool
    trials: int
    counterexample: dict = None


def lifting_oracle(d, max_dim=12, trials=50, seed=0):
    """Search for a failed extension problem ``h . j = f`` into ``d``.

    A counterexample proves non-injectivity; its absence over the curated
    family plus ``trials`` random monomorphisms is reported as consistency.
    """
    rng = random.Random(seed)
    shape = d.shape
    count = 0
    for k in d.degrees:
        X = d.in_degree(k)
        for (kind, H, U, B, C, j) in curated_monos(shape, k):
            for f in natural_maps_basis(B, X, k):
                count += 1
                if not extension_exists(j, f, B, C, X, k):
                    return OracleVerdict(False, count, {
                        "kind": kind, "degree": k, "top": H, "support": list(U),
                        "f": {L: f[L][k].tolist() for L in shape.levels}})
    for t in range(trials):
        if not d.degrees:
            break
        k = rng.choice(d.degrees)
        X = d.in_degree(k)
        from .randgen import random_vs_diagram, random_subdiagram
        C = random_vs_diagram(shape, rng, max_total=max(1, max_dim // 2), degree=k)
        B, j = random_subdiagram(C, rng, k)
        basis = natural_maps_basis(B, X, k)
        if not basis:
            continue
        f = {L: {k: Mat(X.dim(L, k), B.dim(L, k))} for L in shape.levels}
        for b in basis:
            c = la.rat(rng.randint(-3, 3))
            if c:
                for L in shape.levels:
                    f[L][k] = f[L][k] + b[L][k].scale(c)
        count += 1
        if not extension_exists(j, f, B, C, X, k):
            return OracleVerdict(False, count, {
                "kind": "random", "degree": k, "trial": t,
                "B_dims": {L: B.dim(L, k) for L in shape.levels},
                "C_dims": {L: C.dim(L, k) for L in shape.levels}})
    return OracleVerdict(True, count)
