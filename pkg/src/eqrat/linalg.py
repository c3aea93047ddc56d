"""Exact dense linear algebra over the rationals.

Everything here works on ``gmpy2.mpq`` entries.  Matrices are small and
dense, so a plain row-list representation is used; elimination skips zero
entries, which keeps the structured (mostly sparse) matrices that arise from
monomial algebras cheap.

Pivoting is the canonical one: columns are scanned left to right and the
first row (top to bottom) with a nonzero entry in that column is used.  The
reduced row echelon form is unique, so results are reproducible.
"""

from gmpy2 import mpq

Rat = mpq
ZERO = mpq(0)
ONE = mpq(1)


def rat(x):
    """Coerce an int, str ("3/4") or Fraction-like value to ``mpq``."""
    if isinstance(x, str):
        return mpq(x.strip())
    return mpq(x)


class DimensionError(ValueError):
    pass


class Mat:
    """Immutable rows x cols matrix of rationals.

    ``data`` is a list of row lists; callers must not mutate it after
    construction.
    """

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows, cols, data=None):
        self.rows = rows
        self.cols = cols
        if data is None:
            data = [[ZERO] * cols for _ in range(rows)]
        elif len(data) != rows or any(len(r) != cols for r in data):
            raise DimensionError("entries do not match %dx%d" % (rows, cols))
        self.data = data

    @classmethod
    def from_rows(cls, rows, cols=None):
        rows = [[rat(x) for x in r] for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, rows)

    @classmethod
    def from_cols(cls, cols, nrows):
        data = [[ZERO] * len(cols) for _ in range(nrows)]
        for j, c in enumerate(cols):
            if len(c) != nrows:
                raise DimensionError("column length %d != %d" % (len(c), nrows))
            for i, x in enumerate(c):
                if x:
                    data[i][j] = rat(x)
        return cls(nrows, len(cols), data)

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols)

    @classmethod
    def identity(cls, n):
        m = cls(n, n)
        for i in range(n):
            m.data[i][i] = ONE
        return m

    def col(self, j):
        return [r[j] for r in self.data]

    def columns(self):
        return [self.col(j) for j in range(self.cols)]

    @property
    def T(self):
        return Mat(self.cols, self.rows,
                   [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)])

    def __matmul__(self, other):
        if isinstance(other, Mat):
            if self.cols != other.rows:
                raise DimensionError("cannot multiply %dx%d by %dx%d"
                                     % (self.rows, self.cols, other.rows, other.cols))
            out = []
            od = other.data
            for r in self.data:
                acc = [ZERO] * other.cols
                for k, a in enumerate(r):
                    if a:
                        ok = od[k]
                        for j in range(other.cols):
                            b = ok[j]
                            if b:
                                acc[j] += a * b
                out.append(acc)
            return Mat(self.rows, other.cols, out)
        return self.apply(other)

    def apply(self, v):
        if len(v) != self.cols:
            raise DimensionError("vector length %d != %d" % (len(v), self.cols))
        nz = [(k, x) for k, x in enumerate(v) if x]
        return [sum((r[k] * x for k, x in nz), ZERO) for r in self.data]

    def __add__(self, other):
        self._same_shape(other)
        return Mat(self.rows, self.cols,
                   [[a + b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)])

    def __sub__(self, other):
        self._same_shape(other)
        return Mat(self.rows, self.cols,
                   [[a - b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)])

    def __neg__(self):
        return Mat(self.rows, self.cols, [[-a for a in r] for r in self.data])

    def scale(self, c):
        c = rat(c)
        return Mat(self.rows, self.cols, [[c * a for a in r] for r in self.data])

    def _same_shape(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionError("shape mismatch %dx%d vs %dx%d"
                                 % (self.rows, self.cols, other.rows, other.cols))

    def is_zero(self):
        return not any(x for r in self.data for x in r)

    def __eq__(self, other):
        return (isinstance(other, Mat) and self.rows == other.rows
                and self.cols == other.cols and self.data == other.data)

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(tuple(r) for r in self.data)))

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in r) for r in self.data)
        return "Mat(%dx%d: %s)" % (self.rows, self.cols, body)

    def tolist(self):
        return [[str(x) for x in r] for r in self.data]


def hstack(mats, rows=None):
    if not mats:
        return Mat(rows or 0, 0)
    n = mats[0].rows
    for m in mats:
        if m.rows != n:
            raise DimensionError("hstack row mismatch")
    return Mat(n, sum(m.cols for m in mats),
               [sum((m.data[i] for m in mats), []) for i in range(n)])


def vstack(mats, cols=None):
    if not mats:
        return Mat(0, cols or 0)
    n = mats[0].cols
    for m in mats:
        if m.cols != n:
            raise DimensionError("vstack column mismatch")
    return Mat(sum(m.rows for m in mats), n, [list(r) for m in mats for r in m.data])


def block_diag(mats):
    rows = sum(m.rows for m in mats)
    cols = sum(m.cols for m in mats)
    out = Mat(rows, cols)
    i0 = j0 = 0
    for m in mats:
        for i, r in enumerate(m.data):
            out.data[i0 + i][j0:j0 + m.cols] = r
        i0 += m.rows
        j0 += m.cols
    return out


def _rref_rows(data, ncols, width=None):
    """In-place RREF of a list of row lists; returns pivot columns.

    Pivots are searched among the first ``ncols`` columns; row operations
    act on the first ``width`` columns (augmented systems pass the full width).
    """
    if width is None:
        width = ncols
    pivots = []
    r = 0
    nrows = len(data)
    for c in range(ncols):
        if r == nrows:
            break
        p = None
        for i in range(r, nrows):
            if data[i][c]:
                p = i
                break
        if p is None:
            continue
        data[r], data[p] = data[p], data[r]
        row = data[r]
        inv = ONE / row[c]
        if inv != ONE:
            for j in range(c, width):
                if row[j]:
                    row[j] *= inv
        nzc = [j for j in range(c, width) if row[j]]
        for i in range(nrows):
            if i != r:
                f = data[i][c]
                if f:
                    other = data[i]
                    for j in nzc:
                        other[j] -= f * row[j]
        pivots.append(c)
        r += 1
    return pivots


def rref(m):
    """Return ``(rank, reduced, pivot_cols)`` for the matrix ``m``."""
    data = [list(r) for r in m.data]
    pivots = _rref_rows(data, m.cols)
    return len(pivots), Mat(m.rows, m.cols, data), pivots


def rank(m):
    return rref(m)[0]


def solve(m, b):
    """Some ``x`` with ``m @ x == b``, or None if ``b`` is not in the column space."""
    if len(b) != m.rows:
        raise DimensionError("rhs length %d != %d rows" % (len(b), m.rows))
    n = m.cols
    data = [list(r) + [rat(x)] for r, x in zip(m.data, b)]
    pivots = _rref_rows(data, n + 1)
    if pivots and pivots[-1] == n:
        return None
    x = [ZERO] * n
    for i, c in enumerate(pivots):
        x[c] = data[i][n]
    return x


def solve_many(m, bs):
    """Solve ``m x = b`` for each column in ``bs`` sharing one elimination.

    Returns a list of solutions (None where inconsistent).
    """
    n = m.cols
    k = len(bs)
    if k == 0:
        return []
    data = [list(r) + [rat(b[i]) for b in bs] for i, r in enumerate(m.data)]
    pivots = _rref_rows(data, n, n + k)
    rk = len(pivots)
    out = []
    for t in range(k):
        if any(data[i][n + t] for i in range(rk, m.rows)):
            out.append(None)
            continue
        x = [ZERO] * n
        for i, c in enumerate(pivots):
            x[c] = data[i][n + t]
        out.append(x)
    return out


class Subspace:
    """Subspace of Q^n with an RREF-canonical basis.

    ``rows`` holds the reduced basis vectors; ``basis`` exposes them as the
    columns of a matrix.  Two subspaces are equal iff their rows agree.
    """

    __slots__ = ("ambient_dim", "rows", "pivots")

    def __init__(self, ambient_dim, vectors=()):
        data = [[rat(x) for x in v] for v in vectors]
        for v in data:
            if len(v) != ambient_dim:
                raise DimensionError("vector length %d != %d" % (len(v), ambient_dim))
        pivots = _rref_rows(data, ambient_dim)
        self.ambient_dim = ambient_dim
        self.rows = data[:len(pivots)]
        self.pivots = pivots

    @property
    def dim(self):
        return len(self.rows)

    @property
    def basis(self):
        return Mat.from_cols(self.rows, self.ambient_dim)

    def contains(self, v):
        return self.coords(v) is not None

    def coords(self, v):
        """Coordinates of ``v`` in the canonical basis, or None if outside."""
        v = list(v)
        c = [v[p] for p in self.pivots]
        for x, r in zip(c, self.rows):
            if x:
                for j in range(self.ambient_dim):
                    if r[j]:
                        v[j] -= x * r[j]
        if any(v):
            return None
        return c

    def __eq__(self, other):
        return (isinstance(other, Subspace) and self.ambient_dim == other.ambient_dim
                and self.rows == other.rows)

    def __hash__(self):
        return hash((self.ambient_dim, tuple(tuple(r) for r in self.rows)))

    def __repr__(self):
        return "Subspace(dim %d in Q^%d)" % (self.dim, self.ambient_dim)


def kernel_vectors(m):
    """Basis of ker m as a list of vectors (free-variable basis)."""
    _, red, pivots = rref(m)
    pivset = set(pivots)
    out = []
    for f in range(m.cols):
        if f in pivset:
            continue
        v = [ZERO] * m.cols
        v[f] = ONE
        for i, c in enumerate(pivots):
            x = red.data[i][f]
            if x:
                v[c] = -x
        out.append(v)
    return out


def kernel(m):
    return Subspace(m.cols, kernel_vectors(m))


def image(m):
    return Subspace(m.rows, m.columns())


def _check_same(a, b):
    if a.ambient_dim != b.ambient_dim:
        raise DimensionError("ambient dimensions differ: %d vs %d" % (a.ambient_dim, b.ambient_dim))


def subspace_sum(a, b):
    _check_same(a, b)
    return Subspace(a.ambient_dim, a.rows + b.rows)


def intersect(a, b):
    """a ∩ b via the kernel of the stacked system [A | -B]."""
    _check_same(a, b)
    n = a.ambient_dim
    if a.dim == 0 or b.dim == 0:
        return Subspace(n)
    A = a.basis
    B = b.basis
    stacked = hstack([A, -B])
    vecs = []
    for k in kernel_vectors(stacked):
        vecs.append(A.apply(k[:a.dim]))
    return Subspace(n, vecs)


def complement(sub, ambient=None):
    """A complement of ``sub``.

    With ``ambient`` None the complement in Q^n is spanned by the standard
    vectors at the non-pivot columns.  Otherwise ``ambient`` must contain
    ``sub`` and the complement is taken inside it, greedily from its basis.
    """
    n = sub.ambient_dim
    if ambient is None:
        piv = set(sub.pivots)
        vecs = []
        for j in range(n):
            if j not in piv:
                e = [ZERO] * n
                e[j] = ONE
                vecs.append(e)
        return Subspace(n, vecs)
    _check_same(sub, ambient)
    return Subspace(n, extend_basis(sub.rows, ambient.rows, n))


def extend_basis(start, candidates, n):
    """Vectors from ``candidates`` extending span(start) greedily, in order."""
    data = [list(v) for v in start]
    piv = _rref_rows(data, n)
    data = data[:len(piv)]
    chosen = []
    for v in candidates:
        trial = data + [list(v)]
        p = _rref_rows(trial, n)
        if len(p) > len(data):
            chosen.append(list(v))
            data = trial[:len(p)]
    return chosen


def quotient_map(ambient_dim, sub):
    """Full-row-rank ``q`` with ``q v == 0`` iff ``v`` in ``sub``.

    Returns ``(q, coker_dim, section)`` where ``section`` is a right inverse
    of ``q`` (its columns are the standard vectors at non-pivot positions).
    """
    if sub.ambient_dim != ambient_dim:
        raise DimensionError("subspace lives in Q^%d, not Q^%d" % (sub.ambient_dim, ambient_dim))
    piv = set(sub.pivots)
    free = [j for j in range(ambient_dim) if j not in piv]
    q = Mat(len(free), ambient_dim)
    sec = Mat(ambient_dim, len(free))
    for t, j in enumerate(free):
        row = q.data[t]
        row[j] = ONE
        for r, p in zip(sub.rows, sub.pivots):
            if r[j]:
                row[p] = -r[j]
        sec.data[j][t] = ONE
    return q, len(free), sec


def is_injective(m):
    return rank(m) == m.cols


def is_surjective(m):
    return rank(m) == m.rows


def inverse(m):
    if m.rows != m.cols:
        raise DimensionError("not square")
    n = m.rows
    data = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(m.data)]
    piv = _rref_rows(data, n, 2 * n)
    if len(piv) < n:
        raise ValueError("matrix is singular")
    return Mat(n, n, [r[n:] for r in data])


def left_inverse(m):
    """Some ``L`` with ``L @ m == I`` for injective ``m``."""
    return left_inverse_zero_on_complement(m)


def right_inverse(m):
    """Some ``R`` with ``m @ R == I`` for surjective ``m``."""
    sols = solve_many(m, [[ONE if i == j else ZERO for i in range(m.rows)] for j in range(m.rows)])
    if any(s is None for s in sols):
        raise ValueError("matrix is not surjective")
    return Mat.from_cols(sols, m.cols)


def extend_from_subspace(j, f):
    """Linear ``g`` with ``g @ j == f``; ``j`` injective, zero on the standard complement.

    ``j``: n x m injective, ``f``: p x m.  Returns p x n.
    """
    if j.cols != f.cols:
        raise DimensionError("domain mismatch")
    n = j.rows
    if j.cols == 0:
        return Mat(f.rows, n)
    L = left_inverse_zero_on_complement(j)
    return f @ L


def left_inverse_zero_on_complement(j):
    """Left inverse of injective ``j`` vanishing on the standard complement of im j."""
    n, m = j.rows, j.cols
    img = image(j)
    if img.dim != m:
        raise ValueError("map is not injective")
    comp = complement(img)
    basis = hstack([j, comp.basis]) if comp.dim else j
    inv = inverse(basis)
    return Mat(m, n, [list(r) for r in inv.data[:m]])
