from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from eqrat import linalg as la
from eqrat.linalg import Mat, ONE, ZERO


def mat(rows):
    return Mat.from_rows([[la.rat(x) for x in r] for r in rows])


small = st.integers(-3, 3)


@st.composite
def matrices(draw, max_n=5):
    r = draw(st.integers(0, max_n))
    c = draw(st.integers(0, max_n))
    data = [[la.rat(draw(small)) for _ in range(c)] for _ in range(r)]
    return Mat(r, c, data)


def test_rat_accepts_strings_and_fractions():
    assert la.rat("2/3") == la.rat(Fraction(2, 3))
    assert la.rat(4) * la.rat("1/4") == ONE


def test_matmul_and_identity():
    a = mat([[1, 2], [3, 4]])
    assert a @ Mat.identity(2) == a
    assert (a @ la.inverse(a)) == Mat.identity(2)
    assert a.T.T == a


def test_singular_inverse_raises():
    with pytest.raises(ValueError):
        la.inverse(mat([[1, 2], [2, 4]]))


def test_exact_thirds():
    m = mat([[3, 0], [0, 3]])
    x = la.solve(m, [ONE, ONE])
    assert x == [la.rat("1/3"), la.rat("1/3")]


def test_solve_inconsistent_returns_none():
    assert la.solve(mat([[1, 1], [1, 1]]), [ONE, ZERO]) is None


@settings(max_examples=80, deadline=None)
@given(matrices())
def test_rank_nullity(m):
    assert la.rank(m) + la.kernel(m).dim == m.cols
    for v in la.kernel(m).rows:
        assert not any(m.apply(v))


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_image_contains_columns(m):
    img = la.image(m)
    assert img.dim == la.rank(m)
    for c in range(m.cols):
        assert img.contains(m.col(c))


@settings(max_examples=60, deadline=None)
@given(matrices(), st.data())
def test_solve_roundtrip(m, data):
    x = [la.rat(data.draw(small)) for _ in range(m.cols)]
    b = m.apply(x)
    y = la.solve(m, b)
    assert y is not None and m.apply(y) == b


@settings(max_examples=60, deadline=None)
@given(matrices(4), matrices(4))
def test_intersection_and_sum_dimensions(a, b):
    if a.rows != b.rows:
        return
    A, B = la.image(a), la.image(b)
    assert la.subspace_sum(A, B).dim + la.intersect(A, B).dim == A.dim + B.dim


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_quotient_map(m):
    sub = la.image(m)
    q, n, sec = la.quotient_map(m.rows, sub)
    assert n == m.rows - sub.dim
    assert (q @ m).is_zero()
    assert q @ sec == Mat.identity(n)


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_complement(m):
    sub = la.image(m)
    comp = la.complement(sub)
    assert sub.dim + comp.dim == m.rows
    assert la.intersect(sub, comp).dim == 0


def test_left_inverse_vanishes_on_complement():
    j = mat([[1, 0], [1, 1], [0, 2]])
    L = la.left_inverse_zero_on_complement(j)
    assert L @ j == Mat.identity(2)
    comp = la.complement(la.image(j))
    for v in comp.rows:
        assert not any(L.apply(v))


def test_extend_from_subspace():
    j = mat([[1], [1], [0]])
    f = mat([[2], [5]])
    g = la.extend_from_subspace(j, f)
    assert g @ j == f


def test_subspace_canonical_equality():
    a = la.Subspace(3, [[1, 1, 0], [0, 1, 1]])
    b = la.Subspace(3, [[1, 2, 1], [1, 0, -1]])
    assert a == b and hash(a) == hash(b)
    assert a.coords([1, 2, 1]) is not None
    assert a.coords([0, 0, 1]) is None


def test_extend_basis_greedy():
    got = la.extend_basis([[ONE, ZERO]], [[2, 0], [1, 1], [0, 1]], 2)
    assert got == [[1, 1]]


def test_dimension_errors():
    with pytest.raises(la.DimensionError):
        la.Subspace(2, [[1, 2, 3]])
