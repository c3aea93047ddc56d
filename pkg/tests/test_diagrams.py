import random

import pytest

from eqrat import diagrams as dg
from eqrat import linalg as la
from eqrat.diagrams import DiagramOfGVS, OrbitShape
from eqrat.linalg import Mat, ONE
from eqrat.randgen import random_subdiagram, random_vs_diagram


def m(rows, nrows=None, ncols=None):
    if not rows:
        return Mat(nrows or 0, ncols or 0)
    return Mat.from_rows([[la.rat(x) for x in r] for r in rows])


def only_at(shape, level, k=2, n=1):
    dims = {L: {k: n if L == level else 0} for L in shape.levels}
    return DiagramOfGVS(shape, dims, {})


# -- shapes ------------------------------------------------------------------

def test_shape_levels_and_arrows():
    s = OrbitShape(3, 2)
    assert list(s.levels) == ["e", "P", "Q", "G"]
    assert set(s.arrows) == {("e", "P"), ("e", "Q"), ("P", "G"), ("Q", "G")}
    assert s.leq("e", "G") and not s.leq("P", "Q")
    assert list(OrbitShape(5).arrows) == [("e", "G")]


@pytest.mark.parametrize("args", [(4,), (3, 3), (1,), (2, 9)])
def test_shape_rejects_bad_primes(args):
    with pytest.raises(dg.ShapeError):
        OrbitShape(*args)


def test_noncommuting_square_rejected():
    s = OrbitShape(2, 3)
    dims = {L: {1: 1} for L in s.levels}
    one = {1: m([[1]])}
    maps = {("e", "P"): one, ("e", "Q"): one, ("P", "G"): one, ("Q", "G"): {1: m([[2]])}}
    with pytest.raises(dg.ShapeError, match="commute"):
        DiagramOfGVS(s, dims, maps)


def test_wrong_map_shape_rejected():
    s = OrbitShape(2)
    with pytest.raises(dg.ShapeError, match="e->G"):
        DiagramOfGVS(s, {"e": {0: 2}, "G": {0: 1}}, {("e", "G"): {0: m([[1]])}})


# -- corners and envelopes -----------------------------------------------------

def test_constant_diagram_corners():
    s = OrbitShape(3, 2)
    d = dg.constant_diagram(s, {0: 1, 4: 2})
    c = dg.corner_kernels(d)
    assert c.dims("G") == {0: 1, 4: 2}
    assert all(c.dims(L) == {} for L in ("e", "P", "Q"))
    env = dg.envelope(d)
    assert env.injective
    assert dg.property_I(d).satisfied


def test_noninjective_corners(corpus):
    d = corpus("cpq_noninjective.json").underlying()
    c = dg.corner_kernels(d)
    assert c.dims("e") == {} and c.dims("P") == {3: 1} and c.dims("Q") == {3: 1}
    assert c.dims("G") == {0: 1}
    env = dg.envelope(d)
    assert not env.injective
    assert env.envelope.dim("e", 3) == 2 and d.dim("e", 3) == 1
    r = dg.property_I(d)
    assert r.surj_PG and r.surj_QG and not r.surj_to_K
    assert r.pullback_K[3] == 2 and r.source_dims[3] == 1


def test_embedding_always_injective():
    for seed in range(60):
        rng = random.Random(seed)
        d = random_vs_diagram(OrbitShape(3, 2), rng, max_total=7, degree=1)
        d, _ = random_subdiagram(d, rng, 1)
        env = dg.envelope(d)
        for L in d.shape.levels:
            for k in d.degrees:
                assert la.is_injective(env.embedding[L][k])
        # embedding is natural
        assert dg.is_natural(env.embedding, d, env.envelope)


def test_envelope_idempotent():
    for seed in range(40):
        d = random_vs_diagram(OrbitShape(2, 5), random.Random(seed), max_total=8, degree=3)
        e1 = dg.envelope(d).envelope
        e2 = dg.envelope(e1)
        assert e2.injective
        assert e2.envelope.dim_table() == e1.dim_table()


def test_c6_corners(corpus):
    d = corpus("c6_T.json").underlying()
    env = dg.envelope(d)
    assert env.injective
    assert env.corners.dims("G") == {0: 1, 3: 1, 5: 1}
    assert env.corners.dims("P") == {5: 1, 10: 1}
    assert env.corners.dims("Q") == {3: 2, 6: 3, 9: 1}
    assert env.corners.dims("e") == {}
    assert dg.property_I(d).satisfied


# -- C_p verdicts ----------------------------------------------------------

def test_cp_identity_injective():
    d = dg.constant_diagram(OrbitShape(2), {3: 2})
    assert dg.is_injective_cp(d) and dg.is_injective(d)


def test_cp_reflection_not_injective(corpus):
    d = corpus("s3_reflection_c2.json").underlying()
    assert not dg.is_injective_cp(d)
    assert dg.surjectivity_failures(d) == [(("e", "G"), 2)]


def test_cp_retract_injective(corpus):
    d = corpus("s3_cubed_sum_c3.json").underlying()
    assert dg.is_injective_cp(d)


def test_is_injective_cp_wrong_shape():
    with pytest.raises(dg.ShapeError):
        dg.is_injective_cp(dg.constant_diagram(OrbitShape(2, 3), {0: 1}))
    with pytest.raises(dg.ShapeError):
        dg.property_I(dg.constant_diagram(OrbitShape(2), {0: 1}))


# -- resolutions -----------------------------------------------------------

def test_resolution_of_injective_has_length_one():
    d = dg.constant_diagram(OrbitShape(3), {4: 2})
    res = dg.min_injective_resolution(d)
    assert res.length == 1 and dg.resolution_is_exact(res)


def test_resolution_of_point_at_top():
    s = OrbitShape(3)
    res = dg.min_injective_resolution(only_at(s, "G"))
    assert res.length == 2
    assert res.terms[0].dim_table() == {"e": {2: 1}, "G": {2: 1}}
    assert res.terms[1].dim_table() == {"e": {2: 1}, "G": {}}
    assert dg.resolution_is_exact(res)


def test_resolution_terms_injective_and_bounded():
    for seed in range(80):
        rng = random.Random(seed)
        shape = OrbitShape(3, 2) if seed % 2 else OrbitShape(5)
        d = random_vs_diagram(shape, rng, max_total=7, degree=4)
        d, _ = random_subdiagram(d, rng, 4)
        res = dg.min_injective_resolution(d)
        assert all(dg.is_injective(t) for t in res.terms)
        assert dg.resolution_is_exact(res)
        assert res.length <= (3 if shape.kind == "CyclicPQ" else 2)


def test_resolution_needs_single_degree():
    d = dg.constant_diagram(OrbitShape(2), {1: 1, 2: 1})
    with pytest.raises(ValueError):
        dg.min_injective_resolution(d)


def test_resolution_cap_error():
    s = OrbitShape(3)
    with pytest.raises(dg.ResolutionError):
        dg.min_injective_resolution(only_at(s, "G"), max_length=1)


# -- extension along monos ---------------------------------------------------

def _check_ext(j, f, B, C, U):
    g = dg.extend_along_mono(j, f, B, C, U)
    assert dg.is_natural(g, C, U)
    for L in U.shape.levels:
        for k in B.degrees:
            left = dg.map_entry(g, L, k, U.dim(L, k), C.dim(L, k)) @ dg.map_entry(j, L, k, C.dim(L, k), B.dim(L, k))
            assert left == dg.map_entry(f, L, k, U.dim(L, k), B.dim(L, k))
    return g


def test_extend_identity():
    s = OrbitShape(2)
    U = dg.constant_diagram(s, {2: 1})
    B = C = U
    f = {L: {2: m([[3]])} for L in s.levels}
    g = _check_ext(U.identity(), f, B, C, U)
    assert g == f


def test_extend_from_zero():
    s = OrbitShape(2)
    U = dg.constant_diagram(s, {2: 1})
    C = dg.constant_diagram(s, {2: 2})
    B = DiagramOfGVS(s, {}, {})
    j = {L: {2: Mat(2, 0)} for L in s.levels}
    f = {L: {2: Mat(1, 0)} for L in s.levels}
    g = _check_ext(j, f, B, C, U)
    assert all(g[L][2].is_zero() for L in s.levels)


def test_extend_diagonal_line():
    # j: span(1,1) -> Q^2 at level e only; U = Q at e (injective corner)
    s = OrbitShape(3)
    B = only_at(s, "e", k=1)
    C = only_at(s, "e", k=1, n=2)
    U = only_at(s, "e", k=1)
    assert dg.is_injective(U)
    j = {"e": {1: m([[1], [1]])}, "G": {1: Mat(0, 0)}}
    f = {"e": {1: m([[5]])}, "G": {1: Mat(0, 0)}}
    _check_ext(j, f, B, C, U)


def test_extend_random():
    for seed in range(60):
        rng = random.Random(seed)
        shape = OrbitShape(2, 3)
        C = random_vs_diagram(shape, rng, max_total=6, degree=2)
        B, j = random_subdiagram(C, rng, 2)
        U = dg.envelope(random_vs_diagram(shape, rng, max_total=6, degree=2)).envelope
        basis = dg.natural_maps_basis(B, U, 2)
        if not basis:
            continue
        f = {L: {2: Mat(U.dim(L, 2), B.dim(L, 2))} for L in shape.levels}
        for b in basis:
            c = la.rat(rng.randint(-2, 2))
            for L in shape.levels:
                f[L][2] = f[L][2] + b[L][2].scale(c)
        _check_ext(j, f, B, C, U)


def test_extend_into_noninjective_raises(corpus):
    U = corpus("cpq_noninjective.json").underlying().in_degree(3)
    with pytest.raises(dg.NotInjectiveError):
        dg.extend_along_mono({}, {}, U, U, U)


# -- restriction -------------------------------------------------------------

def test_restrict_c6_fixed(corpus):
    d = corpus("c6_T.json").underlying()
    r = dg.restrict_to_subgroup(d, "P", "fixed")
    assert r.shape == OrbitShape(3)   # P has order 3 and acts on the Q-fixed points
    assert dg.is_injective_cp(r)


def test_restrict_constant():
    d = dg.constant_diagram(OrbitShape(3, 2), {0: 1, 2: 1})
    for which in "PQ":
        for mode in ("ambient", "fixed"):
            r = dg.restrict_to_subgroup(d, which, mode)
            assert r.dim_table() == {"e": {0: 1, 2: 1}, "G": {0: 1, 2: 1}}
            assert all(r.maps[("e", "G")][k] == Mat.identity(1) for k in (0, 2))


def test_restrict_noninjective_ambient(corpus):
    d = corpus("cpq_noninjective.json").underlying()
    r = dg.restrict_to_subgroup(d, "P", "ambient")
    assert r.shape == OrbitShape(3)
    assert dg.is_injective_cp(r)


# -- oracle ------------------------------------------------------------------

def test_oracle_on_envelope_forms():
    for seed in range(20):
        d = random_vs_diagram(OrbitShape(3, 2), random.Random(seed), max_total=6, degree=1)
        env = dg.envelope(d).envelope
        assert dg.lifting_oracle(env, trials=5, seed=seed).injective_consistent


def test_oracle_finds_counterexample_in_curated_family(corpus):
    d = corpus("cpq_noninjective.json").underlying()
    v = dg.lifting_oracle(d, trials=0)
    assert not v.injective_consistent
    assert v.counterexample["kind"] == "corner" and v.counterexample["degree"] == 3


def test_oracle_is_seeded():
    d = dg.constant_diagram(OrbitShape(2, 3), {1: 1})
    a = dg.lifting_oracle(d, trials=10, seed=4)
    b = dg.lifting_oracle(d, trials=10, seed=4)
    assert a == b
