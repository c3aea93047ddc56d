"""Acceptance criteria 1-5, one PASS/FAIL line each.

Run with pytest (lines appear in the terminal summary) or directly:

    python3 tests/test_acceptance.py
"""

import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import pytest

import suites
from eqrat import diagrams as dg
from eqrat.cdga import battery, cohomology, induced_map
from eqrat import linalg as la
from eqrat.cli import run
from eqrat.equivariant import (combination_model, equivariant_formality, equivariant_minimal_model,
                               equivariant_wedge, levelwise_minimality_report)
from eqrat.fileio import corpus_path, load_corpus
from eqrat.randgen import random_retract_diagram

RESULTS = {}


def _record(n, ok, detail, elapsed, limit):
    ok = ok and elapsed < limit
    line = "ACCEPTANCE %d: %s  (%.2fs, limit %ss) %s" % (n, "PASS" if ok else "FAIL", elapsed, limit, detail)
    RESULTS[n] = line
    print(line)
    return ok


# -- 1 ----------------------------------------------------------------------

def criterion_1():
    problems = []
    t_max = 0.0
    t = time.perf_counter()
    rep, code = run(["check-injective", str(corpus_path("s3_reflection_c2.json"))])
    t_max = max(t_max, time.perf_counter() - t)
    if code != 1 or rep["injective"]:
        problems.append("reflection diagram not rejected")
    if rep["surjectivity_failures"] != [{"arrow": "e->G", "degree": 2}]:
        problems.append("reflection surjectivity failures %s" % rep["surjectivity_failures"])
    t = time.perf_counter()
    rep, code = run(["check-injective", str(corpus_path("cpq_noninjective.json"))])
    t_max = max(t_max, time.perf_counter() - t)
    pi = rep["property_I"]
    if code != 1 or rep["injective"]:
        problems.append("three-sphere diagram not rejected")
    if rep["surjectivity_failures"] or not (pi["surjective_P_to_G"] and pi["surjective_Q_to_G"]):
        problems.append("structure maps expected surjective")
    if pi["surjective_to_pullback"] or pi["satisfied"]:
        problems.append("pullback condition expected to fail")
    if pi["pullback_dims"].get("3") != 2 or pi["source_dims"].get("3") != 1:
        problems.append("pullback/source dims %s/%s" % (pi["pullback_dims"], pi["source_dims"]))
    detail = "reflection fails surjectivity in degree 2; C6 three-sphere: K^3 dim 2 vs source 1"
    return _record(1, not problems, "; ".join(problems) or detail, t_max, 1)


# -- 2 ----------------------------------------------------------------------

C6_CORNERS = {"G": {0: 1, 3: 1, 5: 1}, "P": {5: 1, 10: 1}, "Q": {3: 2, 6: 3, 9: 1}, "e": {}}
C6_STAGES = {
    3: {"e": {3: 3}, "P": {3: 1}, "Q": {3: 3}, "G": {3: 1}},
    5: {"e": {5: 2}, "P": {5: 2}, "Q": {5: 1}, "G": {5: 1}},
}


def criterion_2():
    problems = []
    t = time.perf_counter()
    T = load_corpus("c6_T.json")
    d = T.underlying()
    env = dg.envelope(d)
    if not env.injective:
        problems.append("envelope verdict not injective")
    corners = {L: env.corners.dims(L) for L in d.shape.levels}
    if corners != C6_CORNERS:
        problems.append("corner kernels %s" % corners)
    for L in d.shape.levels:
        for k in d.degrees:
            if env.envelope.dim(L, k) != d.dim(L, k):
                problems.append("dimension mismatch at %s/%d" % (L, k))
    if not dg.property_I(d).satisfied:
        problems.append("Property I fails")
    m5 = equivariant_minimal_model(T, 5)
    stages = {k: {L: dict(c) for L, c in v.items()} for k, v in m5.stage_counts().items()}
    if stages != C6_STAGES:
        problems.append("stage counts %s" % stages)
    if not all(a.injective for a in m5.associated):
        problems.append("an associated diagram is not injective")
    if not all(v.ok for v in levelwise_minimality_report(m5).values()):
        problems.append("level-wise minimality report not fully positive")
    cert = equivariant_formality(T, 10)
    if cert is None or cert.through != 10:
        problems.append("no formality certificate through degree 10")
    elapsed = time.perf_counter() - t
    detail = "corners, envelope, Property I, stages 3/4/5, level-wise minimality, formality through 10"
    return _record(2, not problems, "; ".join(problems) or detail, elapsed, 30)


# -- 3 ----------------------------------------------------------------------

SUITES = [
    ("a", suites.suite_property_I),
    ("b", suites.suite_cp_surjectivity),
    ("c", suites.suite_wedge_property_I),
    ("d", suites.suite_oracle),
    ("e", suites.suite_restriction),
    ("f", suites.suite_retraction_wedge),
]


def criterion_3():
    t = time.perf_counter()
    problems, parts = [], []
    for tag, fn in SUITES:
        n, fails = fn()
        parts.append("%s:%d" % (tag, n))
        if n < 200:
            problems.append("%s ran only %d cases" % (tag, n))
        problems.extend("%s %s" % (tag, f) for f in fails[:3])
    elapsed = time.perf_counter() - t
    return _record(3, not problems, "; ".join(problems) or "cases " + " ".join(parts), elapsed, 300)


# -- 4 ----------------------------------------------------------------------

def _rho_iso(m, n):
    for L, mm in m.rho.items():
        f = mm.rho
        hs, ht = cohomology(f.source, n), cohomology(f.target, n)
        for k in range(n + 1):
            h = induced_map(f, hs, ht, k)
            if not (h.rows == h.cols and la.rank(h) == h.rows):
                return "H^%d(rho) not iso at %s" % (k, L)
    return None


def criterion_4():
    t = time.perf_counter()
    problems = []
    algebras = 0
    for name, u in suites.corpus_diagrams().items():
        for L, a in u.levels.items():
            algebras += 1
            bad = battery(a)
            if bad:
                problems.append("%s/%s: %s" % (name, L, bad[0]))
        if not u.is_zero_differential() or u.injectivity_failures():
            continue
        n = min(u.cap - 1, 8)
        m = equivariant_minimal_model(u, n)
        for st in m.stages:
            if st.result.injectivity_failures(n):
                problems.append("%s: extension at stage %d not injective" % (name, st.degree))
        for L, a in m.model.levels.items():
            algebras += 1
            bad = battery(a, n)
            if bad:
                problems.append("%s model/%s: %s" % (name, L, bad[0]))
        msg = _rho_iso(m, n)
        if msg:
            problems.append("%s: %s" % (name, msg))
    # algebras built by the wedge and combination constructions
    for s in range(20):
        (u1, _), (u2, _) = suites.retract_pair(s)
        w = equivariant_wedge(u1, u2)
        cm = combination_model(equivariant_minimal_model(u1, 6), equivariant_minimal_model(u2, 6), 6)
        for tag, diag in (("wedge", w), ("combination", cm.diagram)):
            for L, a in diag.levels.items():
                algebras += 1
                bad = battery(a, 7)
                if bad:
                    problems.append("seed %d %s/%s: %s" % (s, tag, L, bad[0]))
    elapsed = time.perf_counter() - t
    detail = "%d algebras pass the battery; extensions injective; rho iso on cohomology" % algebras
    return _record(4, not problems, "; ".join(problems[:5]) or detail, elapsed, 600)


# -- 5 ----------------------------------------------------------------------

def _cross_check(u1, u2, wedge_diagram, n=10):
    m1 = equivariant_minimal_model(u1, n)
    m2 = equivariant_minimal_model(u2, n)
    cm = combination_model(m1, m2, n)
    em = equivariant_minimal_model(wedge_diagram, n)
    if cm.counts(n) != em.model.counts(n):
        return "counts differ: %s vs %s" % (cm.counts(n), em.model.counts(n))
    bad = [j for j, (_, r) in cm.associated.items() if not r.satisfied]
    if bad:
        return "associated diagram fails Property I at stages %s" % bad
    return None


def criterion_5():
    t = time.perf_counter()
    problems = []
    msg = _cross_check(load_corpus("t1_c3.json"), load_corpus("t2_c2.json"), load_corpus("c6_T.json"))
    if msg:
        problems.append("C6: " + msg)
    for s in range(20):
        rng = random.Random(1000 + s)
        u1, _ = random_retract_diagram(3, rng)
        u2, _ = random_retract_diagram(2, rng)
        msg = _cross_check(u1, u2, equivariant_wedge(u1, u2))
        if msg:
            problems.append("seed %d: %s" % (1000 + s, msg))
    elapsed = time.perf_counter() - t
    detail = "C6 and 20 seeded retract wedges agree through degree 10"
    return _record(5, not problems, "; ".join(problems[:5]) or detail, elapsed, 120)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5]


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_acceptance(n):
    assert CRITERIA[n - 1](), RESULTS[n]


if __name__ == "__main__":
    ok = [c() for c in CRITERIA]
    sys.exit(0 if all(ok) else 1)
