import json

import pytest

from eqrat import diagrams as dg
from eqrat.cdga import Presentation, realize, to_table
from eqrat.diagrams import OrbitShape
from eqrat.equivariant import constant_diagram, equivariant_wedge
from eqrat.fileio import (LoadError, corpus_dir, diagram_to_obj, dumps, emit, load, load_corpus,
                          parse_obj, parse_text)

CORPUS = sorted(p.name for p in corpus_dir().glob("*.json"))

BASE = {
    "group": {"p": 2},
    "cap": 6,
    "levels": {
        "e": {"generators": [["x1", 3], ["y1", 2]], "relations": ["y1^2"], "differential": {}},
        "G": {"generators": [["x", 3]], "relations": [], "differential": {}},
    },
    "maps": {"e->G": {"x1": "x", "y1": "0"}},
}


def variant(**changes):
    obj = json.loads(json.dumps(BASE))
    for path, val in changes.items():
        cur = obj
        keys = path.split("__")
        for k in keys[:-1]:
            cur = cur[k]
        cur[keys[-1]] = val
    return obj


def same(a, b):
    assert a.shape == b.shape and a.cap == b.cap
    assert a.dim_table() == b.dim_table()
    for arrow in a.shape.arrows:
        for k in range(a.cap + 1):
            assert a.maps[arrow].maps[k] == b.maps[arrow].maps[k], (arrow, k)
    for L in a.shape.levels:
        for k in range(a.cap):
            assert a.levels[L].d(k) == b.levels[L].d(k)


@pytest.mark.parametrize("name", CORPUS)
def test_corpus_loads_and_round_trips(name, tmp_path):
    d = load_corpus(name)
    out = tmp_path / name
    text = emit(d, out)
    d2 = load(out)
    same(d, d2)
    assert emit(d2) == text      # stable after one round trip


def test_expect_injective_flags_match_verdicts():
    for name in CORPUS:
        d = load_corpus(name)
        want = d.flags.get("expect_injective")
        if want is not None:
            assert (not d.injectivity_failures()) == want, name


def test_table_levels_round_trip(tmp_path):
    a = realize(Presentation([("x", 2), ("y", 3)], [], {"y": "x^2"}, 7))
    d = constant_diagram(OrbitShape(3), to_table(a))
    out = tmp_path / "t.json"
    emit(d, out)
    same(d, load(out))


def test_wedge_round_trip(tmp_path):
    w = equivariant_wedge(load_corpus("cp_trivial.json"), load_corpus("cq_trivial.json"))
    out = tmp_path / "w.json"
    emit(w, out)
    same(w, load(out))


def test_emission_is_deterministic():
    d = load_corpus("c6_T.json")
    assert emit(d) == emit(load_corpus("c6_T.json"))
    assert dumps(diagram_to_obj(d)).endswith("\n")


def test_koszul_normalized_relations():
    a = parse_obj(variant(levels__e__relations=["y1^2", "x1*x1"])).build()
    b = parse_obj(BASE).build()
    assert a.levels["e"].dims() == b.levels["e"].dims()
    obj = {"group": {"p": 2}, "cap": 9,
           "levels": {"e": {"generators": [["x", 3], ["y", 5]], "relations": ["y*x"]},
                      "G": {"generators": [["x", 3], ["y", 5]], "relations": ["-x*y"]}},
           "maps": {"e->G": {"x": "x", "y": "y"}}}
    d = parse_obj(obj).build()
    assert d.levels["e"].dims() == d.levels["G"].dims()


def test_malformed_map_names_arrow():
    # x1 has degree 3, y has degree 2
    obj = variant(**{"levels__G__generators": [["x", 3], ["y", 2]],
                     "maps__e->G": {"x1": "y", "y1": "0"}})
    with pytest.raises(LoadError, match=r"maps\.e->G.*degree"):
        parse_obj(obj).build()


def test_unknown_generator_in_map():
    with pytest.raises(LoadError, match=r"maps\.e->G.*unknown"):
        parse_obj(variant(**{"maps__e->G": {"zz": "x"}})).build()


def test_non_multiplicative_map():
    obj = variant(**{"levels__G__generators": [["x", 3], ["u", 2]],
                     "maps__e->G": {"x1": "x", "y1": "u"}})
    with pytest.raises(LoadError, match=r"maps\.e->G"):
        parse_obj(obj).build()


def test_square_must_commute():
    lvl = {"generators": [["x", 3]]}
    obj = {"group": {"p": 3, "q": 2}, "cap": 4, "levels": {L: lvl for L in "ePQG"},
           "maps": {"e->P": {"x": "x"}, "e->Q": {"x": "x"}, "P->G": {"x": "x"}, "Q->G": {"x": "2*x"}}}
    with pytest.raises(LoadError, match="commute"):
        parse_obj(obj).build()


def test_syntax_error_has_position():
    with pytest.raises(LoadError, match="line 2 column"):
        parse_text('{"group": {"p": 2},\n "cap": }', "bad.json")


@pytest.mark.parametrize("obj,msg", [
    ({"cap": 3}, "missing field 'group'"),
    (dict(BASE, group={"p": 4}), "group"),
    (dict(BASE, cap=-1), "cap"),
    (dict(BASE, levels={"e": BASE["levels"]["e"]}), "missing field 'G'"),
    (variant(levels__P={"generators": []}), "unknown levels"),
    (variant(levels__e__generators=[["x1", "3"]]), "levels.e.generators"),
    (variant(levels__e__relations=["x1 + y1"]), "levels.e"),
    (variant(**{"maps__G->e": {}}), "unknown arrows"),
])
def test_field_errors(obj, msg):
    with pytest.raises(LoadError, match=msg.replace(".", r"\.")):
        parse_obj(obj, "f").build()


def test_missing_file():
    with pytest.raises(LoadError):
        load("/nonexistent/x.json")


def test_digest_is_sha256_of_text():
    import hashlib
    path = corpus_dir() / "cp_trivial.json"
    d = load(path)
    assert d.digest == hashlib.sha256(path.read_bytes()).hexdigest()


def test_envelope_of_loaded_c6():
    d = load_corpus("c6_T.json")
    assert dg.envelope(d.underlying()).injective
