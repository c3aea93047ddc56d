import json
import subprocess
import sys

import pytest

from eqrat.cli import main, run
from eqrat.fileio import corpus_path


def c(name):
    return str(corpus_path(name))


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj), encoding="utf-8")
    return str(p)


# C_p diagram CP^2 -> S^2: surjective, injective, but no retraction
CP2_TO_S2 = {
    "group": {"p": 3}, "cap": 8,
    "levels": {"e": {"generators": [["a", 2]], "relations": ["a^3"]},
               "G": {"generators": [["u", 2]], "relations": ["u^2"]}},
    "maps": {"e->G": {"a": "u"}},
}

# two-prime diagram with a single class at P: e -> P is not surjective
POINT_AT_P = {
    "group": {"p": 3, "q": 2}, "cap": 5,
    "levels": {"e": {}, "P": {"generators": [["x", 3]]}, "Q": {}, "G": {}},
    "maps": {"e->P": {}, "e->Q": {}, "P->G": {"x": "0"}, "Q->G": {}},
}

BAD_DEGREE = {
    "group": {"p": 2}, "cap": 6,
    "levels": {"e": {"generators": [["x1", 3]]}, "G": {"generators": [["y1", 2]]}},
    "maps": {"e->G": {"x1": "y1"}},
}


def code_of(argv):
    return run(argv)[1]


# -- exit codes per command ----------------------------------------------------

@pytest.mark.parametrize("argv,code", [
    (["check-injective", c("c6_T.json")], 0),
    (["check-injective", c("cpq_noninjective.json")], 1),
    (["check-injective", c("s3_reflection_c2.json")], 1),
    (["check-injective", "/nope.json"], 3),
    (["envelope", c("cpq_noninjective.json")], 0),
    (["envelope", "/nope.json"], 3),
    (["minimal-model", c("c6_T.json"), "--max-degree", "5"], 0),
    (["minimal-model", c("cpq_noninjective.json"), "--max-degree", "4"], 4),
    (["minimal-model", c("c6_T.json"), "--max-degree", "11"], 4),
    (["formality", c("c6_T.json"), "--max-degree", "10"], 0),
    (["formality", c("s2_model_c3.json"), "--max-degree", "6"], 0),
    (["formality", c("s3_reflection_c2.json"), "--max-degree", "4"], 2),
    (["formality", c("c6_T.json"), "--max-degree", "12"], 4),
    (["oracle", c("c6_T.json"), "--trials", "5"], 0),
    (["oracle", c("cpq_noninjective.json"), "--seed", "3"], 1),
    (["restrict", c("c6_T.json"), "--to", "P", "--mode", "fixed"], 0),
    (["restrict", c("cpq_noninjective.json"), "--to", "P", "--mode", "ambient"], 0),
    (["restrict", c("cp_trivial.json"), "--to", "P", "--mode", "ambient"], 4),
    (["formality", c("c6_T.json")], 4),
    (["restrict", c("c6_T.json"), "--to", "X", "--mode", "fixed"], 4),
    (["frobnicate"], 4),
    ([], 4),
])
def test_exit_codes(argv, code):
    assert code_of(argv) == code


def test_minimal_model_negative(tmp_path):
    f = write(tmp_path, "cp2.json", CP2_TO_S2)
    assert code_of(["check-injective", f]) == 0
    rep, code = run(["minimal-model", f, "--max-degree", "6"])
    assert code == 1
    assert not rep["levelwise_minimality"]["e"]["ok"]


def test_restrict_negative(tmp_path):
    f = write(tmp_path, "pt.json", POINT_AT_P)
    rep, code = run(["restrict", f, "--to", "P", "--mode", "ambient"])
    assert code == 1 and rep["surjectivity_failures"] == [3]


def test_wedge_command(tmp_path):
    out = tmp_path / "w.json"
    rep, code = run(["wedge", c("cp_trivial.json"), c("cq_trivial.json"), "-o", str(out)])
    assert code == 0 and rep["property_I"]
    w = json.loads(out.read_text())
    assert w["group"] == {"p": 3, "q": 2}
    assert all(lvl["generators"] == [] for lvl in w["levels"].values())
    assert code_of(["check-injective", str(out)]) == 0
    assert code_of(["wedge", c("c6_T.json"), c("cq_trivial.json")]) == 4
    assert code_of(["wedge", c("cp_trivial.json"), "/nope.json"]) == 3


def test_wedge_of_t1_t2_is_c6(tmp_path):
    out = tmp_path / "t.json"
    run(["wedge", c("t1_c3.json"), c("t2_c2.json"), "-o", str(out)])
    a, _ = run(["check-injective", str(out)])
    b, _ = run(["check-injective", c("c6_T.json")])
    for key in ("corner_kernels", "source_dims", "property_I"):
        assert a[key] == b[key]


# -- report contents -----------------------------------------------------------

def test_check_injective_report_shows_pullback_failure():
    rep, _ = run(["check-injective", c("cpq_noninjective.json")])
    pi = rep["property_I"]
    assert pi["surjective_P_to_G"] and pi["surjective_Q_to_G"]
    assert not pi["surjective_to_pullback"]
    assert pi["pullback_dims"]["3"] == 2 and pi["source_dims"]["3"] == 1
    assert rep["matches_expectation"]


def test_minimal_model_report_stage_table():
    rep, _ = run(["minimal-model", c("c6_T.json"), "--max-degree", "5"])
    st = rep["stages"]
    assert st["3"]["new_generators"] == {"e": {"3": 3}, "P": {"3": 1}, "Q": {"3": 3}, "G": {"3": 1}}
    assert st["4"]["new_generators"] == {}
    assert st["5"]["new_generators"] == {"e": {"5": 2}, "P": {"5": 2}, "Q": {"5": 1}, "G": {"5": 1}}
    assert all(v["ok"] for v in rep["levelwise_minimality"].values())


def test_load_error_names_arrow(tmp_path, capsys):
    f = write(tmp_path, "bad.json", BAD_DEGREE)
    assert main(["check-injective", f]) == 3
    err = capsys.readouterr().err
    assert "maps.e->G" in json.loads(err)["error"]["message"]


def test_report_echo_and_digest():
    rep, _ = run(["envelope", c("cp_trivial.json")])
    assert rep["command"]["name"] == "envelope"
    assert len(rep["input_sha256"][c("cp_trivial.json")]) == 64


def test_reports_are_byte_identical(capsys):
    argv = ["oracle", c("c6_T.json"), "--trials", "8", "--seed", "11"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first
    assert "timing_s" not in first


def test_timing_flag():
    rep, _ = run(["envelope", c("cp_trivial.json"), "--timing"])
    assert rep["timing_s"] >= 0


def test_output_file(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["check-injective", c("c6_T.json"), "-o", str(out)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(out.read_text())["injective"] is True


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "eqrat", "check-injective", c("cpq_noninjective.json")],
                       capture_output=True, text=True)
    assert p.returncode == 1
    assert json.loads(p.stdout)["injective"] is False
