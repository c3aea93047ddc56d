"""The command line front end on the bundled corpus.

Equivalent shell commands are printed before each report summary.

Run:  python3 demos/06_command_line.py
"""

import tempfile
from pathlib import Path

from eqrat.cli import run
from eqrat.fileio import corpus_path


def c(name):
    return str(corpus_path(name))


def show(argv, keys):
    rep, code = run(argv)
    print("\n$ eqrat %s\n  exit %d" % (" ".join(Path(a).name if a.endswith(".json") else a for a in argv), code))
    for k in keys:
        print("  %s: %s" % (k, rep.get(k)))


print(__doc__.splitlines()[0])
show(["check-injective", c("cpq_noninjective.json")], ["injective", "property_I"])
show(["check-injective", c("s3_reflection_c2.json")], ["injective", "surjectivity_failures"])
show(["minimal-model", c("c6_T.json"), "--max-degree", "5"], ["generator_counts"])
show(["formality", c("s2_model_c3.json"), "--max-degree", "6"], ["certificate_found", "model_generators"])
show(["formality", c("s3_reflection_c2.json"), "--max-degree", "4"], ["certificate_found"])
show(["oracle", c("cpq_noninjective.json"), "--trials", "10"], ["envelope_injective", "counterexample"])
show(["restrict", c("c6_T.json"), "--to", "Q", "--mode", "fixed"], ["levels", "injective"])
with tempfile.TemporaryDirectory() as tmp:
    out = str(Path(tmp) / "wedge.json")
    show(["wedge", c("cp_trivial.json"), c("cq_trivial.json"), "-o", out], ["property_I", "dims"])
