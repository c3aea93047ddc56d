"""Command line front end.

Every command prints a JSON report (or writes it with ``-o``).  Exit codes:

    0  definitive positive verdict or certificate
    1  definitive negative verdict
    2  inconclusive (no formality certificate found, oracle cannot decide)
    3  input could not be loaded
    4  precondition or usage error
    5  internal error
"""

import argparse
import sys
import time

from . import __version__
from . import diagrams as dg
from .cdga import AlgebraError, MorphismError
from .equivariant import (DiagramError, equivariant_formality, equivariant_minimal_model,
                          equivariant_wedge, levelwise_minimality_report)
from .fileio import LoadError, diagram_to_obj, dims_json, dumps, emit, mat_json, parse
from .sullivan import LiftError

EXIT_OK, EXIT_NO, EXIT_INCONCLUSIVE, EXIT_LOAD, EXIT_PRE, EXIT_INTERNAL = range(6)

PRECONDITION = (AlgebraError, MorphismError, DiagramError, dg.ShapeError,
                dg.NotInjectiveError, dg.ResolutionError, LiftError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2, which is reserved for "inconclusive"
    def error(self, message):
        raise UsageError("%s: %s" % (self.prog, message))


def _load(path):
    df = parse(path)
    return df.build(), df


def _header(args, digests):
    echo = {"name": args.command}
    for key in ("file", "file_p", "file_q", "max_degree", "max_dim", "trials", "seed", "to", "mode", "out"):
        val = getattr(args, key, None)
        if val is not None:
            echo[key] = val
    return {"command": echo, "input_sha256": digests}


def _degrees(table):
    return {str(k): n for k, n in sorted(table.items()) if n}


def _level_dims(d, upto=None):
    return dims_json({L: {k: d.dim(L, k) for k in d.degrees if upto is None or k <= upto}
                      for L in d.shape.levels})


def _injectivity_section(u):
    d = u.underlying()
    env = dg.envelope(d)
    sec = {
        "corner_kernels": {L: _degrees(env.corners.dims(L)) for L in d.shape.levels},
        "source_dims": _level_dims(d),
        "envelope_dims": _level_dims(env.envelope),
        "dimension_mismatches": [
            {"level": L, "degree": k, "source": d.dim(L, k), "envelope": env.envelope.dim(L, k)}
            for L in d.shape.levels for k in d.degrees if d.dim(L, k) != env.envelope.dim(L, k)],
        "surjectivity_failures": [{"arrow": "%s->%s" % a, "degree": k}
                                  for a, k in dg.surjectivity_failures(d)],
    }
    if d.shape.kind == "CyclicP":
        sec["surjective_e_to_G"] = dg.is_injective_cp(d)
    else:
        r = dg.property_I(d)
        sec["property_I"] = {
            "satisfied": r.satisfied,
            "surjective_P_to_G": r.surj_PG,
            "surjective_Q_to_G": r.surj_QG,
            "surjective_to_pullback": r.surj_to_K,
            "pullback_dims": _degrees(r.pullback_K),
            "source_dims": _degrees(r.source_dims),
            "failing_degrees": r.failing_degrees,
        }
    return env, sec


def cmd_check_injective(args):
    u, df = _load(args.file)
    env, sec = _injectivity_section(u)
    rep = _header(args, {args.file: df.digest})
    rep["group"] = u.shape.to_json()
    rep["injective"] = env.injective
    rep.update(sec)
    expect = df.flags.get("expect_injective")
    if expect is not None:
        rep["expect_injective"] = expect
        rep["matches_expectation"] = expect == env.injective
    return rep, EXIT_OK if env.injective else EXIT_NO


def cmd_envelope(args):
    u, df = _load(args.file)
    env, sec = _injectivity_section(u)
    rep = _header(args, {args.file: df.digest})
    rep["injective"] = env.injective
    rep["corner_kernels"] = sec["corner_kernels"]
    rep["source_dims"] = sec["source_dims"]
    rep["envelope_dims"] = sec["envelope_dims"]
    rep["summands"] = {
        L: {str(k): [[H, n] for (H, _, n) in blocks if n] for k, blocks in sorted(env.summands[L].items())
            if any(n for _, _, n in blocks)}
        for L in u.shape.levels}
    d = u.underlying()
    rep["embedding"] = {L: {str(k): mat_json(env.embedding[L][k]) for k in d.degrees if d.dim(L, k)}
                        for L in u.shape.levels}
    return rep, EXIT_OK


def _stage_table(m):
    counts = m.stage_counts()
    table = {}
    for a in m.associated:
        c = counts.get(a.stage)
        table[str(a.stage)] = {
            "new_generators": {L: _degrees(c[L]) for L in m.model.shape.levels} if c else {},
            "associated_dims": _level_dims(a.v),
            "associated_injective": a.injective,
        }
        if a.v.shape.kind == "CyclicPQ" and not a.v.is_zero():
            table[str(a.stage)]["associated_property_I"] = dg.property_I(a.v).satisfied
    return table


def cmd_minimal_model(args):
    u, df = _load(args.file)
    n = args.max_degree
    m = equivariant_minimal_model(u, n)
    lv = levelwise_minimality_report(m)
    rep = _header(args, {args.file: df.digest})
    rep["through"] = m.through
    rep["stages"] = _stage_table(m)
    rep["generator_counts"] = {L: _degrees(c) for L, c in m.model.counts(n).items()}
    rep["generators"] = {L: [[nm, k] for nm, k in m.model.generators_at(L, n)] for L in u.shape.levels}
    rep["levelwise_minimality"] = {
        L: {"ok": v.ok, "classical_counts": _degrees(v.classical_counts), "failures": v.minimality_failures}
        for L, v in lv.items()}
    ok = all(v.ok for v in lv.values()) and all(a.injective for a in m.associated)
    rep["ok"] = ok
    return rep, EXIT_OK if ok else EXIT_NO


def cmd_wedge(args):
    u1, d1 = _load(args.file_p)
    u2, d2 = _load(args.file_q)
    if u1.shape.kind != "CyclicP" or u2.shape.kind != "CyclicP":
        raise DiagramError("wedge needs two single-prime diagrams")
    w = equivariant_wedge(u1, u2)
    inj1, inj2 = not u1.injectivity_failures(), not u2.injectivity_failures()
    w.flags = {"one_connected": bool(w.one_connected)} if w.one_connected is not None else {}
    pi = dg.property_I(w.underlying())
    w.flags["expect_injective"] = pi.satisfied
    rep = _header(args, {args.file_p: d1.digest, args.file_q: d2.digest})
    rep["group"] = w.shape.to_json()
    rep["inputs_injective"] = [inj1, inj2]
    rep["property_I"] = pi.satisfied
    rep["dims"] = dims_json(w.dim_table())
    if args.out:
        emit(w, args.out)
    else:
        rep["diagram"] = diagram_to_obj(w)
    return rep, EXIT_OK


def cmd_formality(args):
    u, df = _load(args.file)
    n = args.max_degree
    cert = equivariant_formality(u, n)
    rep = _header(args, {args.file: df.digest})
    rep["certificate_found"] = cert is not None
    if cert is None:
        return rep, EXIT_INCONCLUSIVE
    rep["through"] = cert.through
    rep["model_generators"] = {L: [[nm, k] for nm, k in cert.model.model.generators_at(L, n)]
                               for L in u.shape.levels}
    rep["psi"] = {L: {str(k): mat_json(f.maps[k]) for k in range(min(n, f.cap) + 1)
                      if f.maps[k].rows and f.maps[k].cols}
                  for L, f in cert.psi.items()}
    return rep, EXIT_OK


def cmd_oracle(args):
    u, df = _load(args.file)
    d = u.underlying()
    env = dg.envelope(d)
    v = dg.lifting_oracle(d, max_dim=args.max_dim, trials=args.trials, seed=args.seed)
    rep = _header(args, {args.file: df.digest})
    rep["envelope_injective"] = env.injective
    rep["extension_problems"] = v.trials
    rep["counterexample"] = v.counterexample
    if v.counterexample is not None:
        if env.injective:
            rep["error"] = "lifting counterexample on an injective diagram"
            return rep, EXIT_INTERNAL
        return rep, EXIT_NO
    return rep, EXIT_OK if env.injective else EXIT_INCONCLUSIVE


def cmd_restrict(args):
    u, df = _load(args.file)
    if u.shape.kind != "CyclicPQ":
        raise dg.ShapeError("restrict needs a two-prime diagram")
    r = u.restrict(args.to, args.mode)
    lo, hi, _ = dg.restriction_levels(u.shape, args.to, args.mode)
    d = r.underlying()
    ok = dg.is_injective_cp(d)
    rep = _header(args, {args.file: df.digest})
    rep["levels"] = {"e": lo, "G": hi}
    rep["injective"] = ok
    rep["surjectivity_failures"] = [k for _, k in dg.surjectivity_failures(d)]
    rep["diagram"] = diagram_to_obj(r, {"expect_injective": ok})
    return rep, EXIT_OK if ok else EXIT_NO


COMMANDS = {
    "check-injective": cmd_check_injective,
    "envelope": cmd_envelope,
    "minimal-model": cmd_minimal_model,
    "wedge": cmd_wedge,
    "formality": cmd_formality,
    "oracle": cmd_oracle,
    "restrict": cmd_restrict,
}


def build_parser():
    p = _Parser(prog="eqrat", description="Injectivity, models and formality for diagrams over C_p and C_pq.")
    p.add_argument("--version", action="version", version="eqrat " + __version__)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(name, help_):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--timing", action="store_true", help="add wall-clock seconds to the report")
        return s

    s = add("check-injective", "injectivity verdict with corner kernels and Property I")
    s.add_argument("file")
    s.add_argument("-o", "--out")
    s = add("envelope", "injective envelope and embedding")
    s.add_argument("file")
    s.add_argument("-o", "--out")
    s = add("minimal-model", "equivariant minimal model of a zero-differential diagram")
    s.add_argument("file")
    s.add_argument("--max-degree", type=int, required=True)
    s.add_argument("-o", "--out")
    s = add("wedge", "equivariant wedge of a C_p and a C_q diagram")
    s.add_argument("file_p")
    s.add_argument("file_q")
    s.add_argument("-o", "--out", help="write the wedge diagram here")
    s = add("formality", "equivariant formality certificate")
    s.add_argument("file")
    s.add_argument("--max-degree", type=int, required=True)
    s.add_argument("-o", "--out")
    s = add("oracle", "cross-check injectivity with the lifting oracle")
    s.add_argument("file")
    s.add_argument("--max-dim", type=int, default=12)
    s.add_argument("--trials", type=int, default=50)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--out")
    s = add("restrict", "restrict a two-prime diagram to one subgroup")
    s.add_argument("file")
    s.add_argument("--to", choices=["P", "Q"], required=True)
    s.add_argument("--mode", choices=["ambient", "fixed"], required=True)
    s.add_argument("-o", "--out")
    return p


def _error_report(args, kind, msg):
    rep = {"command": {"name": getattr(args, "command", None)}} if args else {}
    rep["error"] = {"kind": kind, "message": msg}
    return rep


def run(argv=None):
    """Parse ``argv`` and return (report dict, exit code)."""
    args = None
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        return _error_report(None, "usage", str(e)), EXIT_PRE
    t0 = time.perf_counter()
    try:
        rep, code = COMMANDS[args.command](args)
    except LoadError as e:
        return _error_report(args, "load", str(e)), EXIT_LOAD
    except PRECONDITION as e:
        return _error_report(args, "precondition", "%s: %s" % (type(e).__name__, e)), EXIT_PRE
    except Exception as e:   # noqa: BLE001 - reported, never swallowed silently
        return _error_report(args, "internal", "%s: %s" % (type(e).__name__, e)), EXIT_INTERNAL
    if args.timing:
        rep["timing_s"] = round(time.perf_counter() - t0, 3)
    rep["exit_code"] = code
    return rep, code


def main(argv=None):
    if argv is None:
        argv = sys.argv[1:]
    try:
        rep, code = run(argv)
    except SystemExit as e:       # --help / --version
        return e.code or 0
    text = dumps(rep)
    out = None
    if code <= EXIT_INTERNAL and "error" not in rep:
        args = build_parser().parse_args(argv)
        if args.command != "wedge":
            out = args.out
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stream = sys.stderr if "error" in rep and code > EXIT_INCONCLUSIVE else sys.stdout
        stream.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
