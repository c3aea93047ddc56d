"""JSON diagram files and reports.

A diagram file looks like::

    {
      "group": {"p": 3, "q": 2},
      "cap": 11,
      "levels": {
        "e": {"generators": [["x1", 3], ["y1", 5]],
              "relations": ["x1*y1"],
              "differential": {}},
        ...
      },
      "maps": {"e->P": {"x1": "x", "y1": "y1"}, ...},
      "flags": {"one_connected": true, "expect_injective": true}
    }

Levels are ``e``/``G`` for a single prime and ``e``/``P``/``Q``/``G`` for
two primes (P has order p, Q has order q).  Polynomials use ``*``, ``^`` and
rational coefficients such as ``2/3*x1*y1``; odd generators anticommute, so
``y1*x1`` and ``-x1*y1`` are the same relation.
"""

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from .cdga import (AlgebraError, MorphismError, MonomialCDGA, Presentation, from_generators,
                   realize, table_to_presented, vec_to_poly)
from .diagrams import OrbitShape, ShapeError
from .linalg import ONE
from .equivariant import CdgaDiagram, DiagramError


class LoadError(ValueError):
    """Input problem; the message names the offending field."""


@dataclass
class DiagramFile:
    shape: OrbitShape
    cap: int
    presentations: dict        # level -> Presentation
    images: dict               # (src, tgt) -> {generator: polynomial string}
    flags: dict
    digest: str = ""

    def build(self):
        return build_diagram(self)


def corpus_dir():
    return Path(__file__).resolve().parent / "corpus"


def corpus_path(name):
    return corpus_dir() / name


def _need(obj, key, where, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise LoadError("%s: missing field %r" % (where, key))
    val = obj[key]
    if kind is not None and not isinstance(val, kind):
        raise LoadError("%s.%s: expected %s" % (where, key, kind.__name__ if isinstance(kind, type) else kind))
    return val


def parse_text(text, source="<string>"):
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise LoadError("%s: syntax error at line %d column %d: %s" % (source, e.lineno, e.colno, e.msg))
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return parse_obj(raw, source, digest)


def parse_obj(raw, source="<object>", digest=""):
    group = _need(raw, "group", source, dict)
    try:
        p = int(_need(group, "p", source + ".group"))
        q = group.get("q")
        shape = OrbitShape(p, None if q is None else int(q))
    except (ShapeError, TypeError, ValueError) as e:
        raise LoadError("%s.group: %s" % (source, e))
    cap = _need(raw, "cap", source, int)
    if cap < 0:
        raise LoadError("%s.cap: must be >= 0" % source)
    levels = _need(raw, "levels", source, dict)
    pres = {}
    for L in shape.levels:
        where = "%s.levels.%s" % (source, L)
        block = _need(levels, L, source + ".levels", dict)
        gens = block.get("generators", [])
        if not isinstance(gens, list) or not all(
                isinstance(g, list) and len(g) == 2 and isinstance(g[0], str) and isinstance(g[1], int)
                for g in gens):
            raise LoadError("%s.generators: expected a list of [name, degree] pairs" % where)
        rels = block.get("relations", [])
        diff = block.get("differential", {})
        if not isinstance(rels, list) or not isinstance(diff, dict):
            raise LoadError("%s: relations must be a list and differential an object" % where)
        pres[L] = Presentation([tuple(g) for g in gens], [str(r) for r in rels],
                               {str(k): str(v) for k, v in diff.items()}, cap)
    extra = set(levels) - set(shape.levels)
    if extra:
        raise LoadError("%s.levels: unknown levels %s for %r" % (source, sorted(extra), shape))
    maps = _need(raw, "maps", source, dict)
    images = {}
    for a, b in shape.arrows:
        key = "%s->%s" % (a, b)
        block = _need(maps, key, source + ".maps", dict)
        images[(a, b)] = {str(k): str(v) for k, v in block.items()}
    extra = set(maps) - {"%s->%s" % a for a in shape.arrows}
    if extra:
        raise LoadError("%s.maps: unknown arrows %s" % (source, sorted(extra)))
    flags = raw.get("flags", {})
    if not isinstance(flags, dict):
        raise LoadError("%s.flags: expected an object" % source)
    return DiagramFile(shape, cap, pres, images, dict(flags), digest)


def parse(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise LoadError("%s: %s" % (path, e.strerror or e))
    except UnicodeDecodeError as e:
        raise LoadError("%s: not UTF-8 (%s)" % (path, e))
    return parse_text(text, str(path.name))


def build_diagram(df):
    algs = {}
    for L, p in df.presentations.items():
        try:
            algs[L] = realize(p)
        except AlgebraError as e:
            raise LoadError("levels.%s: %s" % (L, e))
    maps = {}
    for (a, b), imgs in df.images.items():
        unknown = set(imgs) - set(algs[a].gs.names)
        if unknown:
            raise LoadError("maps.%s->%s: unknown generators %s" % (a, b, sorted(unknown)))
        try:
            maps[(a, b)] = from_generators(algs[a], algs[b], imgs)
        except (AlgebraError, MorphismError) as e:
            raise LoadError("maps.%s->%s: %s" % (a, b, e))
    try:
        d = CdgaDiagram(df.shape, algs, maps, df.flags.get("one_connected"), check=False)
        d.check(products=False)
    except DiagramError as e:
        raise LoadError("maps: %s" % e)
    d.flags = dict(df.flags)
    d.digest = df.digest
    return d


def load(path):
    return build_diagram(parse(path))


def load_corpus(name):
    return load(corpus_path(name))


# ---------------------------------------------------------------------------
# emission


def _fmt_rat(c):
    return str(c.numerator) if c.denominator == 1 else "%d/%d" % (c.numerator, c.denominator)


def _image_string(tgt, k, v):
    p = vec_to_poly(tgt, k, v)
    return tgt.gs.fmt_poly(p)


def diagram_to_obj(d, flags=None):
    """JSON-ready dict for a CdgaDiagram (table levels are re-presented)."""
    shape = d.shape
    algs = {L: table_to_presented(d.levels[L]) for L in shape.levels}
    # map matrices are in the original bases; table_to_presented keeps the
    # basis order, so the same matrices apply to generators b{k}_{i}
    levels = {}
    for L in shape.levels:
        a = algs[L]
        gs = a.gs
        levels[L] = {
            "generators": [[n, k] for n, k in gs.gens()],
            "relations": [gs.fmt_poly(r) for r in a.relations],
            "differential": {n: gs.fmt_poly(p) for n, p in a.dgen.items() if p},
        }
    maps = {}
    for (s, t) in shape.arrows:
        f = d.maps[(s, t)]
        src, tgt = algs[s], algs[t]
        orig = d.levels[s]
        block = {}
        for n, k in src.gs.gens():
            if k > f.cap:
                block[n] = "0"
                continue
            if orig is src:
                v = src.generator_vec(n)[1]
            else:
                v = _table_basis_vec(orig, n)
            block[n] = _image_string(tgt, k, f.maps[k].apply(v))
        maps["%s->%s" % (s, t)] = block
    obj = {"group": shape.to_json(), "cap": d.cap, "levels": levels, "maps": maps}
    fl = dict(getattr(d, "flags", {}) or {})
    if flags:
        fl.update(flags)
    if fl:
        obj["flags"] = fl
    return obj


def _table_basis_vec(a, name):
    k, i = name[1:].split("_")
    k, i = int(k), int(i) - 1
    v = a.zero(k)
    v[i] = ONE
    return v


def _dump(obj, ind):
    pad = "  " * ind
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        if len(obj) <= 6 and all(not isinstance(v, (dict, list)) for v in obj.values()):
            return json.dumps(obj, ensure_ascii=False)
        items = ["%s  %s: %s" % (pad, json.dumps(str(k)), _dump(v, ind + 1)) for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list) and any(isinstance(x, (dict, list)) and x for x in obj) and \
            not all(isinstance(x, list) and all(not isinstance(y, (dict, list)) for y in x) for x in obj):
        items = ["%s  %s" % (pad, _dump(v, ind + 1)) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    return json.dumps(obj, ensure_ascii=False)


def dumps(obj):
    """JSON with small arrays kept on one line; key order is preserved."""
    return _dump(obj, 0) + "\n"


def emit(d, path=None, flags=None):
    text = dumps(diagram_to_obj(d, flags))
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def mat_json(m):
    return [[_fmt_rat(x) for x in row] for row in m.data]


def dims_json(table):
    """{level: {degree: n}} with string keys in ascending degree order."""
    return {L: {str(k): n for k, n in sorted(t.items()) if n} for L, t in table.items()}
