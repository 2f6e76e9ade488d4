"""File formats: systems, chip-firing graphs, grammars, certificates.

Rationals are always written ``"p/q"`` (or ``"p"`` when ``q == 1``).
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Any

from .certificates import DualCertificate, PrimalCertificate
from .core import ReplacementSystem
from .evaluator import Tree, fmt
from .pseudoloop import PseudoLoop

_RATIONAL = re.compile(r"\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        self.line, self.column = line, column
        super().__init__(f"{line}:{column}: {message}")


class ConversionError(ValueError):
    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(f"{code}: {message}")


def _locate(text: str, needle: str, start: int = 0) -> tuple[int, int]:
    pos = text.find(needle, start)
    if pos < 0:
        return 1, 1
    line = text.count("\n", 0, pos) + 1
    return line, pos - (text.rfind("\n", 0, pos) + 1) + 1


def parse_rational(token: Any) -> Fraction:
    """Integers or ``"p/q"`` strings; floats are refused."""
    if isinstance(token, bool):
        raise ValueError(f"not a rational: {token!r}")
    if isinstance(token, int):
        return Fraction(token)
    if isinstance(token, str):
        m = _RATIONAL.match(token)
        if m:
            num, den = int(m.group(1)), int(m.group(2) or 1)
            if den == 0:
                raise ValueError(f"zero denominator in {token!r}")
            return Fraction(num, den)
    raise ValueError(f"not a rational: {token!r}")


format_rational = fmt


def _load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None


# -- system files --------------------------------------------------------------

def loads_system(text: str) -> ReplacementSystem:
    """Parse a system document.  Semantic problems are left to ``validate``."""
    doc = _load_json(text)
    if not isinstance(doc, dict) or not isinstance(doc.get("functions"), list):
        raise ParseError('expected an object with a "functions" list')
    records = []
    for i, rec in enumerate(doc["functions"]):
        where = f"functions[{i}]"
        if not isinstance(rec, dict):
            raise ParseError(f"{where}: expected an object", *_locate(text, "{"))
        for key in ("name", "value", "rule"):
            if key not in rec:
                raise ParseError(f"{where}: missing {key!r}", *_locate(text, json.dumps(rec.get("name", ""))))
        name, rule = rec["name"], rec["rule"]
        at = _locate(text, json.dumps(name))
        if not isinstance(name, str):
            raise ParseError(f"{where}.name: expected a string", *at)
        try:
            value = parse_rational(rec["value"])
        except ValueError as exc:
            raise ParseError(f"{where}.value: {exc}", *_locate(text, json.dumps(rec["value"]), text.find(json.dumps(name)))) from None
        if not isinstance(rule, list) or not all(isinstance(t, str) for t in rule):
            raise ParseError(f"{where}.rule: expected a list of names", *at)
        records.append((name, value, rule))
    return ReplacementSystem.from_records(records)


def load_system(path: str) -> ReplacementSystem:
    with open(path, encoding="utf-8") as fh:
        return loads_system(fh.read())


def dumps_system(system: ReplacementSystem) -> str:
    """Canonical form: one function per line, values as rational strings."""
    rows = []
    for name, c, pair in zip(system.names, system.values, system.rule):
        targets = [system.names[t] for t in pair]
        rows.append("    " + json.dumps({"name": name, "value": fmt(c), "rule": targets}))
    return '{\n  "functions": [\n' + ",\n".join(rows) + "\n  ]\n}\n"


# -- chip-firing graphs ------------------------------------------------------

def loads_chipfire(text: str) -> dict:
    doc = _load_json(text)
    if not isinstance(doc, dict) or "vertices" not in doc or "edges" not in doc:
        raise ParseError('expected an object with "vertices" and "edges"')
    verts = []
    for i, rec in enumerate(doc["vertices"]):
        try:
            verts.append((rec["name"], parse_rational(rec["value"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"vertices[{i}]: {exc}", *_locate(text, json.dumps(rec.get("name", "")) if isinstance(rec, dict) else "")) from None
    edges = []
    for i, e in enumerate(doc["edges"]):
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, str) for x in e)):
            raise ParseError(f"edges[{i}]: expected [source, target]", *_locate(text, json.dumps(e)))
        edges.append((e[0], e[1]))
    return {"vertices": verts, "edges": edges}


def chipfire_to_system(graph: dict) -> ReplacementSystem:
    """Vertex -> function, chip value -> c, out-edges -> rule.

    Out-edges are ordered loops first, then by target name.
    """
    names = [v for v, _ in graph["vertices"]]
    out: dict[str, list[str]] = {v: [] for v in names}
    for src, dst in graph["edges"]:
        if src not in out:
            raise ConversionError("unknown-vertex", f"edge source {src!r}")
        out[src].append(dst)
    records = []
    for name, value in graph["vertices"]:
        targets = out[name]
        if len(targets) != 2:
            raise ConversionError(
                "outdegree-not-2",
                f"vertex {name!r} has outdegree {len(targets)}; the growth rate "
                "per chip may not converge unless every vertex fires into exactly two")
        targets = sorted(targets, key=lambda t: (t != name, t))
        records.append((name, value, targets))
    return ReplacementSystem.from_records(records)


def system_to_chipfire(system: ReplacementSystem) -> dict:
    return {
        "vertices": [(n, c) for n, c in zip(system.names, system.values)],
        "edges": [(system.names[v], system.names[t]) for v, pair in enumerate(system.rule) for t in pair],
    }


def dumps_chipfire(graph: dict) -> str:
    verts = ",\n".join("    " + json.dumps({"name": n, "value": fmt(c)}) for n, c in graph["vertices"])
    edges = ",\n".join("    " + json.dumps(list(e)) for e in graph["edges"])
    return '{\n  "vertices": [\n' + verts + '\n  ],\n  "edges": [\n' + edges + "\n  ]\n}\n"


# -- CNF grammars --------------------------------------------------------------

_PRODUCTION = re.compile(r"^\s*(\S+)\s*->\s*(\S+)\s+(\S+)\s*$")
_WEIGHT = re.compile(r"^\s*(\S+)\s*=>\s*(.+?)\s*$")


def loads_grammar(text: str) -> ReplacementSystem:
    """``V -> U W`` binary productions and ``V => weight`` terminal weights."""
    order: list[str] = []
    prods: dict[str, list[str]] = {}
    weights: dict[str, Fraction] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        col = len(line) - len(line.lstrip()) + 1
        if m := _PRODUCTION.match(line):
            lhs = m.group(1)
            if lhs in prods:
                raise ParseError(f"second binary production for {lhs}", lineno, col)
            prods[lhs] = [m.group(2), m.group(3)]
        elif m := _WEIGHT.match(line):
            lhs = m.group(1)
            if lhs in weights:
                raise ParseError(f"second terminal weight for {lhs}", lineno, col)
            try:
                weights[lhs] = parse_rational(m.group(2))
            except ValueError as exc:
                raise ParseError(str(exc), lineno, line.index("=>") + 3) from None
        else:
            raise ParseError("expected 'V -> U W' or 'V => weight'", lineno, col)
        if lhs not in order:
            order.append(lhs)
    for nt in order:
        if nt not in prods:
            raise ParseError(f"nonterminal {nt} has no binary production")
        if nt not in weights:
            raise ParseError(f"nonterminal {nt} has no terminal weight")
    return ReplacementSystem.from_records((nt, weights[nt], prods[nt]) for nt in order)


def dumps_grammar(system: ReplacementSystem) -> str:
    lines = []
    for name, c, (u, w) in zip(system.names, system.values, system.rule):
        lines.append(f"{name} -> {system.names[u]} {system.names[w]}")
        lines.append(f"{name} => {fmt(c)}")
    return "\n".join(lines) + "\n"


# -- trees and loops -----------------------------------------------------------

def tree_to_sexpr(system: ReplacementSystem, tree: Tree) -> str:
    if tree.is_leaf:
        return system.names[tree.label]
    return (f"{system.names[tree.label]}({tree_to_sexpr(system, tree.left)}, "
            f"{tree_to_sexpr(system, tree.right)})")


def tree_from_sexpr(system: ReplacementSystem, text: str) -> Tree:
    tokens = re.findall(r"[(),]|[^\s(),]+", text)
    pos = 0

    def parse() -> Tree:
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError("unexpected end of tree")
        name = tokens[pos]
        pos += 1
        try:
            label = system.index(name)
        except KeyError:
            raise ParseError(f"unknown function {name!r} in tree") from None
        if pos < len(tokens) and tokens[pos] == "(":
            pos += 1
            left = parse()
            _expect(",")
            right = parse()
            _expect(")")
            return Tree(label, left, right)
        return Tree(label)

    def _expect(tok):
        nonlocal pos
        if pos >= len(tokens) or tokens[pos] != tok:
            raise ParseError(f"expected {tok!r} in tree")
        pos += 1

    t = parse()
    if pos != len(tokens):
        raise ParseError("trailing text after tree")
    return t


def loop_to_dict(loop: PseudoLoop) -> dict:
    s = loop.system
    return {
        "tree": tree_to_sexpr(s, loop.tree),
        "marked": loop.marked,
        "value": fmt(loop.value),
        "leaves": loop.q,
        "rate": fmt(loop.rate),
    }


def loop_from_dict(system: ReplacementSystem, doc: dict) -> PseudoLoop:
    return PseudoLoop(system, tree_from_sexpr(system, doc["tree"]), doc["marked"])


# -- certificates ----------------------------------------------------------------

def primal_to_dict(system: ReplacementSystem, cert: PrimalCertificate) -> dict:
    return {"kind": "primal", "theta": fmt(cert.theta),
            "z": {n: fmt(z) for n, z in zip(system.names, cert.z)}}


def dual_to_dict(system: ReplacementSystem, cert: DualCertificate) -> dict:
    return {"kind": "dual",
            "x": {n: fmt(x) for n, x in zip(system.names, cert.x) if x},
            "y": {n: fmt(y) for n, y in zip(system.names, cert.y) if y},
            "objective": fmt(cert.objective(system))}


def _by_name(system: ReplacementSystem, mapping: dict, field: str, required: bool):
    if not isinstance(mapping, dict):
        raise ParseError(f"{field}: expected an object")
    unknown = set(mapping) - set(system.names)
    if unknown:
        raise ParseError(f"{field}: unknown function(s) {sorted(unknown)}")
    out = []
    for name in system.names:
        if name not in mapping:
            if required:
                raise ParseError(f"{field}: missing entry for {name}")
            out.append(Fraction(0))
            continue
        try:
            out.append(parse_rational(mapping[name]))
        except ValueError as exc:
            raise ParseError(f"{field}.{name}: {exc}") from None
    return tuple(out)


def primal_from_dict(system: ReplacementSystem, doc: dict) -> PrimalCertificate:
    try:
        theta = parse_rational(doc["theta"])
    except (KeyError, ValueError) as exc:
        raise ParseError(f"theta: {exc}") from None
    return PrimalCertificate(theta, _by_name(system, doc.get("z"), "z", required=True))


def dual_from_dict(system: ReplacementSystem, doc: dict) -> DualCertificate:
    """Absent entries of ``x`` and ``y`` are zero."""
    return DualCertificate(_by_name(system, doc.get("x", {}), "x", required=False),
                           _by_name(system, doc.get("y", {}), "y", required=False))


def loads_certificate_doc(text: str) -> dict:
    doc = _load_json(text)
    if not isinstance(doc, dict):
        raise ParseError("expected a JSON object")
    if doc.get("kind") not in ("primal", "dual") and not ("primal" in doc or "dual" in doc):
        raise ParseError('expected "kind": "primal" | "dual", or a witness bundle')
    return doc
