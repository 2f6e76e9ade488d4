"""Replacement systems, exact scalars and dependency-graph analyses.

A system is a finite list of functions ``v`` with starting values ``c_v``
and a rule ``M(v) = (u, w)``.  Everything downstream refers to functions
by their 0-based index; names only matter at the file boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import networkx as nx

Rational = Fraction


class InvalidSystemError(ValueError):
    def __init__(self, violations: Sequence["Violation"]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


@dataclass(frozen=True)
class Violation:
    code: str
    where: str
    detail: str = ""

    def __str__(self) -> str:
        text = f"{self.code}: {self.where}"
        return f"{text} ({self.detail})" if self.detail else text


@dataclass(frozen=True)
class ReplacementSystem:
    """Immutable replacement system.

    ``rule[v]`` is the ordered pair ``(u, w)``: the left child of a node
    labeled ``v`` is labeled ``u`` and the right child ``w``.  The
    constructor does not validate; use :func:`validate` or
    :meth:`checked`.
    """

    names: tuple[str, ...]
    values: tuple[Fraction, ...]
    rule: tuple[tuple[int, ...], ...]

    @classmethod
    def from_records(cls, records: Iterable[tuple[str, object, Sequence[str]]]) -> "ReplacementSystem":
        """Build from ``(name, value, (left_name, right_name))`` records.

        Unknown rule targets resolve to ``-1`` so that :func:`validate`
        can report them instead of failing here.
        """
        records = list(records)
        names = tuple(r[0] for r in records)
        index = {}
        for i, name in enumerate(names):
            index.setdefault(name, i)
        values = tuple(Fraction(r[1]) for r in records)
        rule = tuple(tuple(index.get(t, -1) for t in r[2]) for r in records)
        return cls(names, values, rule)

    @classmethod
    def build(cls, values: Sequence[object], rule: Sequence[Sequence[int]],
              names: Sequence[str] | None = None) -> "ReplacementSystem":
        if names is None:
            names = [f"v{i}" for i in range(len(values))]
        system = cls(tuple(names), tuple(Fraction(c) for c in values),
                     tuple(tuple(p) for p in rule))
        return system.checked()

    def checked(self) -> "ReplacementSystem":
        problems = validate(self)
        if problems:
            raise InvalidSystemError(problems)
        return self

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(name) from None

    def with_values(self, values: Sequence[object]) -> "ReplacementSystem":
        return ReplacementSystem(self.names, tuple(Fraction(c) for c in values), self.rule)

    def common_denominator(self) -> int:
        return math.lcm(*(c.denominator for c in self.values)) if self.values else 1


def validate(system: ReplacementSystem) -> list[Violation]:
    """Return every invariant violation; an empty list means valid."""
    out: list[Violation] = []
    n = len(system.names)
    if n == 0:
        return [Violation("empty-system", "<system>")]
    if len(system.values) != n or len(system.rule) != n:
        out.append(Violation("shape-mismatch", "<system>",
                             f"{n} names, {len(system.values)} values, {len(system.rule)} rules"))
    seen: dict[str, int] = {}
    for i, name in enumerate(system.names):
        if not isinstance(name, str) or not name:
            out.append(Violation("empty-name", f"#{i}"))
        elif name in seen:
            out.append(Violation("duplicate-name", name, f"indices {seen[name]} and {i}"))
        else:
            seen[name] = i
    for i, pair in enumerate(system.rule):
        where = system.names[i] if i < n and system.names[i] else f"#{i}"
        if len(pair) != 2:
            out.append(Violation("bad-arity", where, f"rule has {len(pair)} targets, expected 2"))
            continue
        for side, t in zip("LR", pair):
            if not (isinstance(t, int) and 0 <= t < n):
                out.append(Violation("unknown-rule-target", where, f"{side} target {t}"))
    return out


def dependency_graph(system: ReplacementSystem) -> nx.DiGraph:
    """Edge ``v -> u`` whenever ``u`` appears in ``M(v)``; self-loops kept."""
    g = nx.DiGraph()
    g.add_nodes_from(range(len(system)))
    for v, (u, w) in enumerate(system.rule):
        g.add_edge(v, u)
        g.add_edge(v, w)
    return g


@dataclass(frozen=True)
class Condensation:
    components: tuple[frozenset[int], ...]
    edges: frozenset[tuple[int, int]]
    single: tuple[bool, ...]

    def component_of(self, v: int) -> int:
        for i, comp in enumerate(self.components):
            if v in comp:
                return i
        raise KeyError(v)

    def minimal(self) -> list[int]:
        """Components with no outgoing edge in the component order."""
        has_out = {a for a, _ in self.edges}
        return [i for i in range(len(self.components)) if i not in has_out]


def condensation(system: ReplacementSystem) -> Condensation:
    g = dependency_graph(system)
    cg = nx.condensation(g)
    # networkx numbers components in topological order already
    comps = tuple(frozenset(cg.nodes[i]["members"]) for i in range(cg.number_of_nodes()))
    single = tuple(len(c) == 1 and not g.has_edge(next(iter(c)), next(iter(c))) for c in comps)
    return Condensation(comps, frozenset(cg.edges()), single)


def value_bounds(system: ReplacementSystem) -> tuple[Fraction, Fraction]:
    return min(system.values), max(system.values)
