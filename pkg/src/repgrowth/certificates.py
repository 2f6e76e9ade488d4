"""Primal/dual certificates for the growth-rate linear program.

Primal constraints, for every ``v`` with ``M(v) = (u, w)``::

    z_v >= c_v - theta
    z_v >= z_u + z_w

The dual has flows ``x_v + y_v = sum of y_u over parents u of v`` (a parent
with ``M(u) = (v, v)`` counts twice), ``x, y >= 0``, ``sum x = 1`` and
objective ``sum c_v x_v``.  Every check here is exact.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import ReplacementSystem
from .evaluator import Tree, tree_value
from .pseudoloop import PseudoLoop

LEFT, RIGHT = 0, 1


class NotOptimalError(ValueError):
    code = "not-optimal"


class NotDecomposableError(ValueError):
    pass


@dataclass(frozen=True)
class PrimalCertificate:
    theta: Fraction
    z: tuple[Fraction, ...]


@dataclass(frozen=True)
class DualCertificate:
    x: tuple[Fraction, ...]
    y: tuple[Fraction, ...]

    def objective(self, system: ReplacementSystem) -> Fraction:
        return sum((c * x for c, x in zip(system.values, self.x)), Fraction(0))


@dataclass(frozen=True)
class Inequality:
    function: str
    kind: str  # "base" or "split"
    lhs: Fraction
    rhs: Fraction

    def __str__(self):
        op = "c - theta" if self.kind == "base" else "z_u + z_w"
        return f"{self.function}: z = {self.lhs} < {op} = {self.rhs}"


def check_primal(system: ReplacementSystem, cert: PrimalCertificate) -> list[Inequality]:
    """Violated inequalities; empty means feasible."""
    if len(cert.z) != len(system):
        raise ValueError("z has the wrong length")
    bad = []
    for v, (u, w) in enumerate(system.rule):
        zv = cert.z[v]
        base = system.values[v] - cert.theta
        if zv < base:
            bad.append(Inequality(system.names[v], "base", zv, base))
        split = cert.z[u] + cert.z[w]
        if zv < split:
            bad.append(Inequality(system.names[v], "split", zv, split))
    return bad


def _ranks(system: ReplacementSystem, cert: PrimalCertificate) -> list[int | None]:
    """Round at which each function becomes decomposable, or None.

    Rank 0 means ``z_v = c_v - theta``; rank ``r > 0`` means the split
    equality holds with both children of rank below ``r``.
    """
    n = len(system)
    rank: list[int | None] = [None] * n
    for v in range(n):
        if cert.z[v] == system.values[v] - cert.theta:
            rank[v] = 0
    tight = [cert.z[v] == cert.z[u] + cert.z[w] for v, (u, w) in enumerate(system.rule)]
    parents: list[list[int]] = [[] for _ in range(n)]
    for v, (u, w) in enumerate(system.rule):
        if tight[v]:
            parents[u].append(v)
            if w != u:
                parents[w].append(v)
    frontier = [v for v in range(n) if rank[v] == 0]
    r = 0
    while frontier:
        r += 1
        nxt = []
        for child in frontier:
            for v in parents[child]:
                u, w = system.rule[v]
                if rank[v] is None and rank[u] is not None and rank[w] is not None:
                    rank[v] = r
                    nxt.append(v)
        frontier = nxt
    return rank


def decomposable_set(system: ReplacementSystem, cert: PrimalCertificate) -> frozenset[int]:
    return frozenset(v for v, r in enumerate(_ranks(system, cert)) if r is not None)


def decomposition_edges(system: ReplacementSystem,
                        cert: PrimalCertificate) -> list[list[tuple[int, int]]]:
    """``out[v]`` lists ``(target, side)`` pairs, left side first."""
    dec = decomposable_set(system, cert)
    out: list[list[tuple[int, int]]] = [[] for _ in range(len(system))]
    for v, (u, w) in enumerate(system.rule):
        if cert.z[v] != cert.z[u] + cert.z[w]:
            continue
        if w in dec:
            out[v].append((u, LEFT))
        if u in dec:
            out[v].append((w, RIGHT))
    return out


def decomposition_graph(system: ReplacementSystem, cert: PrimalCertificate) -> set[tuple[int, int]]:
    return {(v, t) for v, es in enumerate(decomposition_edges(system, cert)) for t, _ in es}


def decomposition_tree(system: ReplacementSystem, cert: PrimalCertificate, v: int) -> Tree:
    """Tree rooted at ``v`` with ``sum(c - theta over leaves) == z_v``."""
    rank = _ranks(system, cert)
    if rank[v] is None:
        raise NotDecomposableError(f"{system.names[v]} is not decomposable")

    def build(x: int) -> Tree:
        if rank[x] == 0:
            return Tree(x)
        u, w = system.rule[x]
        return Tree(x, build(u), build(w))

    return build(v)


def find_cycle(edges: Sequence[Sequence[tuple[int, int]]]) -> list[tuple[int, int]] | None:
    """First cycle found by DFS from the smallest vertex.

    Returned as ``[(v_0, side_0), ..., (v_k, side_k)]`` where ``side_i`` is
    the step from ``v_i`` to ``v_{i+1}`` (indices mod k+1).
    """
    n = len(edges)
    color = [0] * n  # 0 new, 1 on stack, 2 done
    for start in range(n):
        if color[start]:
            continue
        stack: list[tuple[int, int]] = []  # (vertex, next edge index)
        trail: list[tuple[int, int]] = []  # (vertex, side taken)
        color[start] = 1
        stack.append((start, 0))
        while stack:
            v, i = stack[-1]
            if i == len(edges[v]):
                stack.pop()
                color[v] = 2
                if trail:
                    trail.pop()
                continue
            stack[-1] = (v, i + 1)
            t, side = edges[v][i]
            if color[t] == 1:
                path = [s[0] for s in stack]
                sides = [s for _, s in trail] + [side]
                cyc = list(zip(path, sides))
                k = path.index(t)
                return cyc[k:]
            if color[t] == 0:
                color[t] = 1
                trail.append((v, side))
                stack.append((t, 0))
    return None


def pseudo_loop_from_optimum(system: ReplacementSystem, cert: PrimalCertificate) -> PseudoLoop:
    """Pseudo-loop of rate ``theta`` read off a cycle of the decomposition graph."""
    if check_primal(system, cert):
        raise ValueError("certificate is not primal-feasible")
    cycle = find_cycle(decomposition_edges(system, cert))
    if cycle is None:
        raise NotOptimalError("not-optimal: decomposition graph is acyclic, theta exceeds the rate")
    root = cycle[0][0]
    t = Tree(root)
    for v, side in reversed(cycle):
        u, w = system.rule[v]
        if side == LEFT:
            t = Tree(v, t, decomposition_tree(system, cert, w))
        else:
            t = Tree(v, decomposition_tree(system, cert, u), t)
    marked = "".join("L" if side == LEFT else "R" for _, side in cycle)
    loop = PseudoLoop(system, t, marked)
    assert loop.rate == cert.theta, "decomposition loop rate differs from theta"
    return loop


def dual_from_pseudo_loop(system: ReplacementSystem, loop: PseudoLoop) -> DualCertificate:
    xs: Counter[int] = Counter()
    ys: Counter[int] = Counter()
    for _, t in loop.tree.nodes():
        (xs if t.is_leaf else ys)[t.label] += 1
    xs[loop.root] -= 1
    m = sum(xs.values())
    n = len(system)
    return DualCertificate(tuple(Fraction(xs[v], m) for v in range(n)),
                           tuple(Fraction(ys[v], m) for v in range(n)))


def check_dual(system: ReplacementSystem, cert: DualCertificate) -> tuple[list[str], Fraction]:
    """``(violations, objective)``; no violations means feasible."""
    n = len(system)
    if len(cert.x) != n or len(cert.y) != n:
        raise ValueError("x and y must have one entry per function")
    bad = []
    inflow = [Fraction(0)] * n
    for u, (a, b) in enumerate(system.rule):
        inflow[a] += cert.y[u]
        inflow[b] += cert.y[u]
    for v in range(n):
        name = system.names[v]
        if cert.x[v] < 0:
            bad.append(f"{name}: x = {cert.x[v]} < 0")
        if cert.y[v] < 0:
            bad.append(f"{name}: y = {cert.y[v]} < 0")
        if cert.x[v] + cert.y[v] != inflow[v]:
            bad.append(f"{name}: flow x + y = {cert.x[v] + cert.y[v]} != {inflow[v]}")
    total = sum(cert.x, Fraction(0))
    if total != 1:
        bad.append(f"sum of x is {total}, expected 1")
    return bad, cert.objective(system)


def loop_tree_residual(system: ReplacementSystem, cert: PrimalCertificate, tree: Tree) -> Fraction:
    """``sum over leaves of (c - theta)``; equals ``z_root`` for decomposition trees."""
    return tree_value(system, tree) - cert.theta * tree.size
