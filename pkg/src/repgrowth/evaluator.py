"""Exact dynamic program for ``v(n)`` and ``g(n)`` with witness trees.

This is the slow, trusted reference: O(|V| n^2) integer operations on the
system scaled to integer starting values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .core import ReplacementSystem


@dataclass(frozen=True)
class Tree:
    """Labeled binary tree node.  Leaves have no children."""

    label: int
    left: "Tree | None" = None
    right: "Tree | None" = None
    size: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if (self.left is None) != (self.right is None):
            raise ValueError("a node has either zero or two children")
        size = 1 if self.left is None else self.left.size + self.right.size
        object.__setattr__(self, "size", size)

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def leaves(self) -> Iterator["Tree"]:
        stack = [self]
        while stack:
            t = stack.pop()
            if t.is_leaf:
                yield t
            else:
                stack.append(t.right)
                stack.append(t.left)

    def nodes(self, path: str = "") -> Iterator[tuple[str, "Tree"]]:
        """Preorder ``(path, node)`` pairs; paths are strings over ``LR``."""
        stack = [(path, self)]
        while stack:
            p, t = stack.pop()
            yield p, t
            if not t.is_leaf:
                stack.append((p + "R", t.right))
                stack.append((p + "L", t.left))

    def at(self, path: str) -> "Tree":
        t = self
        for step in path:
            if t.is_leaf:
                raise KeyError(path)
            t = t.left if step == "L" else t.right
        return t

    def replace(self, path: str, sub: "Tree") -> "Tree":
        if not path:
            return sub
        if self.is_leaf:
            raise KeyError(path)
        if path[0] == "L":
            return Tree(self.label, self.left.replace(path[1:], sub), self.right)
        return Tree(self.label, self.left, self.right.replace(path[1:], sub))

    def labels(self) -> tuple[int, ...]:
        return tuple(t.label for _, t in self.nodes())

    def depth(self) -> int:
        return max(len(p) for p, _ in self.nodes())


def leaf(label: int) -> Tree:
    return Tree(label)


def node(label: int, left: Tree, right: Tree) -> Tree:
    return Tree(label, left, right)


def tree_value(system: ReplacementSystem, tree: Tree) -> Fraction:
    return sum((system.values[t.label] for t in tree.leaves()), Fraction(0))


def check_tree(system: ReplacementSystem, tree: Tree) -> list[str]:
    """Paths of internal nodes whose children disagree with the rule."""
    bad = []
    for path, t in tree.nodes():
        if not t.is_leaf and (t.left.label, t.right.label) != tuple(system.rule[t.label]):
            bad.append(path)
    return bad


@dataclass
class _Table:
    scale: int
    best: list[list[int]]   # best[v][k], k >= 1; index 0 unused
    split: list[list[int]]  # left-subtree size chosen for best[v][k]


def _solve(system: ReplacementSystem, n: int) -> _Table:
    if n < 1:
        raise ValueError("n must be a positive integer")
    d = system.common_denominator()
    nv = len(system)
    best = [[0, int(c * d)] + [0] * (n - 1) for c in system.values]
    split = [[0] * (n + 1) for _ in range(nv)]
    rule = system.rule
    for k in range(2, n + 1):
        for v in range(nv):
            bu, bw = best[rule[v][0]], best[rule[v][1]]
            top, arg = bu[1] + bw[k - 1], 1
            for j in range(2, k):
                s = bu[j] + bw[k - j]
                if s > top:
                    top, arg = s, j
            best[v][k] = top
            split[v][k] = arg
    return _Table(d, best, split)


def eval_v(system: ReplacementSystem, v: int, n: int) -> Fraction:
    t = _solve(system, n)
    return Fraction(t.best[v][n], t.scale)


def eval_g(system: ReplacementSystem, n: int) -> Fraction:
    t = _solve(system, n)
    return Fraction(max(row[n] for row in t.best), t.scale)


def g_table(system: ReplacementSystem, n_max: int) -> list[Fraction]:
    t = _solve(system, n_max)
    return [Fraction(max(row[k] for row in t.best), t.scale) for k in range(1, n_max + 1)]


def v_table(system: ReplacementSystem, n_max: int) -> list[list[Fraction]]:
    """``out[v][k-1] = v(k)`` for every function and ``k <= n_max``."""
    t = _solve(system, n_max)
    return [[Fraction(x, t.scale) for x in row[1:]] for row in t.best]


def _rebuild(system: ReplacementSystem, t: _Table, v: int, k: int) -> Tree:
    if k == 1:
        return Tree(v)
    j = t.split[v][k]
    u, w = system.rule[v]
    return Tree(v, _rebuild(system, t, u, j), _rebuild(system, t, w, k - j))


def best_tree(system: ReplacementSystem, n: int, root: int | None = None) -> Tree:
    """An optimal tree with ``n`` leaves.

    Ties go to the smallest root index, then to the smallest left-subtree
    size at every internal node.
    """
    t = _solve(system, n)
    if root is None:
        top = max(row[n] for row in t.best)
        root = next(v for v in range(len(system)) if t.best[v][n] == top)
    return _rebuild(system, t, root, n)


# -- export -----------------------------------------------------------------

def fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _leaf_text(system, t: Tree) -> str:
    return f"{system.names[t.label]} = {fmt(system.values[t.label])}"


def tree_to_text(system: ReplacementSystem, tree: Tree, marked: str | None = None,
                 indent: str = "  ") -> str:
    lines = []
    for path, t in tree.nodes():
        text = _leaf_text(system, t) if t.is_leaf else system.names[t.label]
        if marked is not None and path == marked:
            text += "  [marked]"
        lines.append(indent * len(path) + text)
    return "\n".join(lines)


def tree_to_dot(system: ReplacementSystem, tree: Tree, marked: str | None = None,
                name: str = "tree") -> str:
    main = set()
    if marked is not None:
        main = {marked[:i] for i in range(len(marked) + 1)}
    out = [f"digraph {name} {{"]
    for path, t in tree.nodes():
        nid = "n" + (path or "root")
        label = _leaf_text(system, t) if t.is_leaf else system.names[t.label]
        attrs = [f'label="{label}"']
        if path in main:
            attrs.append("color=red")
        if marked is not None and path == marked:
            attrs.append("style=bold")
        out.append(f"  {nid} [{', '.join(attrs)}];")
        if not t.is_leaf:
            for step in "LR":
                child = "n" + path + step
                style = ' [color=red]' if path + step in main else ""
                out.append(f"  {nid} -> {child}{style};")
    out.append("}")
    return "\n".join(out) + "\n"
