"""Pseudo-loops: pumping, inner loops, and the bounded exhaustive search.

A pseudo-loop is a composition tree plus a marked leaf carrying the root's
label.  Replacing the marked leaf by a fresh copy of the loop ("pumping")
adds ``q = leaves - 1`` leaves and ``value`` to the evaluation each time.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .core import ReplacementSystem
from .evaluator import Tree, check_tree, tree_to_dot, tree_to_text

DEFAULT_ENUMERATION_CAP = 4


class InvalidLoopError(ValueError):
    pass


class EnumerationTooLarge(RuntimeError):
    code = "enumeration-too-large"


@dataclass(frozen=True)
class PseudoLoop:
    system: ReplacementSystem
    tree: Tree
    marked: str

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise InvalidLoopError("; ".join(problems))

    def problems(self) -> list[str]:
        out = []
        try:
            m = self.tree.at(self.marked)
        except KeyError:
            return [f"marked path {self.marked!r} leaves the tree"]
        if not m.is_leaf:
            out.append("marked node is not a leaf")
        if m.label != self.tree.label:
            out.append("marked leaf label differs from root label")
        if self.tree.size < 2:
            out.append("a pseudo-loop needs at least two leaves")
        bad = check_tree(self.system, self.tree)
        if bad:
            out.append(f"rule violated at {bad[0] or 'root'}")
        return out

    @property
    def root(self) -> int:
        return self.tree.label

    @property
    def q(self) -> int:
        """Number of leaves other than the marked one."""
        return self.tree.size - 1

    @cached_property
    def value(self) -> Fraction:
        vals = self.system.values
        total = sum((vals[t.label] for t in self.tree.leaves()), Fraction(0))
        return total - vals[self.root]

    @property
    def rate(self) -> Fraction:
        return self.value / self.q

    def main_path_labels(self) -> tuple[int, ...]:
        return tuple(self.tree.at(self.marked[:i]).label for i in range(len(self.marked) + 1))

    def side_leaves(self) -> list[int]:
        return [t.label for p, t in self.tree.nodes() if t.is_leaf and p != self.marked]

    def sort_key(self):
        return (-self.rate, self.tree.size, self.tree.labels(), self.marked)

    def to_text(self) -> str:
        return tree_to_text(self.system, self.tree, self.marked)

    def to_dot(self, name: str = "pseudoloop") -> str:
        return tree_to_dot(self.system, self.tree, self.marked, name)


def rate(loop: PseudoLoop) -> Fraction:
    return loop.rate


def pump(loop: PseudoLoop, k: int) -> Tree:
    """``T^k``: the loop with its marked leaf replaced ``k - 1`` times by itself."""
    if k < 1:
        raise ValueError("k must be >= 1")
    out = loop.tree
    for i in range(1, k):
        out = out.replace(loop.marked * i, loop.tree)
    return out


def pump_loop(loop: PseudoLoop, k: int) -> PseudoLoop:
    return PseudoLoop(loop.system, pump(loop, k), loop.marked * k)


@dataclass(frozen=True)
class InnerLoopSite:
    ancestor: str
    descendant: str

    def __post_init__(self):
        if not (self.descendant.startswith(self.ancestor) and len(self.descendant) > len(self.ancestor)):
            raise ValueError("descendant must lie strictly below ancestor")


def find_inner_loops(tree: Tree) -> list[InnerLoopSite]:
    """All proper ancestor/descendant pairs with equal labels, preorder."""
    out = []
    for path, t in tree.nodes():
        if t.is_leaf:
            continue
        for sub, s in t.nodes(path):
            if sub != path and s.label == t.label:
                out.append(InnerLoopSite(path, sub))
    return out


def remove_inner_loop(tree: Tree, site: InnerLoopSite) -> Tree:
    try:
        a = tree.at(site.ancestor)
        d = tree.at(site.descendant)
    except KeyError:
        raise ValueError(f"site {site} is not in the tree") from None
    if a.label != d.label:
        raise ValueError(f"site {site} joins different labels")
    return tree.replace(site.ancestor, d)


def is_removable(loop: PseudoLoop, site: InnerLoopSite) -> bool:
    """Contraction keeps the marked leaf and still leaves a valid pseudo-loop."""
    anc, desc, mk = site.ancestor, site.descendant, loop.marked
    if mk.startswith(anc) and not mk.startswith(desc):
        return False
    new_marked = mk
    if mk.startswith(desc):
        new_marked = anc + mk[len(desc):]
    tree = remove_inner_loop(loop.tree, site)
    return tree.size >= 2 and tree.at(new_marked).label == tree.label


def contract(loop: PseudoLoop, site: InnerLoopSite) -> PseudoLoop:
    if not is_removable(loop, site):
        raise ValueError(f"site {site} is not removable")
    mk = loop.marked
    if mk.startswith(site.descendant):
        mk = site.ancestor + mk[len(site.descendant):]
    return PseudoLoop(loop.system, remove_inner_loop(loop.tree, site), mk)


def removable_sites(loop: PseudoLoop) -> list[InnerLoopSite]:
    return [s for s in find_inner_loops(loop.tree) if is_removable(loop, s)]


# -- bounded search ----------------------------------------------------------

def size_bound(system: ReplacementSystem) -> int:
    n = len(system)
    return n * 2 ** (n - 1)


def _free_subtrees(system: ReplacementSystem):
    """Memoized generator of trees whose root-to-node paths repeat no label."""
    memo: dict[tuple[int, frozenset], list[Tree]] = {}

    def trees(v: int, above: frozenset) -> list[Tree]:
        key = (v, above)
        if key not in memo:
            out = [Tree(v)]
            u, w = system.rule[v]
            seen = above | {v}
            if u not in seen and w not in seen:
                for left, right in itertools.product(trees(u, seen), trees(w, seen)):
                    out.append(Tree(v, left, right))
            memo[key] = out
        return memo[key]

    return lambda v: trees(v, frozenset())


def _main_paths(system: ReplacementSystem, root: int):
    """Yield ``(labels, steps)`` for each main path from ``root`` back to it.

    Labels after the root are pairwise distinct and differ from the root.
    ``labels`` lists the internal nodes only; the marked leaf is implied.
    """
    def walk(labels: list[int], steps: str):
        u, w = system.rule[labels[-1]]
        for step, nxt in (("L", u), ("R", w)):
            if nxt == root:
                yield list(labels), steps + step
            elif nxt not in labels:
                labels.append(nxt)
                yield from walk(labels, steps + step)
                labels.pop()

    yield from walk([root], "")


def iter_reduced_loops(system: ReplacementSystem, cap: int = DEFAULT_ENUMERATION_CAP):
    """Yield every pseudo-loop without a removable inner pseudo-loop."""
    if len(system) > cap:
        raise EnumerationTooLarge(
            f"enumeration-too-large: |V| = {len(system)} exceeds cap {cap}")
    free = _free_subtrees(system)
    for root in range(len(system)):
        for labels, steps in _main_paths(system, root):
            sides = []
            for lab, step in zip(labels, steps):
                u, w = system.rule[lab]
                sides.append(free(w if step == "L" else u))
            for choice in itertools.product(*sides):
                t = Tree(root)
                for lab, step, side in zip(reversed(labels), reversed(steps), reversed(choice)):
                    t = Tree(lab, t, side) if step == "L" else Tree(lab, side, t)
                yield PseudoLoop(system, t, steps)


def enumerate_reduced_loops(system: ReplacementSystem,
                            cap: int = DEFAULT_ENUMERATION_CAP) -> list[PseudoLoop]:
    """Sorted by rate (descending), then size, then labels."""
    return sorted(iter_reduced_loops(system, cap), key=PseudoLoop.sort_key)


def max_loop_rate(system: ReplacementSystem, cap: int = DEFAULT_ENUMERATION_CAP) -> Fraction:
    return max(loop.rate for loop in iter_reduced_loops(system, cap))
