"""Rate test, bisection, and exact growth rate by mediant search.

``rate_test(system, l0)`` decides ``l0 < rate`` in O(|V|^2) operations.
The exact algorithm scales starting values to integers; the rate then
has a denominator at most ``B = |V| 2^(|V|-1)``, so a Stern-Brocot search
can stop once its bracket is narrower than ``1/B^2``.  Since ``B`` is
exponential, each step also checks whether the upper end is attained by a
tight cycle and stops there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .certificates import (PrimalCertificate, decomposition_edges, find_cycle,
                           pseudo_loop_from_optimum)
from .core import ReplacementSystem, value_bounds
from .evaluator import Tree
from .pseudoloop import PseudoLoop, size_bound


@dataclass(frozen=True)
class PositiveCycle:
    """``lambda0`` is below the rate.

    ``cycle`` is a dependency cycle ``v -> ... -> v`` (each entry uses the
    next one as a child) closed by expanding ``cycle[0]``.
    """

    lambda0: Fraction
    cycle: tuple[int, ...]
    _expanded: tuple[bool, ...] = field(repr=False, compare=False, default=())


@dataclass(frozen=True)
class MaxValues:
    """``lambda0`` is at least the rate; ``z`` are the best shifted tree values."""

    lambda0: Fraction
    z: tuple[Fraction, ...]


RateTestResult = PositiveCycle | MaxValues


@dataclass(frozen=True)
class RateInterval:
    lo: Fraction
    hi: Fraction

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi


class InternalConsistencyError(RuntimeError):
    pass


def _shifted_ints(system: ReplacementSystem, lambda0: Fraction) -> tuple[list[int], int]:
    d = math.lcm(system.common_denominator(), lambda0.denominator)
    return [int((c - lambda0) * d) for c in system.values], d


def rate_test(system: ReplacementSystem, lambda0) -> RateTestResult:
    lambda0 = Fraction(lambda0)
    z, scale = _shifted_ints(system, lambda0)
    n = len(system)
    rule = system.rule
    expanded = [False] * n
    dependents: list[list[int]] = [[] for _ in range(n)]

    progress = True
    while progress:
        progress = False
        for v in range(n):
            u, w = rule[v]
            if expanded[v] or z[v] >= z[u] + z[w]:
                continue
            snapshot = tuple(expanded)
            z[v] = z[u] + z[w]
            expanded[v] = True
            dependents[u].append(v)
            if w != u:
                dependents[w].append(v)
            cycle = _propagate(v, z, rule, dependents)
            if cycle is not None:
                return PositiveCycle(lambda0, cycle, snapshot)
            progress = True
    return MaxValues(lambda0, tuple(Fraction(x, scale) for x in z))


def _propagate(v, z, rule, dependents):
    """Push the increase at ``v`` to everything depending on it.

    Expanded functions keep ``z = z_u + z_w`` exactly, so any dependency
    chain leading back to ``v`` carries a strictly positive gain.  Return
    that cycle, or update the (acyclic) affected set in topological order.
    """
    parent = {v: -1}
    order = []
    stack = [(v, iter(dependents[v]))]
    while stack:
        x, it = stack[-1]
        for d in it:
            if d == v:
                chain = [x]
                while parent[chain[-1]] != -1:
                    chain.append(parent[chain[-1]])
                # chain runs x -> ... -> v along dependents; reverse is child order
                return tuple([v] + chain[:-1])
            if d not in parent:
                parent[d] = x
                stack.append((d, iter(dependents[d])))
                break
        else:
            stack.pop()
            order.append(x)
    for d in reversed(order):
        if d != v:
            u, w = rule[d]
            z[d] = z[u] + z[w]
    return None


def positive_loop(system: ReplacementSystem, result: PositiveCycle) -> PseudoLoop:
    """Debug helper: a pseudo-loop whose value beats ``lambda0`` per leaf.

    Rebuilds the trees behind the z-values just before the cycle closed
    and marks a leaf carrying the cycle's root label.
    """
    expanded = result._expanded
    memo: dict[int, Tree] = {}

    def tree(x: int) -> Tree:
        if x not in memo:
            if expanded[x]:
                u, w = system.rule[x]
                memo[x] = Tree(x, tree(u), tree(w))
            else:
                memo[x] = Tree(x)
        return memo[x]

    v = result.cycle[0]
    u, w = system.rule[v]
    t = Tree(v, tree(u), tree(w))
    for path, s in t.nodes():
        if path and s.is_leaf and s.label == v:
            return PseudoLoop(system, t, path)
    raise InternalConsistencyError("cycle root does not reappear as a leaf")


def is_below_rate(system: ReplacementSystem, lambda0) -> bool:
    return isinstance(rate_test(system, lambda0), PositiveCycle)


def approx_rate(system: ReplacementSystem, epsilon) -> RateInterval:
    """Bisect ``[min c, max c]`` until the bracket is at most ``epsilon`` wide."""
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    lo, hi = value_bounds(system)
    while hi - lo > epsilon:
        mid = (lo + hi) / 2
        if is_below_rate(system, mid):
            lo = mid
        else:
            hi = mid
    return RateInterval(lo, hi)


def unique_fraction(lo: Fraction, hi: Fraction, max_den: int) -> Fraction:
    """The fraction with the smallest denominator in ``(lo, hi]``.

    Found by Stern-Brocot descent with run lengths computed directly.  Its
    denominator must not exceed ``max_den``; uniqueness is the caller's
    business (a bracket narrower than ``1/max_den^2`` holds at most one).
    """
    if not lo < hi:
        raise ValueError("empty interval")
    base = math.floor(lo)
    lo, hi = lo - base, hi - base
    if hi >= 1:
        return Fraction(base + 1)
    # lo in [0, 1), hi in (lo, 1); bracket a/b < x < c/d, start 0/1, 1/1
    a, b, c, d = 0, 1, 1, 1
    while True:
        mn, md = a + c, b + d
        m = Fraction(mn, md)
        if m <= lo:
            # largest k with (a + k c)/(b + k d) <= lo
            k = math.floor((lo * b - a) / (c - lo * d))
            a, b = a + k * c, b + k * d
        elif m > hi:
            # largest k with (k a + c)/(k b + d) > hi
            k = math.ceil((c - hi * d) / (hi * b - a)) - 1
            c, d = k * a + c, k * b + d
        else:
            break
    if md > max_den:
        raise InternalConsistencyError(f"no fraction with denominator <= {max_den} in bracket")
    return base + m


def _integer_system(system: ReplacementSystem) -> tuple[ReplacementSystem, int]:
    d = system.common_denominator()
    return system.with_values([c * d for c in system.values]), d


def exact_rate(system: ReplacementSystem) -> Fraction:
    scaled, d = _integer_system(system)
    B = size_bound(system)
    below = lambda x: is_below_rate(scaled, x)  # noqa: E731

    lo_i, hi_i = (int(x) for x in value_bounds(scaled))
    if not below(lo_i):
        return Fraction(lo_i, d)
    # integer bracket lo_i < rate <= hi_i
    while hi_i - lo_i > 1:
        mid = (lo_i + hi_i) // 2
        if below(mid):
            lo_i = mid
        else:
            hi_i = mid

    # Farey neighbours a/b < rate <= c/d with c b - a d = 1
    a, b, c, e = lo_i, 1, hi_i, 1
    limit = B * B
    while b * e <= limit:
        if _attains(scaled, Fraction(c, e)):
            return Fraction(c, e) / d
        if below(Fraction(a + c, b + e)):
            # move the lower end towards c/e as far as it stays below
            step = lambda k: Fraction(a + k * c, b + k * e)  # noqa: E731
            cap = limit // (e * e) + 1
            k = _gallop(lambda k: below(step(k)), cap)
            a, b = a + k * c, b + k * e
        else:
            step = lambda k: Fraction(k * a + c, k * b + e)  # noqa: E731
            cap = limit // (b * b) + 1
            k = _gallop(lambda k: not below(step(k)), cap)
            c, e = k * a + c, k * b + e
    rate = unique_fraction(Fraction(a, b), Fraction(c, e), B)
    if rate != Fraction(c, e):
        raise InternalConsistencyError("recovered fraction is not the upper end")
    return rate / d


def _attains(system: ReplacementSystem, theta: Fraction) -> bool:
    """True iff ``theta`` is the rate, given that it is not below it.

    At the rate the tight split edges of the optimal ``z`` close a cycle;
    above it they cannot.  This stops the search long before the bracket
    reaches ``1/B^2``, which matters because ``B`` is exponential.
    """
    res = rate_test(system, theta)
    if not isinstance(res, MaxValues):
        return False
    return find_cycle(decomposition_edges(system, PrimalCertificate(theta, res.z))) is not None


def _gallop(ok, cap: int) -> int:
    """Largest ``k`` in ``[1, cap]`` with ``ok(k)``, given ``ok(1)`` and monotone ``ok``."""
    good, bad = 1, None
    k = 2
    while k <= cap:
        if ok(k):
            good, k = k, 2 * k
        else:
            bad = k
            break
    if bad is None:
        if good == cap or ok(cap):
            return cap
        bad = cap
    while bad - good > 1:
        mid = (good + bad) // 2
        if ok(mid):
            good = mid
        else:
            bad = mid
    return good


def certificate_at_rate(system: ReplacementSystem) -> PrimalCertificate:
    theta = exact_rate(system)
    res = rate_test(system, theta)
    if not isinstance(res, MaxValues):
        raise InternalConsistencyError("rate test at the exact rate found a positive cycle")
    return PrimalCertificate(theta, res.z)


def witness_pseudo_loop(system: ReplacementSystem) -> PseudoLoop:
    try:
        return pseudo_loop_from_optimum(system, certificate_at_rate(system))
    except ValueError as exc:
        raise InternalConsistencyError(str(exc)) from exc
