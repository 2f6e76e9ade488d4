"""Named example systems and a random system generator."""

from __future__ import annotations

import random
from fractions import Fraction

from .core import ReplacementSystem

SMALL_VALUES = tuple(Fraction(k) for k in range(-3, 4)) + tuple(
    Fraction(s, d) for d in (2, 3) for s in (1, -1))


def rot4() -> ReplacementSystem:
    """Four baskets valued 1..4, ``M(b_i) = (b_{i+1}, b_{i+2})`` cyclically."""
    rule = [((i + 1) % 4, (i + 2) % 4) for i in range(4)]
    return ReplacementSystem.build([1, 2, 3, 4], rule, ["b1", "b2", "b3", "b4"])


def s1() -> ReplacementSystem:
    return ReplacementSystem.build([5], [(0, 0)], ["a"])


def chain() -> ReplacementSystem:
    return ReplacementSystem.build([0, 0], [(1, 1), (1, 1)], ["a", "b"])


def doubling_family(m: int) -> ReplacementSystem:
    """Functions ``a, b, v0..vm``; only ``v_m`` is worth 1.

    Rate is ``2^m / (2^m + 1)`` and any optimal loop needs at least
    ``2^m + 1`` non-marked leaves.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    names = ["a", "b"] + [f"v{i}" for i in range(m + 1)]
    a, b = 0, 1
    rule = [(a, b), (a, 2)]
    rule += [(3 + i, 3 + i) for i in range(m)]
    rule.append((a, a))
    values = [0] * (m + 2) + [1]
    return ReplacementSystem.build(values, rule, names)


FIXTURES = {
    "rot4": rot4,
    "s1": s1,
    "chain": chain,
    "doubling1": lambda: doubling_family(1),
    "doubling2": lambda: doubling_family(2),
}


def all_fixtures() -> dict[str, ReplacementSystem]:
    return {name: make() for name, make in FIXTURES.items()}


def random_system(rng: random.Random, size: int, values=SMALL_VALUES) -> ReplacementSystem:
    rule = [(rng.randrange(size), rng.randrange(size)) for _ in range(size)]
    vals = [rng.choice(values) for _ in range(size)]
    return ReplacementSystem.build(vals, rule)


def random_systems(count: int, max_size: int = 4, seed: int = 0, values=SMALL_VALUES):
    rng = random.Random(seed)
    return [random_system(rng, rng.randint(1, max_size), values) for _ in range(count)]
