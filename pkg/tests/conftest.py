import itertools
import sys
from fractions import Fraction
from functools import lru_cache

import pytest

from repgrowth.fixtures import all_fixtures, random_systems, rot4, s1


def brute_trees(system, v, n):
    """Every composition tree rooted at ``v`` with ``n`` leaves, as leaf-label tuples."""

    @lru_cache(maxsize=None)
    def go(v, n):
        if n == 1:
            return [(v,)]
        u, w = system.rule[v]
        out = []
        for k in range(1, n):
            for left, right in itertools.product(go(u, k), go(w, n - k)):
                out.append(left + right)
        return out

    return go(v, n)


def brute_value(system, v, n):
    return max(sum((system.values[x] for x in leaves), Fraction(0)) for leaves in brute_trees(system, v, n))


def brute_shifted_max(system, v, lam, n_max):
    """max over trees rooted at v with <= n_max leaves of sum(c - lam)."""
    return max(brute_value(system, v, n) - n * lam for n in range(1, n_max + 1))


@pytest.fixture
def rot():
    return rot4()


@pytest.fixture
def single():
    return s1()


FIXTURES = all_fixtures()
RANDOM = random_systems(200, max_size=4, seed=2024)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("tests.test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS):
            terminalreporter.write_line(line)
