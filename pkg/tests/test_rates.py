import random
import time
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from repgrowth.certificates import check_primal
from repgrowth.core import ReplacementSystem
from repgrowth.evaluator import g_table
from repgrowth.fixtures import SMALL_VALUES, chain, random_system, doubling_family, rot4, s1
from repgrowth.pseudoloop import max_loop_rate, size_bound
from repgrowth.rates import (InternalConsistencyError, MaxValues, PositiveCycle, approx_rate,
                             certificate_at_rate, exact_rate, positive_loop, rate_test,
                             unique_fraction, witness_pseudo_loop)

from .conftest import FIXTURES, RANDOM, brute_shifted_max


def test_rate_test_below():
    res = rate_test(rot4(), 3)
    assert isinstance(res, PositiveCycle)
    L = positive_loop(rot4(), res)
    assert L.rate > 3


def test_rate_test_max_values():
    r = rot4()
    assert rate_test(r, 4) == MaxValues(F(4), (F(-2), F(-1), F(-1), F(0)))
    res = rate_test(r, F(11, 3))
    assert res.z == (F(-1), F(-1, 3), F(-2, 3), F(1, 3))


def test_rate_test_z_matches_bounded_enumeration():
    r = rot4()
    for lam in (F(4), F(11, 3), F(9, 2)):
        z = rate_test(r, lam).z
        assert list(z) == [brute_shifted_max(r, v, lam, 12) for v in range(4)]


def test_rate_test_s1():
    assert isinstance(rate_test(s1(), -1), PositiveCycle)
    assert rate_test(s1(), -1).cycle == (0,)


def test_cycle_is_a_dependency_cycle():
    for s in RANDOM[:100]:
        lo = min(s.values) - 1
        res = rate_test(s, lo)
        assert isinstance(res, PositiveCycle)
        cyc = res.cycle
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            assert b in s.rule[a]
        assert positive_loop(s, res).rate > lo


def test_approx_rate():
    iv = approx_rate(rot4(), F(1, 100))
    assert iv.width <= F(1, 100) and F(11, 3) in iv
    iv = approx_rate(s1(), F(1, 7))
    assert (iv.lo, iv.hi) == (5, 5)
    assert F(2, 3) in approx_rate(doubling_family(1), F(1, 10))
    with pytest.raises(ValueError):
        approx_rate(rot4(), 0)


def test_exact_rate_examples():
    assert exact_rate(rot4()) == F(11, 3)
    assert exact_rate(s1()) == 5
    assert exact_rate(doubling_family(2)) == F(4, 5)
    assert exact_rate(chain()) == 0


def test_exact_rate_rational_values():
    s = ReplacementSystem.build([F(1, 2), F(-1, 3), F(7, 5)], [(1, 2), (0, 0), (1, 1)])
    assert exact_rate(s) == max_loop_rate(s)


def test_certificate_at_rate():
    c = certificate_at_rate(rot4())
    assert c.theta == F(11, 3) and c.z == (F(-1), F(-1, 3), F(-2, 3), F(1, 3))
    assert certificate_at_rate(s1()).z == (0,)
    c = certificate_at_rate(doubling_family(1))
    assert c.theta == F(2, 3) and check_primal(doubling_family(1), c) == []


def test_witness_pseudo_loop():
    L = witness_pseudo_loop(rot4())
    assert L.rate == F(11, 3)
    assert sorted(rot4().values[x] for x in L.side_leaves()) == [3, 4, 4]
    assert witness_pseudo_loop(s1()).rate == 5
    assert witness_pseudo_loop(doubling_family(1)).q >= 3


def test_unique_fraction():
    assert unique_fraction(F(3), F(4), 5) == 4
    assert unique_fraction(F(36, 10), F(37, 10), 3) == F(11, 3)
    assert unique_fraction(F(-5, 7), F(-2, 3), 10) == F(-2, 3)
    with pytest.raises(InternalConsistencyError):
        unique_fraction(F(1000, 3001), F(1000, 3000) - F(1, 10**9), 10)


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_probe_equivalence_fixtures(name):
    s = FIXTURES[name]
    lam = exact_rate(s)
    for probe in (lam - 1, lam - F(1, 1000), lam, lam + F(1, 1000)):
        assert isinstance(rate_test(s, probe), PositiveCycle) == (probe < lam)


def test_fixpoint_identity():
    for s in RANDOM[:80]:
        lam = exact_rate(s)
        for probe in (lam, lam + F(1, 3), max(s.values)):
            res = rate_test(s, probe)
            for v, (u, w) in enumerate(s.rule):
                assert res.z[v] == max(s.values[v] - probe, res.z[u] + res.z[w])


def test_oracle_agreement_random():
    for s in RANDOM:
        assert exact_rate(s) == max_loop_rate(s)


def test_denominator_bound():
    for s in RANDOM:
        d = s.common_denominator()
        assert (exact_rate(s) * d).denominator <= size_bound(s)


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_slope_convergence(name):
    s = FIXTURES[name]
    cert = certificate_at_rate(s)
    g = g_table(s, 200)
    gaps = [abs(g[n - 1] / n - cert.theta) for n in (50, 100, 200)]
    assert gaps[0] >= gaps[1] >= gaps[2]
    top = max(cert.z)
    assert all(g[n - 1] <= n * cert.theta + top for n in range(1, 201))


def test_lp_agrees_with_floating_point_solver():
    scipy_opt = pytest.importorskip("scipy.optimize")
    for s in RANDOM[:40]:
        n = len(s)
        # variables (theta, z_0..z_{n-1}); minimize theta
        A, b = [], []
        for v, (u, w) in enumerate(s.rule):
            row = [-1.0] + [0.0] * n
            row[1 + v] -= 1.0
            A.append(row)
            b.append(-float(s.values[v]))
            row = [0.0] * (n + 1)
            row[1 + v] -= 1.0
            row[1 + u] += 1.0
            row[1 + w] += 1.0
            A.append(row)
            b.append(0.0)
        res = scipy_opt.linprog([1.0] + [0.0] * n, A_ub=A, b_ub=b, bounds=[(None, None)] * (n + 1))
        assert res.status == 0
        assert res.x[0] == pytest.approx(float(exact_rate(s)), abs=1e-7)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.randoms(use_true_random=False))
def test_exact_rate_is_strict_threshold(size, rng):
    s = random_system(rng, size)
    lam = exact_rate(s)
    assert isinstance(rate_test(s, lam), MaxValues)
    assert isinstance(rate_test(s, lam - F(1, 10**6)), PositiveCycle)
    assert min(s.values) <= lam <= max(s.values)


@settings(max_examples=40, deadline=None)
@given(st.integers(5, 7), st.randoms(use_true_random=False))
def test_exact_rate_larger_systems_match_certificates(size, rng):
    s = random_system(rng, size, values=tuple(SMALL_VALUES) + (F(5, 7), F(-11, 4)))
    cert = certificate_at_rate(s)
    L = witness_pseudo_loop(s)
    assert check_primal(s, cert) == [] and L.rate == cert.theta


def _reverse_chain(n):
    """v_i -> (v_{i+1}, sink) with increasing values: expanding v_k re-raises v_{k-1}..v_0."""
    rule = [(i + 1, n) for i in range(n - 1)] + [(n, n), (n, n)]
    values = [i - n for i in range(n)] + [0]
    return ReplacementSystem.build(values, rule)


def test_quadratic_worst_case_chain():
    times = {}
    for n in (400, 800):
        s = _reverse_chain(n)
        res = rate_test(s, 0)
        assert res.z[:n] == (F(0),) * n
        best = float("inf")
        for _ in range(3):
            t0 = time.perf_counter()
            rate_test(s, 0)
            best = min(best, time.perf_counter() - t0)
        times[n] = best
    assert times[800] < 2.0
    assert times[800] / times[400] < 6


@pytest.mark.parametrize("n", [300, 2000])
def test_exact_rate_large_random(n):
    s = random_system(random.Random(n), n, values=SMALL_VALUES)
    lam = exact_rate(s)
    assert isinstance(rate_test(s, lam), MaxValues)
    assert isinstance(rate_test(s, lam - F(1, 10**9)), PositiveCycle)
    assert witness_pseudo_loop(s).rate == lam
