import random
from fractions import Fraction as F

import pytest

from repgrowth.certificates import (DualCertificate, NotDecomposableError, NotOptimalError,
                                    PrimalCertificate, check_dual, check_primal, decomposable_set,
                                    decomposition_graph, decomposition_tree, dual_from_pseudo_loop,
                                    loop_tree_residual, pseudo_loop_from_optimum)
from repgrowth.evaluator import Tree, tree_value
from repgrowth.fixtures import doubling_family, rot4, s1
from repgrowth.pseudoloop import enumerate_reduced_loops
from repgrowth.rates import certificate_at_rate, exact_rate, witness_pseudo_loop

from .conftest import FIXTURES, RANDOM
from .test_pseudoloop import l_star, trivial_s1

Z_OPT = (F(-1), F(-1, 3), F(-2, 3), F(1, 3))
OPT = PrimalCertificate(F(11, 3), Z_OPT)
AT4 = PrimalCertificate(F(4), (F(-2), F(-1), F(-1), F(0)))


def test_check_primal():
    r = rot4()
    assert check_primal(r, OPT) == []
    bad = check_primal(r, PrimalCertificate(F(11, 3), (F(0),) * 4))
    assert [(b.function, b.kind) for b in bad] == [("b4", "base")]
    assert bad[0].rhs == F(1, 3)


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_trivial_primal_solution(name):
    s = FIXTURES[name]
    assert check_primal(s, PrimalCertificate(max(s.values), (F(0),) * len(s))) == []


def test_decomposable_set():
    r = rot4()
    assert decomposable_set(r, OPT) == {0, 1, 2, 3}
    assert decomposable_set(r, AT4) == {0, 1, 2, 3}
    assert decomposable_set(s1(), PrimalCertificate(F(5), (F(0),))) == {0}


def test_decomposition_graph():
    r = rot4()
    g = decomposition_graph(r, OPT)
    assert {(0, 1), (1, 2), (2, 0)} <= g
    assert decomposition_graph(r, AT4) == {(0, 1), (0, 2), (1, 2), (1, 3)}
    assert decomposition_graph(s1(), PrimalCertificate(F(6), (F(-1),))) == set()


def test_decomposition_trees():
    r = rot4()
    assert decomposition_tree(r, OPT, 3) == Tree(3)
    assert decomposition_tree(r, OPT, 1) == Tree(1, Tree(2), Tree(3))
    assert decomposition_tree(s1(), PrimalCertificate(F(5), (F(0),)), 0) == Tree(0)


def test_not_decomposable():
    # z_a = 1 is neither c - theta = 0 nor 2 z_a
    cert = PrimalCertificate(F(5), (F(1),))
    with pytest.raises(NotDecomposableError):
        decomposition_tree(s1(), cert, 0)


def test_pseudo_loop_from_optimum_rot4():
    L = pseudo_loop_from_optimum(rot4(), OPT)
    assert L.rate == F(11, 3)
    assert sorted(rot4().values[x] for x in L.side_leaves()) == [3, 4, 4]
    # main path follows the cycle b1 -> b2 -> b3 -> b1
    assert L.main_path_labels() == (0, 1, 2, 0)


def test_not_optimal():
    with pytest.raises(NotOptimalError, match="not-optimal"):
        pseudo_loop_from_optimum(rot4(), AT4)


def test_s1_optimum_loop():
    L = pseudo_loop_from_optimum(s1(), PrimalCertificate(F(5), (F(0),)))
    assert L.tree == trivial_s1().tree and L.rate == 5


def test_dual_from_lstar():
    r = rot4()
    d = dual_from_pseudo_loop(r, l_star())
    assert d.x == (0, 0, F(1, 3), F(2, 3))
    assert d.y == (F(1, 3), F(1, 3), F(1, 3), 0)
    bad, obj = check_dual(r, d)
    assert bad == [] and obj == F(11, 3)


def test_dual_s1():
    d = dual_from_pseudo_loop(s1(), trivial_s1())
    assert d.x == (1,) and d.y == (1,)
    assert check_dual(s1(), d) == ([], 5)


def test_dual_infeasible():
    bad, _ = check_dual(rot4(), DualCertificate((0, 0, 0, F(1)), (0, 0, 0, 0)))
    assert any(b.startswith("b4: flow") for b in bad)


def test_dual_from_any_loop_is_normalized():
    for s in RANDOM[:50]:
        for L in enumerate_reduced_loops(s)[:20]:
            d = dual_from_pseudo_loop(s, L)
            assert sum(d.x) == 1 and min(d.x + d.y) >= 0
            bad, obj = check_dual(s, d)
            assert bad == [] and obj == L.rate


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_strong_duality_fixtures(name):
    s = FIXTURES[name]
    cert = certificate_at_rate(s)
    L = witness_pseudo_loop(s)
    bad, obj = check_dual(s, dual_from_pseudo_loop(s, L))
    assert bad == []
    assert obj == cert.theta == exact_rate(s) == L.rate


def test_round_trip_random():
    for s in RANDOM:
        cert = certificate_at_rate(s)
        L = pseudo_loop_from_optimum(s, cert)
        bad, obj = check_dual(s, dual_from_pseudo_loop(s, L))
        assert bad == [] and obj == cert.theta


def test_decomposition_tree_identity():
    for s in list(FIXTURES.values()) + RANDOM[:80]:
        cert = certificate_at_rate(s)
        for v in decomposable_set(s, cert):
            t = decomposition_tree(s, cert, v)
            assert loop_tree_residual(s, cert, t) == cert.z[v]
            assert tree_value(s, t) - cert.theta * t.size == cert.z[v]


def test_weak_duality_random_perturbations():
    rng = random.Random(11)
    checked = 0
    for s in RANDOM[:60]:
        loops = enumerate_reduced_loops(s)
        cert = certificate_at_rate(s)
        for _ in range(12):
            # some perturbations break a split inequality; those are skipped
            bump = F(rng.randint(0, 6), rng.randint(1, 4))
            z = tuple(x + bump * rng.randint(0, 2) for x in cert.z)
            theta = cert.theta + bump * 3
            primal = PrimalCertificate(theta, z)
            if check_primal(s, primal):
                continue
            L = rng.choice(loops)
            bad, obj = check_dual(s, dual_from_pseudo_loop(s, L))
            assert bad == [] and obj <= theta
            checked += 1
    assert checked > 100


def test_doubling_family_witness_size():
    L = witness_pseudo_loop(doubling_family(1))
    assert L.rate == F(2, 3) and L.q >= 3
