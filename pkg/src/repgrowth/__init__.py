"""Exact growth rates of binary replacement systems."""

from .core import (Condensation, InvalidSystemError, Rational, ReplacementSystem, Violation,
                   condensation, dependency_graph, validate, value_bounds)
from .evaluator import Tree, best_tree, eval_g, eval_v, g_table, tree_value
from .pseudoloop import (InnerLoopSite, PseudoLoop, enumerate_reduced_loops, find_inner_loops,
                         pump, remove_inner_loop)
from .certificates import (DualCertificate, PrimalCertificate, check_dual, check_primal,
                           decomposable_set, decomposition_graph, decomposition_tree,
                           dual_from_pseudo_loop, pseudo_loop_from_optimum)
from .rates import (MaxValues, PositiveCycle, RateInterval, approx_rate, certificate_at_rate,
                    exact_rate, rate_test, witness_pseudo_loop)

__version__ = "0.1.0"
