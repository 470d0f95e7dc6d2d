"""
Unit tests for recursive McCormick trees and the standard linearization.
"""

import itertools
import math

import pytest

from logit_mp.errors import InvalidInput
from logit_mp.hypergraph import Bundle, new_hypergraph
from logit_mp.model import ModelIR
from logit_mp.relaxation import (
    LinearInequality,
    build_rmc_trees,
    oracle_bundles,
    rmc_inequalities,
    standard_linear_relaxation,
    variable_label,
)


def _singles(n):
    return [((i,), 1.0, 1.0) for i in range(1, n + 1)]


def _integral_values(tree, n, x):
    values = {Bundle.of(i): float(x[i - 1]) for i in range(1, n + 1)}
    for node in tree.internal_nodes():
        values[node] = float(all(x[i - 1] for i in node))
    return values


def test_tree_for_a_triple():
    """{1,2,3} splits into {1,2} and {3}; {1,2} is auxiliary"""
    H = new_hypergraph(3, _singles(3) + [((1, 2, 3), 1.0, 1.0)])
    tree = build_rmc_trees(H)
    assert tree.internal_nodes() == [Bundle.of(1, 2), Bundle.of(1, 2, 3)]
    assert tree.children(Bundle.of(1, 2, 3)) == (Bundle.of(1, 2), Bundle.of(3))
    assert tree.children(Bundle.of(1, 2)) == (Bundle.of(1), Bundle.of(2))
    assert tree.auxiliary == (Bundle.of(1, 2),)
    assert len(rmc_inequalities(tree)) == 8


def test_shared_prefix_created_once(triple_instance):
    """{1,2,3} and {1,2,4} share a single {1,2} node"""
    tree = build_rmc_trees(triple_instance)
    assert tree.internal_nodes() == [Bundle.of(1, 2), Bundle.of(1, 2, 3), Bundle.of(1, 2, 4)]
    assert tree.auxiliary == (Bundle.of(1, 2),)


def test_prefix_in_edges_is_not_auxiliary():
    """A left child that is already an edge does not join the registry"""
    H = new_hypergraph(3, _singles(3) + [((1, 2), 1.0, 1.0), ((1, 2, 3), 1.0, 1.0)])
    tree = build_rmc_trees(H)
    assert tree.auxiliary == ()
    assert set(tree.auxiliary).isdisjoint(H.edges)


def test_singletons_only():
    """No multi-item bundle means an empty tree and no rows"""
    tree = build_rmc_trees(new_hypergraph(3, _singles(3)))
    assert tree.is_empty()
    assert rmc_inequalities(tree) == []
    assert standard_linear_relaxation(new_hypergraph(3, _singles(3))) == []


def test_mccormick_rows_for_a_pair():
    """A pair node gets the four McCormick envelopes"""
    H = new_hypergraph(2, _singles(2) + [((1, 2), 1.0, 1.0)])
    rows = {row.render() for row in rmc_inequalities(build_rmc_trees(H))}
    assert rows == {
        "1 z_1_2 >= 0",
        "- 1 z_1 + 1 z_1_2 - 1 z_2 >= -1",
        "- 1 z_1 + 1 z_1_2 <= 0",
        "1 z_1_2 - 1 z_2 <= 0",
    }


def test_rmc_exact_at_integral_points(triple_instance):
    """At 0/1 leaves the only RMC-feasible z is the product of the leaves"""
    tree = build_rmc_trees(triple_instance)
    rows = rmc_inequalities(tree)
    for x in itertools.product((0, 1), repeat=4):
        values = _integral_values(tree, 4, x)
        assert max(row.violation(values) for row in rows) <= 0.0
        for node in tree.internal_nodes():
            flipped = dict(values)
            flipped[node] = 1.0 - values[node]
            assert max(row.violation(flipped) for row in rows) > 0.0


def test_standard_relaxation_rows():
    """A triple gets nonnegativity, three upper bounds and one lower bound"""
    H = new_hypergraph(3, _singles(3) + [((1, 2, 3), 1.0, 1.0)])
    rows = standard_linear_relaxation(H)
    assert len(rows) == 5
    lower = rows[-1]
    assert lower.sense == ">="
    assert lower.rhs == -2.0
    assert lower.coeffs[Bundle.of(1)] == -1.0


def test_standard_relaxation_exact_at_integral_points():
    """On 0/1 leaves the standard rows force the product, up to |e| = 4"""
    H = new_hypergraph(4, _singles(4) + [((1, 2, 3, 4), 1.0, 1.0)])
    rows = standard_linear_relaxation(H)
    e = Bundle.of(1, 2, 3, 4)
    for x in itertools.product((0, 1), repeat=4):
        values = {Bundle.of(i): float(x[i - 1]) for i in range(1, 5)}
        for z in (0.0, 1.0):
            values[e] = z
            feasible = max(row.violation(values) for row in rows) <= 0.0
            assert feasible == (z == float(all(x)))


def test_rmc_implies_standard_relaxation(triple_instance, backend):
    """No point of the RMC polytope violates a standard row"""
    tree = build_rmc_trees(triple_instance)
    for target in standard_linear_relaxation(triple_instance):
        model = ModelIR("implication")
        for key in [Bundle.of(i) for i in range(1, 5)] + tree.internal_nodes():
            model.add_variable(variable_label(key), 0.0, 1.0)
        for row in rmc_inequalities(tree):
            model.add_row({variable_label(k): c for k, c in row.coeffs.items()}, row.sense, row.rhs)
        leq = target.as_leq()
        model.set_objective({variable_label(k): c for k, c in leq.coeffs.items()}, "max")
        solution = backend.solve(model)
        assert solution.objective - leq.rhs <= 1e-9


def test_linear_inequality_validation():
    """Rows need a known sense, finite numbers and a nonzero term"""
    with pytest.raises(InvalidInput):
        LinearInequality({"a": 1.0}, "<")
    with pytest.raises(InvalidInput):
        LinearInequality({"a": 0.0}, "<=")
    with pytest.raises(InvalidInput):
        LinearInequality({"a": math.inf}, "<=")
    row = LinearInequality({"a": 1.0, "b": 0.0}, "<=", 2.0)
    assert row.coeffs == {"a": 1.0}


def test_linear_inequality_evaluation():
    """evaluate, violation, as_leq and the normalized key"""
    row = LinearInequality({"a": 2.0, "b": -1.0}, ">=", 1.0)
    assert row.evaluate({"a": 1.0}) == 2.0
    assert row.violation({"a": 0.0, "b": 1.0}) == 2.0
    assert row.violation({"a": 1.0}) == -1.0
    leq = row.as_leq()
    assert leq.sense == "<=" and leq.rhs == -1.0 and leq.coeffs == {"a": -2.0, "b": 1.0}
    scaled = LinearInequality({"a": 4.0, "b": -2.0}, ">=", 2.0)
    assert scaled.normalized_key() == row.normalized_key()
    assert row.map_keys({"b": "a"}).coeffs == {"a": 1.0}


def test_oracle_bundles(triple_instance):
    """Every bundle referenced by the rows is listed once"""
    rows = rmc_inequalities(build_rmc_trees(triple_instance))
    assert oracle_bundles(rows) == sorted(
        [Bundle.of(i) for i in range(1, 5)] + [Bundle.of(1, 2), Bundle.of(1, 2, 3), Bundle.of(1, 2, 4)]
    )
