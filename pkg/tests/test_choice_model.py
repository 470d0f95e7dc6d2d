"""
Unit tests for Logit-MP choice probabilities and expected revenue.
"""

import itertools

import pytest

from logit_mp.choice_model import (
    bundle_probability,
    choice_point,
    choice_probabilities,
    enumerate_choice_set,
    expected_revenue,
)
from logit_mp.errors import ItemOutOfRange, TooLarge
from logit_mp.hypergraph import Bundle, new_hypergraph
from logit_mp.instances import path_graph


def test_empty_assortment(pair_instance):
    """Offering nothing means the customer walks away"""
    rho, probs = choice_probabilities(pair_instance, [])
    assert rho == 1.0
    assert all(p == 0.0 for p in probs.values())
    assert expected_revenue(pair_instance, []) == 0.0


def test_full_assortment_unit_values(pair_instance):
    """With three unit bundles each outcome has probability 1/4"""
    rho, probs = choice_probabilities(pair_instance, [1, 2])
    assert rho == pytest.approx(0.25)
    assert all(p == pytest.approx(0.25) for p in probs.values())


def test_hand_computed_probabilities(three_product_instance):
    """rho = 1 / (1 + 0.5 + 0.8 + 2.0) when {1,2} is offered"""
    rho, probs = choice_probabilities(three_product_instance, [1, 2])
    assert rho == pytest.approx(1 / 4.3)
    assert probs[Bundle.of(3)] == 0.0
    assert probs[Bundle.of(1, 2)] == pytest.approx(2.0 / 4.3)
    assert bundle_probability(three_product_instance, Bundle.of(1), [1, 2]) == pytest.approx(0.5 / 4.3)
    assert expected_revenue(three_product_instance, [1, 2]) == pytest.approx((2 * 0.5 + 3 * 0.8 + 5 * 2.0) / 4.3)


def test_zero_revenue_model():
    """Revenue-free bundles earn nothing for any assortment"""
    H = new_hypergraph(2, [((1,), 1.0, 0.0), ((2,), 2.0, 0.0), ((1, 2), 1.0, 0.0)])
    for S in ([], [1], [2], [1, 2]):
        assert expected_revenue(H, S) == 0.0


def test_normalization_and_monotone_rho():
    """Probabilities sum to one and adding items never raises rho"""
    H = path_graph(5, seed=11)
    for size in range(6):
        for S in itertools.combinations(range(1, 6), size):
            rho, probs = choice_probabilities(H, S)
            assert rho + sum(probs.values()) == pytest.approx(1.0, abs=1e-12)
            assert expected_revenue(H, S) == pytest.approx(sum(H.revenue(e) * p for e, p in probs.items()))
            for extra in set(range(1, 6)) - set(S):
                assert choice_probabilities(H, list(S) + [extra])[0] <= rho + 1e-15


def test_item_out_of_range(pair_instance):
    """Assortments must stay inside [1, N]"""
    with pytest.raises(ItemOutOfRange):
        choice_probabilities(pair_instance, [3])


def test_enumerate_single_product():
    """One product gives two points"""
    H = new_hypergraph(1, [((1,), 1.0, 1.0)])
    points = enumerate_choice_set(H)
    assert [x for x, _ in points] == [(0,), (1,)]
    assert points[0][1].rho == 1.0
    assert points[0][1].y[Bundle.of(1)] == 0.0
    assert points[1][1].rho == pytest.approx(0.5)
    assert points[1][1].y[Bundle.of(1)] == pytest.approx(0.5)


def test_enumerate_pair(pair_instance):
    """Four points, the full assortment at (1/4, 1/4, 1/4, 1/4)"""
    points = dict(enumerate_choice_set(pair_instance))
    assert len(points) == 4
    full = points[(1, 1)]
    assert full.as_vector(pair_instance).tolist() == pytest.approx([0.25, 0.25, 0.25, 0.25])
    for point in points.values():
        assert point.validate(pair_instance)


def test_enumerate_guard(pair_instance):
    """The enumeration refuses instances above the guard"""
    with pytest.raises(TooLarge):
        enumerate_choice_set(pair_instance, max_products=1)


def test_choice_point_matches_probabilities(three_product_instance):
    """v_e * y_e is the choice probability"""
    point = choice_point(three_product_instance, (1, 1, 0))
    _, probs = choice_probabilities(three_product_instance, [1, 2])
    for e in three_product_instance.edges:
        assert three_product_instance.attraction(e) * point.y[e] == pytest.approx(probs[e])
