"""
Unit tests for bundles, hypergraphs and running-intersection orderings.
"""

import itertools
import math

import pytest

from logit_mp.errors import (
    DuplicateBundle,
    EmptyBundle,
    InvalidInput,
    ItemOutOfRange,
    MissingSingleton,
    NonPositiveAttraction,
    UnknownBundle,
    UtilityOverflow,
    ZeroReference,
)
from logit_mp.hypergraph import Bundle, Hypergraph, find_ri_ordering, new_hypergraph
from logit_mp.instances import cycle_graph


def test_bundle_canonical_form():
    """Bundles sort their items and compare by item set"""
    assert Bundle((3, 1, 2)) == Bundle.of(1, 2, 3)
    assert Bundle.of(2, 1).items == (1, 2)
    assert Bundle.of(1, 2).name == "1_2"
    assert Bundle.of(1, 3).mask == 0b101
    assert repr(Bundle.of(2, 1)) == "{1,2}"


def test_bundle_order_is_size_then_lexicographic():
    """Canonical order puts smaller bundles first"""
    bundles = [Bundle.of(1, 2, 3), Bundle.of(2, 3), Bundle.of(4), Bundle.of(1, 3), Bundle.of(1)]
    assert sorted(bundles) == [Bundle.of(1), Bundle.of(4), Bundle.of(1, 3), Bundle.of(2, 3), Bundle.of(1, 2, 3)]


def test_bundle_validation():
    """Empty, repeated and non-positive items are rejected"""
    with pytest.raises(EmptyBundle):
        Bundle(())
    with pytest.raises(InvalidInput):
        Bundle((1, 1))
    with pytest.raises(ItemOutOfRange):
        Bundle((0, 2))


def test_new_hypergraph_pair(pair_instance):
    """Two products and their pair form a rank-2 hypergraph"""
    assert pair_instance.num_products == 2
    assert len(pair_instance) == 3
    assert pair_instance.rank() == 2
    assert pair_instance.edges == (Bundle.of(1), Bundle.of(2), Bundle.of(1, 2))
    assert pair_instance.revenue(Bundle.of(1, 2)) == 5.0


def test_new_hypergraph_errors():
    """Validation reports each kind of malformed edge list"""
    with pytest.raises(NonPositiveAttraction):
        new_hypergraph(1, [((1,), 0.0, 1.0)])
    with pytest.raises(MissingSingleton):
        new_hypergraph(3, [((1,), 1.0, 1.0), ((2,), 1.0, 1.0), ((1, 2), 1.0, 1.0)])
    with pytest.raises(DuplicateBundle):
        new_hypergraph(2, [((1,), 1.0, 1.0), ((2,), 1.0, 1.0), ((2, 1), 1.0, 1.0), ((1, 2), 2.0, 1.0)])
    with pytest.raises(ItemOutOfRange):
        new_hypergraph(2, [((1,), 1.0, 1.0), ((2,), 1.0, 1.0), ((1, 3), 1.0, 1.0)])
    with pytest.raises(InvalidInput):
        new_hypergraph(0, [])


def test_permuted_edge_lists_are_equal():
    """Edge-list order does not matter"""
    edges = [((1,), 1.0, 2.0), ((2,), 0.5, 3.0), ((3,), 2.0, 1.0), ((1, 3), 0.4, 4.0), ((2, 3), 0.7, 5.0)]
    reference = new_hypergraph(3, edges)
    for perm in itertools.permutations(edges):
        other = new_hypergraph(3, list(perm))
        assert other == reference
        assert other.rank() == reference.rank()
        assert other.sparsity(3) == reference.sparsity(3)


def test_negative_revenue_is_allowed():
    """Revenues may be zero or negative"""
    H = new_hypergraph(2, [((1,), 1.0, 0.0), ((2,), 1.0, -1.0)])
    assert H.revenue(Bundle.of(2)) == -1.0


def test_rank(figure_instance, cycle5):
    """Rank is the largest bundle size"""
    assert cycle5.rank() == 2
    assert figure_instance.rank() == 6
    assert new_hypergraph(2, [((1,), 1.0, 1.0), ((2,), 1.0, 1.0)]).rank() == 1


def test_sparsity():
    """Sparsity is the share of multi-item bundles among a reference count"""
    H = cycle_graph(5)
    assert H.sparsity(45) == pytest.approx(5 / 45)
    assert H.sparsity(5) == 1.0
    singles = new_hypergraph(2, [((1,), 1.0, 1.0), ((2,), 1.0, 1.0)])
    assert singles.sparsity(1) == 0.0
    with pytest.raises(ZeroReference):
        H.sparsity(0)


def test_neighbor_intersections(figure_instance, path4):
    """Neighbors of a bundle come with their intersection"""
    e0 = Bundle.of(1, 2, 3, 4, 5, 6)
    neighbors = dict(figure_instance.neighbor_intersections(e0))
    assert neighbors[Bundle.of(1, 2)] == Bundle.of(1, 2)
    assert neighbors[Bundle.of(2, 3)] == Bundle.of(2, 3)
    assert neighbors[Bundle.of(3, 4, 5)] == Bundle.of(3, 4, 5)

    pairs = [(e, c) for e, c in path4.neighbor_intersections(Bundle.of(1, 2)) if len(e) > 1]
    assert pairs == [(Bundle.of(2, 3), Bundle.of(2))]

    with pytest.raises(UnknownBundle):
        path4.neighbor_intersections(Bundle.of(1, 4))


def test_from_utilities():
    """Utilities become v = exp(u), with an overflow guard"""
    H = Hypergraph.from_utilities(2, [((1,), 0.0, 1.0), ((2,), math.log(2.0), 1.0)])
    assert H.attraction(Bundle.of(2)) == pytest.approx(2.0)
    assert H.utility(Bundle.of(1)) == pytest.approx(0.0)
    with pytest.raises(UtilityOverflow):
        Hypergraph.from_utilities(1, [((1,), 701.0, 1.0)])


def test_restrict_rank_and_with_values(figure_instance):
    """Sub-hypergraphs drop large bundles; with_values swaps values"""
    low = figure_instance.restrict_rank(2)
    assert low.rank() == 2
    assert Bundle.of(3, 4, 5) not in low

    changed = figure_instance.with_values(revenues={Bundle.of(1, 2): 10.0})
    assert changed.revenue(Bundle.of(1, 2)) == 10.0
    assert figure_instance.revenue(Bundle.of(1, 2)) == 2.0


def test_dict_round_trip(three_product_instance):
    """to_dict and from_dict are lossless"""
    assert Hypergraph.from_dict(three_product_instance.to_dict()) == three_product_instance


def test_ri_ordering_chain():
    """The chain {1,2}, {2,3}, {3,4,5} has a running-intersection ordering"""
    ordering = find_ri_ordering([(3, 4, 5), (1, 2), (2, 3)])
    assert ordering is not None
    assert ordering.is_valid()
    assert ordering.sets == (Bundle.of(1, 2), Bundle.of(2, 3), Bundle.of(3, 4, 5))
    assert ordering.neighbors == (frozenset(), frozenset({2}), frozenset({3}))


def test_ri_ordering_disjoint_sets():
    """Disjoint sets order trivially with empty neighbor sets"""
    ordering = find_ri_ordering([(1,), (2, 3), (4, 5)])
    assert ordering is not None
    assert all(not n for n in ordering.neighbors)


def test_ri_ordering_five_cycle():
    """The edges of a 5-cycle admit no running-intersection ordering"""
    assert find_ri_ordering([e for e in cycle_graph(5).nonsingletons()]) is None


def test_ri_ordering_matches_brute_force():
    """The search finds an ordering exactly when some permutation works"""
    families = [
        [(1, 2), (2, 3), (1, 3)],
        [(1, 2), (2, 3), (3, 4)],
        [(1, 2, 3), (3, 4), (4, 1)],
        [(1, 2, 3), (2, 3, 4), (3, 4, 5)],
        [(1, 2), (3, 4), (2, 3), (4, 5), (5, 1)],
    ]
    for family in families:
        bundles = [Bundle(s) for s in family]

        def valid(order):
            covered = set()
            for k, s in enumerate(order):
                common = s.item_set & covered
                if common and not any(common <= p.item_set for p in order[:k]):
                    return False
                covered |= s.item_set
            return True

        expected = any(valid(p) for p in itertools.permutations(bundles))
        assert (find_ri_ordering(bundles) is not None) == expected


def test_ri_ordering_rejects_bad_input():
    """Empty or repeated set lists are invalid"""
    with pytest.raises(InvalidInput):
        find_ri_ordering([])
    with pytest.raises(InvalidInput):
        find_ri_ordering([(1, 2), (2, 1)])
