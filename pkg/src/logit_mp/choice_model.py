"""
Logit-MP choice probabilities and expected revenue.

Under assortment S, bundle e is chosen with probability
v_e 1(e in S) / (1 + sum of v_c over bundles c inside S). Everything here is
computed in the v-domain.
"""

import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .constants import CHOICE_TOL, ENUMERATION_LIMIT
from .errors import InvalidInput, ItemOutOfRange, TooLarge
from .hypergraph import Bundle, Hypergraph


@dataclass(frozen=True)
class ChoicePoint:
    """
    A point (rho, y) of the choice probability set.

    rho is the no-purchase probability and bundle e is chosen with
    probability v_e * y[e].
    """

    rho: float
    y: Dict[Bundle, float] = field(default_factory=dict)

    def validate(self, hypergraph: Hypergraph, tol: float = CHOICE_TOL) -> bool:
        """Check normalization and 0 <= y_e <= rho"""
        total = self.rho + sum(hypergraph.attraction(e) * self.y.get(e, 0.0) for e in hypergraph.edges)
        if abs(total - 1.0) > tol:
            return False
        return all(-tol <= self.y.get(e, 0.0) <= self.rho + tol for e in hypergraph.edges)

    def as_vector(self, hypergraph: Hypergraph) -> np.ndarray:
        """[rho, y_e for e in canonical edge order]"""
        return np.array([self.rho] + [self.y.get(e, 0.0) for e in hypergraph.edges])


def _assortment_mask(hypergraph: Hypergraph, assortment: Iterable[int]) -> int:
    mask = 0
    for i in assortment:
        if not 1 <= i <= hypergraph.num_products:
            raise ItemOutOfRange(f"Item {i} is outside [1, {hypergraph.num_products}]")
        mask |= 1 << (i - 1)
    return mask


def _offered(hypergraph: Hypergraph, mask: int) -> np.ndarray:
    # Bundle e is offered when its bitset lies inside the assortment bitset
    return np.array([(m & ~mask) == 0 for m in hypergraph.masks], dtype=bool)


def choice_probabilities(
    hypergraph: Hypergraph, assortment: Iterable[int]
) -> Tuple[float, Dict[Bundle, float]]:
    """
    No-purchase probability and per-bundle choice probabilities.

    Args:
        hypergraph: The Logit-MP model
        assortment: Offered products

    Returns:
        (rho, probabilities keyed by bundle); bundles outside the assortment
        get probability 0
    """
    offered = _offered(hypergraph, _assortment_mask(hypergraph, assortment))
    weights = np.where(offered, hypergraph.v, 0.0)
    rho = 1.0 / (1.0 + weights.sum())
    probs = weights * rho
    return rho, {e: float(p) for e, p in zip(hypergraph.edges, probs)}


def bundle_probability(hypergraph: Hypergraph, bundle: Bundle, assortment: Iterable[int]) -> float:
    """Probability that the customer buys exactly this bundle"""
    _, probs = choice_probabilities(hypergraph, assortment)
    if bundle not in probs:
        raise InvalidInput(f"Bundle {bundle} is not in the hypergraph")
    return probs[bundle]


def expected_revenue(hypergraph: Hypergraph, assortment: Iterable[int]) -> float:
    """Expected revenue of offering the assortment"""
    offered = _offered(hypergraph, _assortment_mask(hypergraph, assortment))
    weights = np.where(offered, hypergraph.v, 0.0)
    return float(weights @ hypergraph.r / (1.0 + weights.sum()))


def choice_point(hypergraph: Hypergraph, x: Sequence[int]) -> ChoicePoint:
    """The point of the choice probability set generated by the 0/1 vector x"""
    assortment = [i + 1 for i, xi in enumerate(x) if xi]
    offered = _offered(hypergraph, _assortment_mask(hypergraph, assortment))
    rho = 1.0 / (1.0 + hypergraph.v[offered].sum())
    return ChoicePoint(rho, {e: (rho if on else 0.0) for e, on in zip(hypergraph.edges, offered)})


def enumerate_choice_set(
    hypergraph: Hypergraph, max_products: int = ENUMERATION_LIMIT
) -> List[Tuple[Tuple[int, ...], ChoicePoint]]:
    """
    Every point of the choice probability set, one per x in {0,1}^N.

    Raises:
        TooLarge: If N exceeds max_products
    """
    n = hypergraph.num_products
    if n > max_products:
        raise TooLarge(f"Cannot enumerate 2^{n} assortments (limit N <= {max_products})")
    return [(x, choice_point(hypergraph, x)) for x in itertools.product((0, 1), repeat=n)]
