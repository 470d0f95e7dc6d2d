"""
Separation of the x-linking bounds.

Multiplying the normalization row by x_i gives
x_i = y_i + sum_{e ni i} v_e y_e + sum_{e not ni i} v_e (rho z_e x_i),
and each product rho z_e x_i is bounded by McCormick envelopes in (rho, y_i, y_e).
At a point, the tightest envelope for each e is chosen and the resulting
bound on x_i is emitted when violated.
"""

from typing import Dict, Hashable, List

from ..constants import DEFAULT_EPS
from ..hypergraph import Bundle, Hypergraph
from .base import Cut, CutFamily, FractionalPoint, make_cut


def _linked_terms(hypergraph: Hypergraph, item: int) -> Dict[Hashable, float]:
    """y_i + sum over bundles containing i of v_e y_e"""
    single = Bundle((item,))
    terms: Dict[Hashable, float] = {single: 1.0}
    for e in hypergraph.edges_containing(item):
        terms[e] = terms.get(e, 0.0) + hypergraph.attraction(e)
    return terms


def x_lower_terms(hypergraph: Hypergraph, item: int, active) -> Dict[Hashable, float]:
    """Right-hand side of x_i >= y_i + ... + sum_{e in active} v_e (y_i + y_e - rho)"""
    single = Bundle((item,))
    terms = _linked_terms(hypergraph, item)
    for e in active:
        v = hypergraph.attraction(e)
        terms[single] = terms.get(single, 0.0) + v
        terms[e] = terms.get(e, 0.0) + v
        terms["rho"] = terms.get("rho", 0.0) - v
    return terms


def x_upper_terms(hypergraph: Hypergraph, item: int, by_bundle, by_item) -> Dict[Hashable, float]:
    """Right-hand side of x_i <= y_i + ... + sum_B v_e y_e + sum_C v_e y_i"""
    single = Bundle((item,))
    terms = _linked_terms(hypergraph, item)
    for e in by_bundle:
        terms[e] = terms.get(e, 0.0) + hypergraph.attraction(e)
    for e in by_item:
        terms[single] = terms.get(single, 0.0) + hypergraph.attraction(e)
    return terms


def separate_x_bounds(point: FractionalPoint, hypergraph: Hypergraph, eps: float = DEFAULT_EPS) -> List[Cut]:
    """
    Lower and upper x-linking cuts violated by more than eps.

    For item i, bundles without i split into
    A = {e : y_i + y_e - rho > 0} for the lower bound, and
    B = {e : y_e < y_i}, C = the rest for the upper bound.
    """
    cuts: List[Cut] = []
    rho = point.rho_hat
    for i in hypergraph.products:
        yi = point.y(Bundle((i,)))
        others = [e for e in hypergraph.edges if i not in e]

        active = [e for e in others if yi + point.y(e) - rho > 0]
        lower = x_lower_terms(hypergraph, i, active)
        # rhs - x_i <= 0
        row = point.inequality({**lower, i: -1.0}, "<=", 0.0)
        cut = make_cut(point, row, CutFamily.X_LOWER, f"i={i}")
        if cut.violation > eps:
            cuts.append(cut)

        by_bundle = [e for e in others if point.y(e) < yi]
        by_item = [e for e in others if point.y(e) >= yi]
        upper = x_upper_terms(hypergraph, i, by_bundle, by_item)
        # x_i - rhs <= 0
        terms: Dict[Hashable, float] = {k: -c for k, c in upper.items()}
        terms[i] = 1.0
        row = point.inequality(terms, "<=", 0.0)
        cut = make_cut(point, row, CutFamily.X_UPPER, f"i={i}")
        if cut.violation > eps:
            cuts.append(cut)
    return cuts
