"""
Running-intersection cuts.

For a central bundle e0 and neighbors e_1..e_m whose intersections with e0
admit a running-intersection ordering, the rho-scaled row

    sum_k y_{e_k} + sum_{v in e0 \\ U e_k} y_v
        <= y_{e0} + sum_{k : N_k nonempty} y_{mu_k} + rho (omega - 1)

is valid, where mu_k is any item of N_k and omega counts the items of e0
outside every e_k plus the orderings' members with empty N_k.
"""

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from ..constants import DEFAULT_EPS, DEFAULT_M_BAR
from ..errors import InvalidInput
from ..hypergraph import Bundle, Hypergraph, RIOrdering, find_ri_ordering
from .base import Cut, CutFamily, FractionalPoint, make_cut


@dataclass
class RIStructure:
    """
    Separation structure of one central bundle.

    neighbors maps each intersection e0 & e_k to the bundles e_k producing it.
    """

    central: Bundle
    orderings: List[RIOrdering] = field(default_factory=list)
    neighbors: Dict[Bundle, Tuple[Bundle, ...]] = field(default_factory=dict)


def _is_antichain(sets: Sequence[Bundle]) -> bool:
    for a, b in itertools.combinations(sets, 2):
        if a.item_set < b.item_set or b.item_set < a.item_set:
            return False
    return True


def build_ri_structures(hypergraph: Hypergraph, m_bar: int = DEFAULT_M_BAR) -> List[RIStructure]:
    """
    Collect, for every multi-item bundle e0, the RI orderings over antichains
    of at most m_bar intersections.
    """
    if m_bar < 1:
        raise InvalidInput(f"m_bar must be >= 1, got {m_bar}")

    structures = []
    for e0 in hypergraph.nonsingletons():
        grouped: Dict[Bundle, List[Bundle]] = {}
        for ek, common in hypergraph.neighbor_intersections(e0):
            grouped.setdefault(common, []).append(ek)
        structure = RIStructure(e0, neighbors={k: tuple(v) for k, v in grouped.items()})

        intersections = sorted(grouped)
        for size in range(1, min(m_bar, len(intersections)) + 1):
            for subset in itertools.combinations(intersections, size):
                if not _is_antichain(subset):
                    continue
                # First ordering found is kept
                ordering = find_ri_ordering(subset)
                if ordering is not None:
                    structure.orderings.append(ordering)
        structures.append(structure)
    return structures


def ric_terms(
    structure: RIStructure, ordering: RIOrdering, point: FractionalPoint
) -> Dict[Hashable, float]:
    """Terms of the row  lhs - rhs <= 0  for the best neighbors at the point"""
    e0 = structure.central
    covered = set()
    omega = 0
    terms: Dict[Hashable, float] = {}

    def add(key: Hashable, c: float):
        terms[key] = terms.get(key, 0.0) + c

    for common, prior in zip(ordering.sets, ordering.neighbors):
        covered |= common.item_set
        best = _argmax(structure.neighbors[common], point)
        add(best, 1.0)
        if prior:
            mu = min(sorted(prior), key=lambda i: point.y(Bundle((i,))))
            add(Bundle((mu,)), -1.0)
        else:
            omega += 1

    outside = [v for v in e0 if v not in covered]
    omega += len(outside)
    for v in outside:
        add(Bundle((v,)), 1.0)
    add(e0, -1.0)
    add("rho", -(omega - 1))
    return {k: c for k, c in terms.items() if c != 0.0}


def _argmax(bundles: Sequence[Bundle], point: FractionalPoint) -> Bundle:
    # Ties go to the canonical first
    best = None
    for e in sorted(bundles):
        if best is None or point.y(e) > point.y(best):
            best = e
    return best


def _separate_structure(structure: RIStructure, point: FractionalPoint, eps: float) -> List[Cut]:
    cuts = []
    for ordering in structure.orderings:
        terms = ric_terms(structure, ordering, point)
        if not terms:
            continue
        row = point.inequality(terms, "<=", 0.0)
        cut = make_cut(point, row, CutFamily.RUNNING_INTERSECTION, f"e0={structure.central}")
        if cut.violation > eps:
            cuts.append(cut)
    return cuts


def separate_running_intersection(
    point: FractionalPoint,
    structures: Sequence[RIStructure],
    eps: float = DEFAULT_EPS,
    max_workers: Optional[int] = None,
) -> List[Cut]:
    """
    Running-intersection cuts violated by more than eps.

    Structures are independent; with max_workers > 1 they are separated on a
    thread pool and the results are concatenated in structure order.
    """
    if max_workers and max_workers > 1 and len(structures) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            parts = list(pool.map(lambda s: _separate_structure(s, point, eps), structures))
    else:
        parts = [_separate_structure(s, point, eps) for s in structures]
    return [cut for part in parts for cut in part]
