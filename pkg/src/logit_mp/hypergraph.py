"""
Multi-purchase hypergraphs: products, bundles, attraction values and revenues.

A hypergraph G(V, E, v, r) holds the consideration set E of a Logit-MP model.
Bundles are kept in canonical form (ascending items) and the edge list is
stored in canonical bundle order, so two hypergraphs built from permuted edge
lists compare equal.
"""

import math
from dataclasses import dataclass
from functools import cached_property, total_ordering
from typing import Any, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .constants import UTILITY_OVERFLOW
from .errors import (
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


@total_ordering
@dataclass(frozen=True)
class Bundle:
    """
    A set of products (1-based indices) kept in ascending order.

    Bundles order by size first, then lexicographically on their items. This is
    the canonical order used for every tie-break in the package.
    """

    items: Tuple[int, ...]

    def __post_init__(self):
        items = tuple(int(i) for i in self.items)
        if not items:
            raise EmptyBundle("Bundle must contain at least one item")
        if len(set(items)) != len(items):
            raise InvalidInput(f"Bundle has repeated items: {items}")
        if min(items) < 1:
            raise ItemOutOfRange(f"Bundle items must be >= 1, got {items}")
        object.__setattr__(self, "items", tuple(sorted(items)))

    @classmethod
    def of(cls, *items: int) -> "Bundle":
        """Shorthand constructor: Bundle.of(1, 2)"""
        return cls(tuple(items))

    def __lt__(self, other: "Bundle") -> bool:
        if not isinstance(other, Bundle):
            return NotImplemented
        return self.sort_key < other.sort_key

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[int]:
        return iter(self.items)

    def __contains__(self, item: object) -> bool:
        return item in self.items

    def __repr__(self) -> str:
        return "{" + ",".join(str(i) for i in self.items) + "}"

    @property
    def sort_key(self) -> Tuple[int, Tuple[int, ...]]:
        return (len(self.items), self.items)

    @property
    def name(self) -> str:
        """Identifier fragment used in variable names, e.g. '1_2'"""
        return "_".join(str(i) for i in self.items)

    @property
    def mask(self) -> int:
        """Bitset with bit i-1 set for every item i"""
        m = 0
        for i in self.items:
            m |= 1 << (i - 1)
        return m

    @property
    def item_set(self) -> FrozenSet[int]:
        return frozenset(self.items)

    def is_singleton(self) -> bool:
        return len(self.items) == 1

    def issubset(self, other: Iterable[int]) -> bool:
        pool = other.item_set if isinstance(other, Bundle) else set(other)
        return all(i in pool for i in self.items)

    def intersection(self, other: Iterable[int]) -> FrozenSet[int]:
        return self.item_set & frozenset(other)


def _as_bundle(items: Any) -> Bundle:
    if isinstance(items, Bundle):
        return items
    if isinstance(items, int):
        return Bundle((items,))
    return Bundle(tuple(items))


class Hypergraph:
    """
    An immutable multi-purchase hypergraph G(V, E, v, r).

    Use new_hypergraph() or Hypergraph.from_utilities() to build one; both
    validate the edge list before construction.
    """

    def __init__(
        self,
        num_products: int,
        edges: Sequence[Bundle],
        attractions: Dict[Bundle, float],
        revenues: Dict[Bundle, float],
    ):
        self._n = num_products
        self._edges: Tuple[Bundle, ...] = tuple(sorted(edges))
        self._v = dict(attractions)
        self._r = dict(revenues)
        self._index = {e: k for k, e in enumerate(self._edges)}

    @classmethod
    def from_utilities(
        cls, num_products: int, edges: Iterable[Tuple[Any, float, float]]
    ) -> "Hypergraph":
        """
        Build a hypergraph from (items, u, r) triples with v = exp(u).

        Raises:
            UtilityOverflow: If some |u| exceeds the overflow guard
        """
        converted = []
        for items, u, r in edges:
            u = float(u)
            if not math.isfinite(u) or abs(u) > UTILITY_OVERFLOW:
                raise UtilityOverflow(f"Utility {u} of bundle {items} is out of range")
            converted.append((items, math.exp(u), r))
        return new_hypergraph(num_products, converted)

    # Basic accessors

    @property
    def num_products(self) -> int:
        return self._n

    @property
    def edges(self) -> Tuple[Bundle, ...]:
        return self._edges

    @property
    def products(self) -> range:
        return range(1, self._n + 1)

    def __len__(self) -> int:
        return len(self._edges)

    def __contains__(self, bundle: object) -> bool:
        return bundle in self._index

    def __iter__(self) -> Iterator[Bundle]:
        return iter(self._edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (
            self._n == other._n
            and self._edges == other._edges
            and self._v == other._v
            and self._r == other._r
        )

    def __hash__(self) -> int:
        return hash((self._n, self._edges))

    def __repr__(self) -> str:
        return f"Hypergraph(N={self._n}, |E|={len(self._edges)}, rank={self.rank()})"

    def index(self, bundle: Bundle) -> int:
        """Position of a bundle in the canonical edge order"""
        try:
            return self._index[bundle]
        except KeyError:
            raise UnknownBundle(f"Bundle {bundle} is not in the hypergraph")

    def attraction(self, bundle: Bundle) -> float:
        self.index(bundle)
        return self._v[bundle]

    def utility(self, bundle: Bundle) -> float:
        return math.log(self.attraction(bundle))

    def revenue(self, bundle: Bundle) -> float:
        self.index(bundle)
        return self._r[bundle]

    @cached_property
    def v(self) -> np.ndarray:
        """Attraction values aligned with self.edges"""
        return np.array([self._v[e] for e in self._edges], dtype=float)

    @cached_property
    def r(self) -> np.ndarray:
        """Revenues aligned with self.edges"""
        return np.array([self._r[e] for e in self._edges], dtype=float)

    @cached_property
    def masks(self) -> Tuple[int, ...]:
        return tuple(e.mask for e in self._edges)

    # Structural queries

    def rank(self) -> int:
        """Maximum bundle size"""
        return max(len(e) for e in self._edges)

    def singletons(self) -> List[Bundle]:
        return [e for e in self._edges if e.is_singleton()]

    def nonsingletons(self) -> List[Bundle]:
        return [e for e in self._edges if not e.is_singleton()]

    def sparsity(self, reference_nonsingleton_count: int) -> float:
        """
        Ratio of multi-item bundles to a reference count of candidate bundles.

        Args:
            reference_nonsingleton_count: Number of multi-item bundles the
                generation rule could have produced

        Raises:
            ZeroReference: If the reference count is not positive
        """
        if reference_nonsingleton_count <= 0:
            raise ZeroReference("Reference bundle count must be positive")
        return len(self.nonsingletons()) / reference_nonsingleton_count

    def edges_containing(self, item: int) -> List[Bundle]:
        return [e for e in self._edges if item in e]

    def neighbor_intersections(self, e0: Bundle) -> List[Tuple[Bundle, Bundle]]:
        """
        All other bundles meeting e0, each paired with its intersection.

        Raises:
            UnknownBundle: If e0 is not an edge
        """
        self.index(e0)
        result = []
        for ek in self._edges:
            if ek == e0:
                continue
            common = e0.intersection(ek)
            if common:
                result.append((ek, Bundle(tuple(common))))
        return result

    def restrict_rank(self, d: int) -> "Hypergraph":
        """Sub-hypergraph made of the bundles with at most d items"""
        kept = [e for e in self._edges if len(e) <= d]
        return Hypergraph(
            self._n,
            kept,
            {e: self._v[e] for e in kept},
            {e: self._r[e] for e in kept},
        )

    def with_values(
        self,
        attractions: Optional[Dict[Bundle, float]] = None,
        revenues: Optional[Dict[Bundle, float]] = None,
    ) -> "Hypergraph":
        """Copy with some attraction values or revenues replaced"""
        v = dict(self._v)
        r = dict(self._r)
        v.update(attractions or {})
        r.update(revenues or {})
        return new_hypergraph(self._n, [(e, v[e], r[e]) for e in self._edges])

    # Serialization

    def to_dict(self) -> Dict[str, Any]:
        return {
            "num_products": self._n,
            "edges": [
                {"items": list(e.items), "v": self._v[e], "r": self._r[e]}
                for e in self._edges
            ],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Hypergraph":
        return new_hypergraph(
            int(data["num_products"]),
            [(edge["items"], float(edge["v"]), float(edge["r"])) for edge in data["edges"]],
        )


def new_hypergraph(num_products: int, edges: Iterable[Tuple[Any, float, float]]) -> Hypergraph:
    """
    Validate an edge list and build a Hypergraph.

    Args:
        num_products: Number of products N
        edges: (items, v, r) triples; items may be a Bundle, an int or any
            iterable of product indices

    Returns:
        The validated hypergraph

    Raises:
        DuplicateBundle: If two edges have the same item set
        NonPositiveAttraction: If some v is not a positive finite number
        ItemOutOfRange: If an item lies outside [1, N]
        MissingSingleton: If some singleton {i} is absent
    """
    if isinstance(num_products, bool) or not isinstance(num_products, (int, np.integer)):
        raise InvalidInput(f"num_products must be an integer, got {num_products!r}")
    if num_products < 1:
        raise InvalidInput(f"num_products must be >= 1, got {num_products}")

    bundles: List[Bundle] = []
    attractions: Dict[Bundle, float] = {}
    revenues: Dict[Bundle, float] = {}
    for items, v, r in edges:
        bundle = _as_bundle(items)
        if bundle.items[-1] > num_products:
            raise ItemOutOfRange(f"Bundle {bundle} has items outside [1, {num_products}]")
        if bundle in attractions:
            raise DuplicateBundle(f"Bundle {bundle} appears more than once")
        v = float(v)
        if not math.isfinite(v) or v <= 0:
            raise NonPositiveAttraction(f"Bundle {bundle} has attraction {v}")
        r = float(r)
        if not math.isfinite(r):
            raise InvalidInput(f"Bundle {bundle} has non-finite revenue {r}")
        bundles.append(bundle)
        attractions[bundle] = v
        revenues[bundle] = r

    missing = [i for i in range(1, int(num_products) + 1) if Bundle((i,)) not in attractions]
    if missing:
        raise MissingSingleton(f"Singleton bundles missing for items {missing}")

    return Hypergraph(int(num_products), bundles, attractions, revenues)


@dataclass(frozen=True)
class RIOrdering:
    """
    A running-intersection ordering of item sets.

    neighbors[k] is the part of sets[k] already covered by sets[:k]; the
    ordering is valid when each non-empty neighbors[k] sits inside a single
    earlier set.
    """

    sets: Tuple[Bundle, ...]
    neighbors: Tuple[FrozenSet[int], ...]

    def __len__(self) -> int:
        return len(self.sets)

    def is_valid(self) -> bool:
        covered: set = set()
        for k, s in enumerate(self.sets):
            expected = s.item_set & covered
            if self.neighbors[k] != expected:
                return False
            if k > 0 and expected and not any(expected <= p.item_set for p in self.sets[:k]):
                return False
            covered |= s.item_set
        return not self.neighbors or not self.neighbors[0]


def _neighbors_of(sets: Sequence[Bundle]) -> Tuple[FrozenSet[int], ...]:
    covered: FrozenSet[int] = frozenset()
    result = []
    for s in sets:
        result.append(s.item_set & covered)
        covered = covered | s.item_set
    return tuple(result)


def find_ri_ordering(sets: Sequence[Any]) -> Optional[RIOrdering]:
    """
    Search for a running-intersection ordering of the given sets.

    Sets are tried in canonical order with backtracking; dead ends are
    memoised on the set of already placed members.

    Returns:
        An RIOrdering, or None when the sets admit no such ordering
    """
    bundles = sorted(_as_bundle(s) for s in sets)
    if not bundles:
        raise InvalidInput("find_ri_ordering needs at least one set")
    if len(set(bundles)) != len(bundles):
        raise InvalidInput("find_ri_ordering needs pairwise distinct sets")

    m = len(bundles)
    dead: set = set()
    order: List[int] = []

    def extend(used: FrozenSet[int], covered: FrozenSet[int]) -> bool:
        if len(order) == m:
            return True
        if used in dead:
            return False
        for k in range(m):
            if k in used:
                continue
            common = bundles[k].item_set & covered
            # Running intersection: common part inside one placed set
            if common and not any(common <= bundles[j].item_set for j in order):
                continue
            order.append(k)
            if extend(used | {k}, covered | bundles[k].item_set):
                return True
            order.pop()
        dead.add(used)
        return False

    if not extend(frozenset(), frozenset()):
        return None
    placed = tuple(bundles[k] for k in order)
    return RIOrdering(placed, _neighbors_of(placed))
