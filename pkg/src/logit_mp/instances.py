"""
Synthetic instances and their JSON persistence.

All randomness comes from numpy's Philox counter-based generator seeded with
GenSpec.seed, so a seed produces the same instance on every platform. Draws
happen in a fixed order: category split, bundle selection, item utilities,
pair interactions, item revenues.
"""

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .constants import SCHEMA_VERSION
from .errors import HypergraphError, InfeasibleCounts, InvalidInput, ParseError, SchemaVersionMismatch
from .formulations import ConstraintSet, UncertaintySet
from .hypergraph import Bundle, Hypergraph, new_hypergraph

ALPHA_RANGE = (-1.5, 0.5)
BETA_RANGE = (-1.25, 0.75)
REVENUE_RANGE = (1.0, 4.0)

# Weights of the segment-specific and shared draws in the mixture edge rule
SEGMENT_SHARE = 0.4
COMMON_SHARE = 0.6


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


@dataclass
class GenSpec:
    """
    Instance generation settings.

    Attributes:
        n: Number of products
        d: Largest bundle size (2 or 3)
        theta: Sparsity, the kept share of candidate multi-item bundles
        pi: Share of kept bundles that span two or more categories
        categories: Number of product categories
        seed: Philox seed
        k: Number of customer segments (mixtures need k >= 2)
        lower_factor: Lower box factor on the segment weights
        upper_factor: Upper box factor on the segment weights
        budget: Budget on the total weight deviation
        cardinality_ratio: Assortments hold at most this share of products
    """

    n: int
    d: int = 2
    theta: float = 0.25
    pi: float = 0.0
    categories: int = 3
    seed: int = 0
    k: int = 1
    lower_factor: float = 0.95
    upper_factor: float = 1.05
    budget: float = 0.1
    cardinality_ratio: float = 0.2

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInput(f"n must be >= 1, got {self.n}")
        if self.d not in (2, 3):
            raise InvalidInput(f"d must be 2 or 3, got {self.d}")
        if not 0.0 < self.theta <= 1.0:
            raise InvalidInput(f"theta must lie in (0, 1], got {self.theta}")
        if not 0.0 <= self.pi <= 1.0:
            raise InvalidInput(f"pi must lie in [0, 1], got {self.pi}")
        if self.categories < 1:
            raise InvalidInput(f"categories must be >= 1, got {self.categories}")
        if self.k < 1:
            raise InvalidInput(f"k must be >= 1, got {self.k}")
        if not 0.0 <= self.lower_factor <= self.upper_factor:
            raise InvalidInput("Box factors must satisfy 0 <= lower_factor <= upper_factor")
        if self.budget < 0:
            raise InvalidInput(f"budget must be >= 0, got {self.budget}")


# Building blocks


def split_categories(n: int, categories: int, rng: np.random.Generator) -> Dict[int, int]:
    """
    Randomly split items 1..n into categories of near-equal size.

    The first n % categories categories get one extra item.
    """
    order = rng.permutation(n) + 1
    base, extra = divmod(n, categories)
    assignment: Dict[int, int] = {}
    start = 0
    for c in range(categories):
        size = base + (1 if c < extra else 0)
        for item in order[start : start + size]:
            assignment[int(item)] = c
        start += size
    return assignment


def candidate_bundles(n: int, d: int) -> List[Bundle]:
    """All bundles with 2..d items, in canonical order"""
    return [Bundle(c) for size in range(2, d + 1) for c in itertools.combinations(range(1, n + 1), size)]


def is_cross_category(bundle: Bundle, assignment: Dict[int, int]) -> bool:
    return len({assignment[i] for i in bundle}) > 1


def bundle_counts(total: int, theta: float, pi: float) -> Tuple[int, int]:
    """(cross, intra) counts: round(theta * total) half-up, cross rounded up"""
    kept = int(math.floor(theta * total + 0.5))
    cross = int(math.ceil(pi * kept - 1e-9))
    return cross, kept - cross


def _pairs(bundles: Sequence[Bundle]) -> List[Tuple[int, int]]:
    return sorted({p for e in bundles for p in itertools.combinations(e.items, 2)})


def _sample_values(
    n: int, bundles: Sequence[Bundle], rng: np.random.Generator, revenues: Optional[np.ndarray] = None
) -> Hypergraph:
    alpha = rng.uniform(*ALPHA_RANGE, size=n)
    pairs = _pairs(bundles)
    beta = dict(zip(pairs, rng.uniform(*BETA_RANGE, size=len(pairs))))
    r = rng.uniform(*REVENUE_RANGE, size=n) if revenues is None else revenues

    edges = []
    for e in [Bundle((i,)) for i in range(1, n + 1)] + list(bundles):
        u = sum(alpha[i - 1] for i in e) + sum(beta[p] for p in itertools.combinations(e.items, 2))
        edges.append((e, u, sum(r[i - 1] for i in e)))
    return Hypergraph.from_utilities(n, edges)


def _choose(pool: Sequence[Bundle], count: int, rng: np.random.Generator) -> List[Bundle]:
    if count == 0:
        return []
    picked = rng.choice(len(pool), size=count, replace=False)
    return [pool[k] for k in sorted(picked)]


def _cardinality(spec: GenSpec) -> ConstraintSet:
    return ConstraintSet.cardinality(spec.n, spec.cardinality_ratio * spec.n)


# Generators


def generate_single(spec: GenSpec) -> Tuple[Hypergraph, ConstraintSet]:
    """
    Single-segment instance.

    A share theta of the candidate multi-item bundles is kept, pi of them
    spanning two or more categories; v_e = exp(sum alpha_i + sum beta_ij)
    and revenues are additive over items.

    Raises:
        InfeasibleCounts: If a category pool is smaller than its bundle count
    """
    rng = make_rng(spec.seed)
    assignment = split_categories(spec.n, spec.categories, rng)
    candidates = candidate_bundles(spec.n, spec.d)
    cross_pool = [e for e in candidates if is_cross_category(e, assignment)]
    intra_pool = [e for e in candidates if not is_cross_category(e, assignment)]

    cross, intra = bundle_counts(len(candidates), spec.theta, spec.pi)
    if cross > len(cross_pool) or intra > len(intra_pool):
        raise InfeasibleCounts(
            f"Need {cross} cross and {intra} intra bundles, only "
            f"{len(cross_pool)} and {len(intra_pool)} exist"
        )
    bundles = _choose(cross_pool, cross, rng) + _choose(intra_pool, intra, rng)
    return _sample_values(spec.n, sorted(bundles), rng), _cardinality(spec)


def generate_mixture(spec: GenSpec) -> Tuple[List[Hypergraph], UncertaintySet, ConstraintSet]:
    """
    Mixture instance with spec.k segments sharing item revenues.

    Candidate e enters segment k when 0.4 p_e^k + 0.6 p_e^0 <= theta with
    p ~ U(0, 1); the pool is intra-category bundles when pi = 0,
    cross-category bundles when pi = 1 and all bundles otherwise. Weights
    lambda_hat ~ U(0, 1) are normalized and the weight polyhedron is the
    box-budget set around them.
    """
    if spec.k < 2:
        raise InvalidInput(f"A mixture needs k >= 2 segments, got {spec.k}")
    rng = make_rng(spec.seed)
    assignment = split_categories(spec.n, spec.categories, rng)
    pool = candidate_bundles(spec.n, spec.d)
    if spec.pi == 0.0:
        pool = [e for e in pool if not is_cross_category(e, assignment)]
    elif spec.pi == 1.0:
        pool = [e for e in pool if is_cross_category(e, assignment)]

    common = rng.uniform(0.0, 1.0, size=len(pool))
    revenues = rng.uniform(*REVENUE_RANGE, size=spec.n)
    segments = []
    for _ in range(spec.k):
        own = rng.uniform(0.0, 1.0, size=len(pool))
        keep = SEGMENT_SHARE * own + COMMON_SHARE * common <= spec.theta
        bundles = [e for e, kept in zip(pool, keep) if kept]
        segments.append(_sample_values(spec.n, bundles, rng, revenues))

    weights = rng.uniform(0.0, 1.0, size=spec.k)
    weights = weights / weights.sum()
    uncertainty = UncertaintySet.box_budget(weights, spec.lower_factor, spec.upper_factor, spec.budget)
    return segments, uncertainty, _cardinality(spec)


# Structured hypergraphs


def _structured(n: int, bundles: Sequence[Bundle], seed: Optional[int]) -> Hypergraph:
    if seed is None:
        edges = [(Bundle((i,)), 1.0, 1.0) for i in range(1, n + 1)]
        edges += [(e, 1.0, float(len(e))) for e in bundles]
        return new_hypergraph(n, edges)
    return _sample_values(n, sorted(set(bundles)), make_rng(seed))


def path_graph(n: int, seed: Optional[int] = None) -> Hypergraph:
    """Pairs {i, i+1}; unit values when seed is None, sampled otherwise"""
    return _structured(n, [Bundle.of(i, i + 1) for i in range(1, n)], seed)


def cycle_graph(n: int, seed: Optional[int] = None) -> Hypergraph:
    if n < 3:
        raise InvalidInput(f"A cycle needs at least 3 products, got {n}")
    return _structured(n, [Bundle.of(i, i % n + 1) for i in range(1, n + 1)], seed)


def series_parallel(n: int, seed: int = 0) -> Hypergraph:
    """
    Random series-parallel graph on n products.

    Starting from the edge {1, 2}, each new product either subdivides an
    edge, adds a two-edge path parallel to an edge, or hangs off an existing
    product.
    """
    if n < 2:
        raise InvalidInput(f"A series-parallel graph needs at least 2 products, got {n}")
    rng = make_rng(seed)
    edges = [(1, 2)]
    for c in range(3, n + 1):
        move = int(rng.integers(3))
        a, b = edges[int(rng.integers(len(edges)))]
        if move == 0:
            edges.remove((a, b))
            edges += [(a, c), (b, c)]
        elif move == 1:
            edges += [(a, c), (b, c)]
        else:
            edges.append((int(rng.integers(1, c)), c))
    return _sample_values(n, sorted({Bundle.of(a, b) for a, b in edges}), rng)


def nested_chain(links: int, seed: Optional[int] = None) -> Hypergraph:
    """
    Kite-free beta-acyclic rank-3 hypergraph on 2 * links + 1 products.

    Triples {2k-1, 2k, 2k+1} form a chain meeting in single products and
    each triple contains the nested pair {2k-1, 2k}.
    """
    if links < 1:
        raise InvalidInput(f"links must be >= 1, got {links}")
    bundles = []
    for k in range(1, links + 1):
        first = 2 * k - 1
        bundles += [Bundle.of(first, first + 1, first + 2), Bundle.of(first, first + 1)]
    return _structured(2 * links + 1, bundles, seed)


def figure_general_pattern(seed: Optional[int] = None) -> Hypergraph:
    """Six products with e0 = {1..6} containing the chain {1,2}, {2,3}, {3,4,5}"""
    bundles = [Bundle.of(1, 2, 3, 4, 5, 6), Bundle.of(1, 2), Bundle.of(2, 3), Bundle.of(3, 4, 5)]
    return _structured(6, bundles, seed)


# Persistence


@dataclass
class Instance:
    """
    A saved problem: one segment, or several with weights and an optional
    weight polyhedron.
    """

    segments: List[Hypergraph]
    constraints: ConstraintSet
    weights: Optional[List[float]] = None
    uncertainty: Optional[UncertaintySet] = None
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not self.segments:
            raise InvalidInput("An instance needs at least one segment")
        if any(h.num_products != self.num_products for h in self.segments):
            raise InvalidInput("Segments disagree on the number of products")
        if self.weights is not None and len(self.weights) != len(self.segments):
            raise InvalidInput("One weight per segment is required")

    @property
    def num_products(self) -> int:
        return self.segments[0].num_products

    @property
    def hypergraph(self) -> Hypergraph:
        return self.segments[0]

    @property
    def is_mixture(self) -> bool:
        return len(self.segments) > 1

    @property
    def segment_weights(self) -> List[float]:
        if self.weights is not None:
            return list(self.weights)
        if self.uncertainty is not None and self.uncertainty.center is not None:
            return self.uncertainty.center.tolist()
        return [1.0 / len(self.segments)] * len(self.segments)

    @classmethod
    def generate(cls, spec: GenSpec, robust: bool = False) -> "Instance":
        """Single instance when spec.k == 1, otherwise a mixture (robust keeps the polyhedron)"""
        meta = {"generator": {k: v for k, v in spec.__dict__.items()}}
        if spec.k == 1:
            hypergraph, X = generate_single(spec)
            return cls([hypergraph], X, meta=meta)
        segments, uncertainty, X = generate_mixture(spec)
        weights = uncertainty.center.tolist() if uncertainty.center is not None else None
        return cls(segments, X, weights, uncertainty if robust else None, meta)

    def to_dict(self) -> Dict[str, Any]:
        """
        Single instances keep the hypergraph's own layout at the top level;
        mixtures list their segments and optional weight polyhedron instead.
        """
        data: Dict[str, Any] = {"schema": SCHEMA_VERSION, "num_products": self.num_products}
        if self.is_mixture:
            data["segments"] = [h.to_dict() for h in self.segments]
        else:
            data["edges"] = self.hypergraph.to_dict()["edges"]
        if self.weights is not None:
            data["weights"] = self.weights
        if self.uncertainty is not None:
            data["uncertainty"] = self.uncertainty.to_dict()
        data["constraint"] = self.constraints.to_dict()
        data["meta"] = self.meta
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Instance":
        """
        Raises:
            SchemaVersionMismatch: If the schema field is not the current version
            ParseError: If a field is missing or malformed
        """
        if not isinstance(data, dict):
            raise ParseError("Instance document must be a JSON object")
        schema = data.get("schema")
        if schema != SCHEMA_VERSION:
            raise SchemaVersionMismatch(f"Expected schema {SCHEMA_VERSION}, got {schema!r}")
        if ("edges" in data) == ("segments" in data):
            raise ParseError("Instance needs exactly one of 'edges' or 'segments'")
        try:
            n = int(data["num_products"])
            if "edges" in data:
                segments = [Hypergraph.from_dict({"num_products": n, "edges": data["edges"]})]
            else:
                segments = [Hypergraph.from_dict(s) for s in data["segments"]]
            constraints = ConstraintSet.from_dict(n, data.get("constraint") or {})
            uncertainty = data.get("uncertainty")
            return cls(
                segments,
                constraints,
                data.get("weights"),
                None if uncertainty is None else UncertaintySet.from_dict(uncertainty),
                dict(data.get("meta") or {}),
            )
        except (KeyError, TypeError, ValueError, HypergraphError, InvalidInput) as e:
            raise ParseError(f"Malformed instance: {e}") from e

    def save(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), indent=2, default=str))
        return path

    @classmethod
    def load(cls, path) -> "Instance":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as e:
            raise ParseError(f"{path} is not valid JSON: {e}") from e
        return cls.from_dict(data)


def save(instance: Instance, path) -> Path:
    return instance.save(path)


def load(path) -> Instance:
    return Instance.load(path)
