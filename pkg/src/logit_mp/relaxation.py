"""
Polyhedral relaxations of the monomial set z_e = prod_{i in e} x_i.

The recursive McCormick (RMC) relaxation splits every multi-item bundle into
a binary tree of bilinear products and writes the four McCormick envelopes per
tree node. Auxiliary bundles created by the split (not in E) are collected in
the tree's registry W.
"""

import heapq
import math
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Tuple

from .errors import InvalidInput
from .hypergraph import Bundle, Hypergraph

SENSES = ("<=", ">=", "==")


def variable_label(key: Hashable) -> str:
    """Printable name of an inequality key; bundles print as z variables"""
    if isinstance(key, Bundle):
        return f"z_{key.name}"
    return str(key)


@dataclass(frozen=True)
class LinearInequality:
    """
    A sparse linear row  sum(coeffs[k] * var_k)  sense  rhs.

    Keys are bundles for relaxation rows over z, and variable names
    ("rho", "y_1_2", "x_3") for rows over model variables.
    """

    coeffs: Dict[Hashable, float]
    sense: str
    rhs: float = 0.0

    def __post_init__(self):
        if self.sense not in SENSES:
            raise InvalidInput(f"Unknown sense {self.sense!r}")
        cleaned = {}
        for key, value in self.coeffs.items():
            value = float(value)
            if not math.isfinite(value):
                raise InvalidInput(f"Non-finite coefficient on {variable_label(key)}")
            if value != 0.0:
                cleaned[key] = value
        if not cleaned:
            raise InvalidInput("Inequality has no nonzero terms")
        if not math.isfinite(float(self.rhs)):
            raise InvalidInput("Non-finite right-hand side")
        object.__setattr__(self, "coeffs", cleaned)
        object.__setattr__(self, "rhs", float(self.rhs))

    def evaluate(self, values: Mapping[Hashable, float]) -> float:
        """Left-hand side at the given values (missing keys count as 0)"""
        return sum(c * values.get(k, 0.0) for k, c in self.coeffs.items())

    def violation(self, values: Mapping[Hashable, float]) -> float:
        """Amount by which the row is violated; negative or zero when satisfied"""
        lhs = self.evaluate(values)
        if self.sense == "<=":
            return lhs - self.rhs
        if self.sense == ">=":
            return self.rhs - lhs
        return abs(lhs - self.rhs)

    def as_leq(self) -> "LinearInequality":
        """Same row written with sense <= (equalities are returned unchanged)"""
        if self.sense != ">=":
            return self
        return LinearInequality({k: -c for k, c in self.coeffs.items()}, "<=", -self.rhs)

    def map_keys(self, mapping: Mapping[Hashable, Hashable]) -> "LinearInequality":
        """Rename variables; keys that map to the same target are summed"""
        coeffs: Dict[Hashable, float] = {}
        for k, c in self.coeffs.items():
            target = mapping.get(k, k)
            coeffs[target] = coeffs.get(target, 0.0) + c
        return LinearInequality(coeffs, self.sense, self.rhs)

    def normalized_key(self, digits: int = 9) -> Tuple:
        """Hashable form invariant to positive scaling, used for deduplication"""
        row = self.as_leq()
        scale = max(abs(c) for c in row.coeffs.values())
        terms = tuple(
            sorted((variable_label(k), round(c / scale, digits)) for k, c in row.coeffs.items())
        )
        return (terms, row.sense, round(row.rhs / scale, digits))

    def render(self) -> str:
        """Stable text form, terms sorted by variable name"""
        parts = []
        for name, c in sorted((variable_label(k), c) for k, c in self.coeffs.items()):
            sign = "-" if c < 0 else "+"
            parts.append(f"{sign} {abs(c):.12g} {name}")
        text = " ".join(parts)
        if text.startswith("+ "):
            text = text[2:]
        return f"{text} {self.sense} {self.rhs:.12g}"

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class RmcTree:
    """
    The forest of binary decomposition trees for all multi-item bundles.

    nodes maps each internal bundle t to (left child, right child) where the
    right child is the singleton of t's largest item. auxiliary lists the
    internal bundles that are not edges of the hypergraph (the registry W).
    """

    nodes: Dict[Bundle, Tuple[Bundle, Bundle]] = field(default_factory=dict)
    auxiliary: Tuple[Bundle, ...] = ()

    def internal_nodes(self) -> List[Bundle]:
        return sorted(self.nodes)

    def children(self, node: Bundle) -> Tuple[Bundle, Bundle]:
        return self.nodes[node]

    def is_empty(self) -> bool:
        return not self.nodes


def build_rmc_trees(hypergraph: Hypergraph) -> RmcTree:
    """
    Decompose every multi-item bundle by repeatedly dropping its largest item.

    Bundles are processed smallest first (lexicographic among equal sizes).
    A left child with two or more items that has not been visited yet is
    queued; it joins the registry W when it is not an edge. Shared prefixes
    are created once.
    """
    queue = [e for e in hypergraph.edges if len(e) >= 2]
    heapq.heapify(queue)
    visited = set()
    nodes: Dict[Bundle, Tuple[Bundle, Bundle]] = {}
    auxiliary: List[Bundle] = []

    while queue:
        e = heapq.heappop(queue)
        if e in visited:
            continue
        visited.add(e)
        left = Bundle(e.items[:-1])
        right = Bundle((e.items[-1],))
        nodes[e] = (left, right)
        if len(left) >= 2 and left not in visited:
            if left not in hypergraph and left not in auxiliary:
                auxiliary.append(left)
            heapq.heappush(queue, left)

    return RmcTree(nodes, tuple(sorted(auxiliary)))


def mccormick_rows(node: Bundle, left: Bundle, right: Bundle) -> List[LinearInequality]:
    """The four envelopes of z_node = z_left * z_right over [0,1]^2"""
    return [
        LinearInequality({node: 1.0}, ">=", 0.0),
        LinearInequality({node: 1.0, left: -1.0, right: -1.0}, ">=", -1.0),
        LinearInequality({node: 1.0, left: -1.0}, "<=", 0.0),
        LinearInequality({node: 1.0, right: -1.0}, "<=", 0.0),
    ]


def rmc_inequalities(tree: RmcTree) -> List[LinearInequality]:
    """Recursive McCormick rows, four per internal node"""
    rows: List[LinearInequality] = []
    for node in tree.internal_nodes():
        left, right = tree.children(node)
        rows.extend(mccormick_rows(node, left, right))
    return rows


def standard_linear_relaxation(hypergraph: Hypergraph) -> List[LinearInequality]:
    """
    The standard linearization of every multi-item bundle:
    z_e >= 0, z_e <= z_i for i in e, z_e >= sum z_i - |e| + 1.
    """
    rows: List[LinearInequality] = []
    for e in hypergraph.nonsingletons():
        rows.append(LinearInequality({e: 1.0}, ">=", 0.0))
        for i in e:
            rows.append(LinearInequality({e: 1.0, Bundle((i,)): -1.0}, "<=", 0.0))
        lower: Dict[Hashable, float] = {e: 1.0}
        for i in e:
            lower[Bundle((i,))] = -1.0
        rows.append(LinearInequality(lower, ">=", 1.0 - len(e)))
    return rows


def default_oracle(
    hypergraph: Hypergraph, tree: Optional[RmcTree] = None
) -> Tuple[RmcTree, List[LinearInequality]]:
    """RMC tree and its rows, the relaxation every formulation starts from"""
    tree = tree or build_rmc_trees(hypergraph)
    return tree, rmc_inequalities(tree)


def oracle_bundles(rows: Iterable[LinearInequality]) -> List[Bundle]:
    """All bundles referenced by a list of relaxation rows"""
    seen = set()
    for row in rows:
        for key in row.coeffs:
            if isinstance(key, Bundle):
                seen.add(key)
    return sorted(seen)
