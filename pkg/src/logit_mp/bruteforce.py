"""
Exhaustive enumeration oracles used as ground truth.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .backends import SolveParams, SolverBackend, SolveStatus, get_backend
from .choice_model import ChoicePoint, enumerate_choice_set, expected_revenue
from .constants import BRUTE_FORCE_LIMIT, HULL_LIMIT, HULL_TOL, ROBUST_BRUTE_FORCE_LIMIT
from .errors import EmptyUncertainty, InvalidInput, TooLarge
from .formulations import ConstraintSet, UncertaintySet
from .hypergraph import Hypergraph
from .model import ModelIR

Assortment = Tuple[int, ...]

# Values within this distance are treated as ties
TIE_TOL = 1e-9


@dataclass
class EnumerationResult:
    assortment: Assortment
    value: float
    table: Optional[List[Tuple[Assortment, float]]] = None

    def to_frame(self) -> pd.DataFrame:
        if self.table is None:
            raise InvalidInput("Enumeration was run without keeping the table")
        return pd.DataFrame(
            {
                "assortment": [";".join(str(i) for i in s) for s, _ in self.table],
                "size": [len(s) for s, _ in self.table],
                "value": [v for _, v in self.table],
            }
        )

    def to_csv(self, path) -> Path:
        path = Path(path)
        self.to_frame().to_csv(path, index=False)
        return path


class _SegmentState:
    """Incremental revenue of one segment while items are toggled"""

    def __init__(self, hypergraph: Hypergraph):
        self.v = hypergraph.v
        self.rv = hypergraph.r * hypergraph.v
        self.size = np.array([len(e) for e in hypergraph.edges])
        self.present = np.zeros(len(hypergraph.edges), dtype=int)
        self.by_item = {i: [k for k, e in enumerate(hypergraph.edges) if i in e] for i in hypergraph.products}
        self.numerator = 0.0
        self.denominator = 0.0

    def toggle(self, item: int, on: bool) -> None:
        for k in self.by_item[item]:
            if on:
                self.present[k] += 1
                if self.present[k] == self.size[k]:
                    self.numerator += self.rv[k]
                    self.denominator += self.v[k]
            else:
                if self.present[k] == self.size[k]:
                    self.numerator -= self.rv[k]
                    self.denominator -= self.v[k]
                self.present[k] -= 1

    def value(self) -> float:
        return self.numerator / (1.0 + self.denominator)


def _better(value: float, assortment: Assortment, best_value: float, best: Assortment) -> bool:
    if value > best_value + TIE_TOL:
        return True
    return abs(value - best_value) <= TIE_TOL and assortment < best


def brute_force_optimum(
    hypergraph: Hypergraph,
    X: Optional[ConstraintSet] = None,
    segments: Optional[Sequence[Hypergraph]] = None,
    weights: Optional[Sequence[float]] = None,
    keep_table: bool = False,
    max_products: int = BRUTE_FORCE_LIMIT,
) -> EnumerationResult:
    """
    Best assortment by enumerating all of {0,1}^N in Gray-code order.

    With segments, the value is the weighted revenue over segments (uniform
    weights unless given) and hypergraph only fixes N. Ties go to the
    lexicographically smallest item tuple; candidate optima are re-evaluated
    exactly so incremental round-off cannot decide a tie.

    Raises:
        TooLarge: If N exceeds max_products
    """
    n = hypergraph.num_products
    if n > max_products:
        raise TooLarge(f"Cannot enumerate 2^{n} assortments (limit N <= {max_products})")
    segs = list(segments) if segments else [hypergraph]
    if any(s.num_products != n for s in segs):
        raise InvalidInput("Segments disagree on the number of products")
    lam = np.full(len(segs), 1.0 / len(segs)) if weights is None else np.asarray(weights, dtype=float)
    if len(lam) != len(segs):
        raise InvalidInput("One weight per segment is required")

    def exact(assortment: Assortment) -> float:
        return float(sum(w * expected_revenue(s, assortment) for w, s in zip(lam, segs)))

    states = [_SegmentState(s) for s in segs]
    chosen = [False] * (n + 1)
    best: Assortment = ()
    best_value = exact(())
    table: List[Tuple[Assortment, float]] = []
    if keep_table:
        table.append(((), best_value))

    for k in range(1, 2**n):
        item = (k & -k).bit_length()
        chosen[item] = not chosen[item]
        for state in states:
            state.toggle(item, chosen[item])
        value = float(sum(w * s.value() for w, s in zip(lam, states)))
        if not keep_table and value < best_value - 1e-7:
            continue
        assortment = tuple(i for i in range(1, n + 1) if chosen[i])
        if X is not None and not X.is_satisfied(assortment):
            continue
        if keep_table:
            table.append((assortment, value))
        if value >= best_value - 1e-7:
            value = exact(assortment)
            if _better(value, assortment, best_value, best):
                best, best_value = assortment, value

    if keep_table:
        table.sort()
    return EnumerationResult(best, best_value, table if keep_table else None)


def robust_brute_force(
    segments: Sequence[Hypergraph],
    uncertainty: UncertaintySet,
    X: Optional[ConstraintSet] = None,
    backend: Optional[SolverBackend] = None,
    keep_table: bool = False,
    max_products: int = ROBUST_BRUTE_FORCE_LIMIT,
) -> EnumerationResult:
    """
    Best worst-case assortment: for each assortment the inner minimum over
    the weight polyhedron is an LP, the outer maximum is enumeration.

    Raises:
        TooLarge: If N exceeds max_products
        EmptyUncertainty: If the weight polyhedron is empty
    """
    if not segments:
        raise InvalidInput("At least one segment is required")
    n = segments[0].num_products
    if n > max_products:
        raise TooLarge(f"Cannot enumerate 2^{n} assortments (limit N <= {max_products})")
    backend = backend or get_backend()
    if uncertainty.is_empty(backend):
        raise EmptyUncertainty("Uncertainty set is empty")

    best: Assortment = ()
    best_value = -np.inf
    table: List[Tuple[Assortment, float]] = []
    for mask in range(2**n):
        assortment = tuple(i + 1 for i in range(n) if mask >> i & 1)
        if X is not None and not X.is_satisfied(assortment):
            continue
        revenues = [expected_revenue(s, assortment) for s in segments]
        value, _ = uncertainty.worst_case(revenues, backend)
        if keep_table:
            table.append((assortment, value))
        if _better(value, assortment, best_value, best):
            best, best_value = assortment, value

    if keep_table:
        table.sort()
    return EnumerationResult(best, float(best_value), table if keep_table else None)


def hull_membership(
    point: ChoicePoint,
    hypergraph: Hypergraph,
    backend: Optional[SolverBackend] = None,
    tol: float = HULL_TOL,
    max_products: int = HULL_LIMIT,
) -> bool:
    """
    Whether (rho, y) is a convex combination of the choice-set vertices,
    decided by an LP feasibility problem with residual tolerance tol.

    Raises:
        TooLarge: If N exceeds max_products
    """
    if hypergraph.num_products > max_products:
        raise TooLarge(f"Hull test limited to N <= {max_products}")
    backend = backend or get_backend()
    vertices = [cp.as_vector(hypergraph) for _, cp in enumerate_choice_set(hypergraph, max_products)]
    target = point.as_vector(hypergraph)

    model = ModelIR("hull")
    names = [model.add_variable(f"mu_{k}", 0.0, 1.0) for k in range(len(vertices))]
    model.add_row({name: 1.0 for name in names}, "==", 1.0, "convex")
    for coord in range(len(target)):
        coeffs = {names[k]: vertices[k][coord] for k in range(len(vertices)) if vertices[k][coord] != 0.0}
        if not coeffs:
            if abs(target[coord]) > tol:
                return False
            continue
        model.add_row(coeffs, "<=", target[coord] + tol, f"hi{coord}")
        model.add_row(coeffs, ">=", target[coord] - tol, f"lo{coord}")
    model.set_objective({}, "min")
    return backend.solve(model, SolveParams()).status == SolveStatus.OPTIMAL
