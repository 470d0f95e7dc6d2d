"""
Model builders for Logit-MP assortment optimization.

Every builder returns a ModelIR. The perspective family homogenizes a
relaxation oracle with the no-purchase variable rho; the Big-M family keeps
explicit z variables and links y = rho z through McCormick envelopes; the
conic family adds rotated-cone rows on top of Big-M. Mixture and robust models
stack one perspective block per customer segment over a shared x.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .backends import SolveParams, SolverBackend, SolveStatus, get_backend
from .errors import (
    BadBounds,
    EmptyUncertainty,
    InvalidInput,
    MissingRmc,
    NotBigM,
    WeightsNotSimplex,
)
from .hypergraph import Bundle, Hypergraph
from .log import Log
from .model import AffineExpr, ConeRow, ModelIR, PerspectiveBlock, VariableNamer
from .relaxation import (
    LinearInequality,
    RmcTree,
    build_rmc_trees,
    default_oracle,
    oracle_bundles,
    rmc_inequalities,
)
from .separation.x_bounds import x_lower_terms, x_upper_terms


class ConstraintSet:
    """
    Operational constraints on the assortment, as linear rows over items.

    Row keys are product indices. The empty assortment must be feasible.
    """

    def __init__(self, num_products: int, rows: Optional[Iterable[LinearInequality]] = None):
        self.num_products = num_products
        self.rows: List[LinearInequality] = list(rows or [])
        for row in self.rows:
            for key in row.coeffs:
                if not isinstance(key, (int, np.integer)) or not 1 <= key <= num_products:
                    raise InvalidInput(f"Constraint row references unknown item {key!r}")
            if row.violation({}) > 0:
                raise InvalidInput(f"Constraint {row.render()} excludes the empty assortment")

    @classmethod
    def unconstrained(cls, num_products: int) -> "ConstraintSet":
        return cls(num_products)

    @classmethod
    def cardinality(cls, num_products: int, limit: float) -> "ConstraintSet":
        """sum_i x_i <= limit"""
        if limit < 0:
            raise InvalidInput(f"Cardinality limit must be >= 0, got {limit}")
        row = LinearInequality({i: 1.0 for i in range(1, num_products + 1)}, "<=", float(limit))
        return cls(num_products, [row])

    def is_satisfied(self, assortment: Iterable[int], tol: float = 1e-9) -> bool:
        values = {i: 1.0 for i in assortment}
        return all(row.violation(values) <= tol for row in self.rows)

    def as_model_rows(self) -> List[LinearInequality]:
        return [row.map_keys({k: VariableNamer.x(int(k)) for k in row.coeffs}) for row in self.rows]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConstraintSet):
            return NotImplemented
        return self.num_products == other.num_products and self.to_dict() == other.to_dict()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rows": [
                {"coeffs": {str(k): c for k, c in sorted(row.coeffs.items())}, "sense": row.sense, "rhs": row.rhs}
                for row in self.rows
            ]
        }

    @classmethod
    def from_dict(cls, num_products: int, data: Mapping[str, Any]) -> "ConstraintSet":
        rows = [
            LinearInequality({int(k): float(c) for k, c in row["coeffs"].items()}, row["sense"], float(row["rhs"]))
            for row in data.get("rows", [])
        ]
        return cls(num_products, rows)


# Perspective blocks


def _check_rmc(tree: RmcTree, oracle_cuts: Sequence[LinearInequality]) -> None:
    present = {row.normalized_key() for row in oracle_cuts}
    for row in rmc_inequalities(tree):
        if row.normalized_key() not in present:
            raise MissingRmc(f"Oracle is missing the recursive McCormick row {row.render()}")


def _add_x_variables(model: ModelIR, hypergraph: Hypergraph, X: Optional[ConstraintSet]) -> None:
    if X is not None and X.num_products != hypergraph.num_products:
        raise InvalidInput("Constraint set and hypergraph disagree on the number of products")
    for i in hypergraph.products:
        if not model.has_variable(VariableNamer.x(i)):
            model.add_variable(VariableNamer.x(i), 0.0, 1.0, binary=True)
    if X is not None:
        for k, row in enumerate(X.as_model_rows()):
            model.add_inequality(row, f"X{k}")


def add_perspective_block(
    model: ModelIR,
    hypergraph: Hypergraph,
    oracle_cuts: Sequence[LinearInequality],
    namer: VariableNamer,
    tree: Optional[RmcTree] = None,
) -> PerspectiveBlock:
    """
    Add one (rho, y) block: normalization, homogenized oracle rows,
    0 <= y <= rho, and the four extreme x-link rows per item.
    x variables must already exist.
    """
    tree = tree or build_rmc_trees(hypergraph)
    _check_rmc(tree, oracle_cuts)

    bundles = sorted(set(hypergraph.edges) | set(tree.auxiliary) | set(oracle_bundles(oracle_cuts)))
    rho = model.add_variable(namer.rho(), 0.0, math.inf)
    for e in bundles:
        model.add_variable(namer.y(e), 0.0, math.inf)

    tag = namer.tag or ""
    normalization = {rho: 1.0}
    for e in hypergraph.edges:
        normalization[namer.y(e)] = hypergraph.attraction(e)
    model.add_row(normalization, "==", 1.0, f"norm{tag}")

    # Oracle rows: z_e -> y_e, constant b -> b * rho
    for k, row in enumerate(oracle_cuts):
        coeffs = {namer.y(key): c for key, c in row.coeffs.items()}
        if row.rhs:
            coeffs[rho] = coeffs.get(rho, 0.0) - row.rhs
        model.add_row(coeffs, row.sense, 0.0, f"oracle{tag}_{k}")

    for e in bundles:
        model.add_row({namer.y(e): 1.0, rho: -1.0}, "<=", 0.0, f"cap{tag}_{e.name}")

    # Extreme x-link rows
    for i in hypergraph.products:
        others = [e for e in hypergraph.edges if i not in e]
        x = namer.x(i)
        for label, terms, sense in (
            ("base1", x_lower_terms(hypergraph, i, []), ">="),
            ("base2", x_lower_terms(hypergraph, i, others), ">="),
            ("base3", x_upper_terms(hypergraph, i, [], others), "<="),
            ("base4", x_upper_terms(hypergraph, i, others, []), "<="),
        ):
            coeffs: Dict[str, float] = {x: 1.0}
            for key, c in terms.items():
                name = rho if key == "rho" else namer.y(key)
                coeffs[name] = coeffs.get(name, 0.0) - c
            model.add_row(coeffs, sense, 0.0, f"{label}{tag}_{i}")

    block = PerspectiveBlock(hypergraph, namer, tree, tuple(bundles))
    model.blocks.append(block)
    return block


def build_base_perspective(
    hypergraph: Hypergraph,
    oracle_cuts: Optional[Sequence[LinearInequality]] = None,
    X: Optional[ConstraintSet] = None,
) -> ModelIR:
    """
    The perspective MIP over a relaxation oracle, objective unset.

    Args:
        hypergraph: The Logit-MP model
        oracle_cuts: Relaxation rows over z (bundle keys); must contain the
            RMC rows. Defaults to the RMC rows alone.
        X: Operational constraints on x

    Raises:
        MissingRmc: If some RMC row is absent from oracle_cuts
    """
    tree, rmc = default_oracle(hypergraph)
    oracle_cuts = rmc if oracle_cuts is None else list(oracle_cuts)
    model = ModelIR("perspective")
    _add_x_variables(model, hypergraph, X)
    add_perspective_block(model, hypergraph, oracle_cuts, VariableNamer(), tree)
    model.meta["num_products"] = hypergraph.num_products
    return model


# Big-M and conic


def default_rho_bounds(hypergraph: Hypergraph) -> Tuple[float, float]:
    """rho lies between 1 / (1 + sum v) and 1 for any assortment"""
    return 1.0 / (1.0 + float(hypergraph.v.sum())), 1.0


def build_bigm(
    hypergraph: Hypergraph,
    oracle_cuts: Optional[Sequence[LinearInequality]] = None,
    X: Optional[ConstraintSet] = None,
    rho_L: Optional[float] = None,
    rho_U: Optional[float] = None,
) -> ModelIR:
    """
    The Big-M MIP: explicit z, oracle rows on z, McCormick envelopes for y = rho z.

    Raises:
        BadBounds: Unless 0 <= rho_L <= rho_U <= 1
    """
    default_L, default_U = default_rho_bounds(hypergraph)
    rho_L = default_L if rho_L is None else float(rho_L)
    rho_U = default_U if rho_U is None else float(rho_U)
    if not 0.0 <= rho_L <= rho_U <= 1.0:
        raise BadBounds(f"Need 0 <= rho_L <= rho_U <= 1, got rho_L={rho_L}, rho_U={rho_U}")

    tree, rmc = default_oracle(hypergraph)
    oracle_cuts = rmc if oracle_cuts is None else list(oracle_cuts)
    namer = VariableNamer()
    model = ModelIR("bigm")
    _add_x_variables(model, hypergraph, X)

    rho = model.add_variable(namer.rho(), 0.0, math.inf)
    for e in hypergraph.edges:
        model.add_variable(namer.y(e), 0.0, math.inf)
    z_bundles = sorted(set(hypergraph.nonsingletons()) | set(tree.auxiliary) | set(oracle_bundles(oracle_cuts)))
    for e in z_bundles:
        if not model.has_variable(namer.z(e)):
            model.add_variable(namer.z(e), 0.0, 1.0)

    normalization = {rho: 1.0}
    for e in hypergraph.edges:
        normalization[namer.y(e)] = hypergraph.attraction(e)
    model.add_row(normalization, "==", 1.0, "norm")

    for k, row in enumerate(oracle_cuts):
        model.add_row({namer.z(key): c for key, c in row.coeffs.items()}, row.sense, row.rhs, f"oracle_{k}")

    for e in hypergraph.edges:
        y, z = namer.y(e), namer.z(e)
        model.add_row({y: 1.0, z: -rho_L}, ">=", 0.0, f"mc1_{e.name}")
        model.add_row({y: 1.0, z: -rho_U, rho: -1.0}, ">=", -rho_U, f"mc2_{e.name}")
        model.add_row({y: 1.0, z: -rho_L, rho: -1.0}, "<=", -rho_L, f"mc3_{e.name}")
        model.add_row({y: 1.0, z: -rho_U}, "<=", 0.0, f"mc4_{e.name}")

    model.meta["num_products"] = hypergraph.num_products
    model.meta["rho_bounds"] = (rho_L, rho_U)
    model.meta["hypergraph"] = hypergraph
    return model


def add_conic(model: ModelIR, hypergraph: Hypergraph) -> ModelIR:
    """
    Append rho (1 + sum v z) >= 1 and y_e (1 + sum v z) >= z_e^2 as rotated cones.

    Raises:
        NotBigM: If the model was not built by build_bigm
    """
    if model.kind != "bigm":
        raise NotBigM(f"Cone rows need a Big-M model, got a {model.kind} model")
    namer = VariableNamer()
    conic = model.copy()
    conic.kind = "conic"
    denominator = AffineExpr.of({namer.z(e): hypergraph.attraction(e) for e in hypergraph.edges}, 1.0)
    conic.add_cone(ConeRow(AffineExpr.of({namer.rho(): 1.0}), denominator, (AffineExpr.of({}, 1.0),), "cone_rho"))
    for e in hypergraph.edges:
        conic.add_cone(
            ConeRow(
                AffineExpr.of({namer.y(e): 1.0}),
                denominator,
                (AffineExpr.of({namer.z(e): 1.0}),),
                f"cone_{e.name}",
            )
        )
    return conic


# Objectives


def revenue_terms(hypergraph: Hypergraph, namer: VariableNamer, weight: float = 1.0) -> Dict[str, float]:
    """sum_e weight * r_e v_e y_e"""
    return {namer.y(e): weight * hypergraph.revenue(e) * hypergraph.attraction(e) for e in hypergraph.edges}


def set_assortment_objective(model: ModelIR, hypergraph: Hypergraph) -> ModelIR:
    """Maximize expected revenue sum_e r_e v_e y_e (in place, also returned)"""
    namer = model.blocks[0].namer if model.blocks else VariableNamer()
    model.set_objective(revenue_terms(hypergraph, namer), "max")
    return model


# Mixtures


def _segment_namers(count: int) -> List[VariableNamer]:
    if count == 1:
        return [VariableNamer()]
    return [VariableNamer(f"_s{k + 1}") for k in range(count)]


def _check_segments(hypergraphs: Sequence[Hypergraph]) -> int:
    if not hypergraphs:
        raise InvalidInput("At least one segment is required")
    sizes = {h.num_products for h in hypergraphs}
    if len(sizes) != 1:
        raise InvalidInput(f"Segments disagree on the number of products: {sorted(sizes)}")
    return sizes.pop()


def build_mixture(
    segments: Sequence[Tuple[Hypergraph, float]],
    X: Optional[ConstraintSet] = None,
    oracles: Optional[Sequence[Sequence[LinearInequality]]] = None,
) -> ModelIR:
    """
    Perspective blocks per segment over a shared x, maximizing the
    weighted expected revenue.

    Raises:
        WeightsNotSimplex: If the weights are negative or do not sum to 1
    """
    hypergraphs = [h for h, _ in segments]
    weights = np.array([w for _, w in segments], dtype=float)
    n = _check_segments(hypergraphs)
    if np.any(weights < -1e-12) or abs(weights.sum() - 1.0) > 1e-9:
        raise WeightsNotSimplex(f"Segment weights {weights.tolist()} are not in the simplex")

    model = ModelIR("mixture")
    _add_x_variables(model, hypergraphs[0], X)
    objective: Dict[str, float] = {}
    for k, (hypergraph, namer) in enumerate(zip(hypergraphs, _segment_namers(len(segments)))):
        tree, rmc = default_oracle(hypergraph)
        oracle = rmc if oracles is None else oracles[k]
        add_perspective_block(model, hypergraph, oracle, namer, tree)
        for var, c in revenue_terms(hypergraph, namer, float(weights[k])).items():
            objective[var] = objective.get(var, 0.0) + c
    model.set_objective(objective, "max")
    model.meta["num_products"] = n
    model.meta["weights"] = weights.tolist()
    if len(segments) == 1:
        model.kind = "perspective"
    return model


@dataclass
class UncertaintySet:
    """
    Polyhedron L = {w : B w >= d} of segment weights.

    The first num_segments columns of B are the weights lambda; any further
    columns are auxiliary variables. All of L, including the simplex and any
    sign constraints, must be written as rows of (B, d).
    """

    B: np.ndarray
    d: np.ndarray
    num_segments: int
    center: Optional[np.ndarray] = None
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.B = np.atleast_2d(np.asarray(self.B, dtype=float))
        self.d = np.asarray(self.d, dtype=float).ravel()
        if self.B.shape[0] != self.d.shape[0]:
            raise InvalidInput(f"B has {self.B.shape[0]} rows but d has {self.d.shape[0]} entries")
        if self.B.shape[1] < self.num_segments:
            raise InvalidInput("B has fewer columns than segments")
        if self.center is not None:
            self.center = np.asarray(self.center, dtype=float)

    @property
    def num_columns(self) -> int:
        return self.B.shape[1]

    @classmethod
    def singleton(cls, weights: Sequence[float]) -> "UncertaintySet":
        """L = {lambda_hat}"""
        lam = np.asarray(weights, dtype=float)
        k = len(lam)
        eye = np.eye(k)
        return cls(np.vstack([eye, -eye]), np.concatenate([lam, -lam]), k, lam, {"type": "singleton"})

    @classmethod
    def box_budget(
        cls,
        weights: Sequence[float],
        lower_factor: float = 0.95,
        upper_factor: float = 1.05,
        budget: float = 0.1,
    ) -> "UncertaintySet":
        """
        Box [lower_factor, upper_factor] * lambda_hat, intersected with
        sum |lambda - lambda_hat| <= budget and the simplex.

        Columns are [lambda, p, q] with lambda - lambda_hat = p - q, p, q >= 0.
        """
        lam = np.asarray(weights, dtype=float)
        k = len(lam)
        eye, zero = np.eye(k), np.zeros((k, k))
        ones, nothing = np.ones((1, k)), np.zeros((1, k))
        blocks = [
            (np.hstack([eye, zero, zero]), lower_factor * lam),
            (np.hstack([-eye, zero, zero]), -upper_factor * lam),
            (np.hstack([zero, eye, zero]), np.zeros(k)),
            (np.hstack([zero, zero, eye]), np.zeros(k)),
            # lambda - p + q == lambda_hat
            (np.hstack([eye, -eye, eye]), lam),
            (np.hstack([-eye, eye, -eye]), -lam),
            (np.hstack([nothing, -ones, -ones]), np.array([-budget])),
            (np.hstack([ones, nothing, nothing]), np.array([1.0])),
            (np.hstack([-ones, nothing, nothing]), np.array([-1.0])),
        ]
        B = np.vstack([b for b, _ in blocks])
        d = np.concatenate([r for _, r in blocks])
        meta = {"type": "box_budget", "lower_factor": lower_factor, "upper_factor": upper_factor, "budget": budget}
        return cls(B, d, k, lam, meta)

    def _model(self, objective: Optional[Sequence[float]] = None) -> ModelIR:
        model = ModelIR("uncertainty")
        names = [model.add_variable(f"w_{j}", -math.inf, math.inf) for j in range(self.num_columns)]
        for r in range(self.B.shape[0]):
            coeffs = {names[j]: self.B[r, j] for j in range(self.num_columns) if self.B[r, j] != 0.0}
            if coeffs:
                model.add_row(coeffs, ">=", self.d[r], f"L{r}")
            elif self.d[r] > 0:
                raise EmptyUncertainty(f"Row {r} of the uncertainty set reads 0 >= {self.d[r]}")
        if objective is not None:
            model.set_objective({names[k]: float(c) for k, c in enumerate(objective)}, "min")
        return model

    def is_empty(self, backend: Optional[SolverBackend] = None) -> bool:
        backend = backend or get_backend()
        try:
            model = self._model()
        except EmptyUncertainty:
            return True
        return backend.solve(model, SolveParams()).status == SolveStatus.INFEASIBLE

    def worst_case(
        self, segment_values: Sequence[float], backend: Optional[SolverBackend] = None
    ) -> Tuple[float, np.ndarray]:
        """
        min over lambda in L of sum_k values_k lambda_k.

        Raises:
            EmptyUncertainty: If L is empty
        """
        backend = backend or get_backend()
        model = self._model(segment_values)
        solution = backend.solve(model, SolveParams())
        if solution.status == SolveStatus.INFEASIBLE:
            raise EmptyUncertainty("Uncertainty set is empty")
        lam = np.array([solution.value(f"w_{k}") for k in range(self.num_segments)])
        return solution.objective, lam

    def to_dict(self) -> Dict[str, Any]:
        return {
            "B": self.B.tolist(),
            "d": self.d.tolist(),
            "num_segments": self.num_segments,
            "center": None if self.center is None else self.center.tolist(),
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "UncertaintySet":
        center = data.get("center")
        return cls(
            np.array(data["B"], dtype=float),
            np.array(data["d"], dtype=float),
            int(data["num_segments"]),
            None if center is None else np.array(center, dtype=float),
            dict(data.get("meta", {})),
        )


def _as_hypergraphs(segments: Sequence[Union[Hypergraph, Tuple[Hypergraph, float]]]) -> List[Hypergraph]:
    return [s if isinstance(s, Hypergraph) else s[0] for s in segments]


def build_robust(
    segments: Sequence[Union[Hypergraph, Tuple[Hypergraph, float]]],
    uncertainty: UncertaintySet,
    X: Optional[ConstraintSet] = None,
    backend: Optional[SolverBackend] = None,
    oracles: Optional[Sequence[Sequence[LinearInequality]]] = None,
) -> ModelIR:
    """
    Worst-case revenue over the weight polyhedron, through LP duality.

    The inner min over {w : B w >= d} of sum_k R_k lambda_k becomes
    max d.u subject to u >= 0, u.B[:, k] = R_k for weight columns and
    u.B[:, j] = 0 for auxiliary columns.

    Raises:
        EmptyUncertainty: If the weight polyhedron is empty
    """
    hypergraphs = _as_hypergraphs(segments)
    n = _check_segments(hypergraphs)
    if uncertainty.num_segments != len(hypergraphs):
        raise InvalidInput(
            f"Uncertainty set has {uncertainty.num_segments} weights for {len(hypergraphs)} segments"
        )
    if uncertainty.is_empty(backend):
        raise EmptyUncertainty("Uncertainty set is empty")

    model = ModelIR("robust")
    _add_x_variables(model, hypergraphs[0], X)
    namers = [VariableNamer(f"_s{k + 1}") for k in range(len(hypergraphs))]
    for k, (hypergraph, namer) in enumerate(zip(hypergraphs, namers)):
        tree, rmc = default_oracle(hypergraph)
        oracle = rmc if oracles is None else oracles[k]
        add_perspective_block(model, hypergraph, oracle, namer, tree)

    duals = [model.add_variable(f"dual_{j}", 0.0, math.inf) for j in range(uncertainty.B.shape[0])]
    for col in range(uncertainty.num_columns):
        coeffs: Dict[str, float] = {duals[j]: uncertainty.B[j, col] for j in range(len(duals))}
        if col < len(hypergraphs):
            for var, c in revenue_terms(hypergraphs[col], namers[col]).items():
                coeffs[var] = coeffs.get(var, 0.0) - c
        coeffs = {v: c for v, c in coeffs.items() if c != 0.0}
        if coeffs:
            model.add_row(coeffs, "==", 0.0, f"dualcol_{col}")
    model.set_objective({duals[j]: uncertainty.d[j] for j in range(len(duals))}, "max")
    model.meta["num_products"] = n
    Log.debug(f"Robust model with {len(hypergraphs)} segments and {len(duals)} dual variables")
    return model


def lp_relax(model: ModelIR) -> ModelIR:
    """Copy of the model with every binary variable made continuous in [0, 1]"""
    relaxed = model.copy()
    for var in relaxed.variables.values():
        if var.binary:
            var.binary = False
            var.lower = max(var.lower, 0.0)
            var.upper = min(var.upper, 1.0)
    return relaxed
