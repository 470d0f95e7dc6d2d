"""
Solver-agnostic model representation.

A ModelIR is a flat list of named variables, linear rows, optional rotated
cone rows and an objective. Formulation builders produce ModelIRs; backends
consume them.
"""

import copy
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import InvalidInput
from .hypergraph import Bundle, Hypergraph
from .relaxation import SENSES, LinearInequality, RmcTree


@dataclass
class Variable:
    name: str
    lower: float = 0.0
    upper: float = math.inf
    binary: bool = False


@dataclass
class LinearRow:
    coeffs: Dict[str, float]
    sense: str
    rhs: float
    name: str = ""


@dataclass(frozen=True)
class AffineExpr:
    """sum(coeffs[v] * v) + constant"""

    coeffs: Tuple[Tuple[str, float], ...] = ()
    constant: float = 0.0

    @classmethod
    def of(cls, coeffs: Mapping[str, float], constant: float = 0.0) -> "AffineExpr":
        return cls(tuple(sorted(coeffs.items())), float(constant))

    def evaluate(self, values: Mapping[str, float]) -> float:
        return self.constant + sum(c * values.get(v, 0.0) for v, c in self.coeffs)

    def variables(self) -> List[str]:
        return [v for v, _ in self.coeffs]


@dataclass(frozen=True)
class ConeRow:
    """Rotated second-order cone row: left * right >= sum of squares"""

    left: AffineExpr
    right: AffineExpr
    squares: Tuple[AffineExpr, ...]
    name: str = ""

    def violation(self, values: Mapping[str, float]) -> float:
        lhs = self.left.evaluate(values) * self.right.evaluate(values)
        rhs = sum(s.evaluate(values) ** 2 for s in self.squares)
        return rhs - lhs


@dataclass(frozen=True)
class VariableNamer:
    """
    Variable names for one perspective block.

    The tag distinguishes customer segments ("_s1"); x variables are shared
    across blocks and never tagged.
    """

    tag: str = ""

    def rho(self) -> str:
        return f"rho{self.tag}"

    def y(self, bundle: Bundle) -> str:
        return f"y{self.tag}_{bundle.name}"

    def z(self, bundle: Bundle) -> str:
        # Singleton z variables are the assortment indicators
        if bundle.is_singleton():
            return self.x(bundle.items[0])
        return f"z{self.tag}_{bundle.name}"

    @staticmethod
    def x(item: int) -> str:
        return f"x_{item}"


@dataclass
class PerspectiveBlock:
    """Metadata of one (rho, y) block, used by the cutting-plane driver"""

    hypergraph: Hypergraph
    namer: VariableNamer
    tree: RmcTree
    bundles: Tuple[Bundle, ...]


class ModelIR:
    """
    A linear (optionally conic) model with named variables.

    Example:
        model = ModelIR()
        model.add_variable("y", 0.0, math.inf)
        model.add_row({"y": 1.0}, "<=", 0.3)
        model.set_objective({"y": 1.0}, "max")
    """

    def __init__(self, kind: str = "generic"):
        self.kind = kind
        self.variables: Dict[str, Variable] = {}
        self.rows: List[LinearRow] = []
        self.cones: List[ConeRow] = []
        self.objective: Dict[str, float] = {}
        self.objective_sense = "max"
        self.objective_constant = 0.0
        self.blocks: List[PerspectiveBlock] = []
        self.meta: Dict[str, object] = {}

    # Building

    def add_variable(
        self, name: str, lower: float = 0.0, upper: float = math.inf, binary: bool = False
    ) -> str:
        if name in self.variables:
            raise InvalidInput(f"Variable {name} declared twice")
        if lower > upper:
            raise InvalidInput(f"Variable {name} has lower bound {lower} > upper bound {upper}")
        self.variables[name] = Variable(name, float(lower), float(upper), binary)
        return name

    def has_variable(self, name: str) -> bool:
        return name in self.variables

    def add_row(
        self, coeffs: Mapping[str, float], sense: str, rhs: float, name: str = ""
    ) -> LinearRow:
        if sense not in SENSES:
            raise InvalidInput(f"Unknown sense {sense!r}")
        merged: Dict[str, float] = {}
        for var, c in coeffs.items():
            if var not in self.variables:
                raise InvalidInput(f"Row {name or len(self.rows)} references undeclared variable {var}")
            merged[var] = merged.get(var, 0.0) + float(c)
        merged = {v: c for v, c in merged.items() if c != 0.0}
        row = LinearRow(merged, sense, float(rhs), name or f"c{len(self.rows)}")
        self.rows.append(row)
        return row

    def add_inequality(self, inequality: LinearInequality, name: str = "") -> LinearRow:
        """Add a LinearInequality whose keys are variable names"""
        return self.add_row({str(k): c for k, c in inequality.coeffs.items()}, inequality.sense, inequality.rhs, name)

    def add_cone(self, cone: ConeRow) -> None:
        for expr in (cone.left, cone.right, *cone.squares):
            for var in expr.variables():
                if var not in self.variables:
                    raise InvalidInput(f"Cone row references undeclared variable {var}")
        self.cones.append(cone)

    def set_objective(self, coeffs: Mapping[str, float], sense: str = "max", constant: float = 0.0) -> None:
        if sense not in ("max", "min"):
            raise InvalidInput(f"Objective sense must be 'max' or 'min', got {sense!r}")
        for var in coeffs:
            if var not in self.variables:
                raise InvalidInput(f"Objective references undeclared variable {var}")
        self.objective = {v: float(c) for v, c in coeffs.items() if c != 0.0}
        self.objective_sense = sense
        self.objective_constant = float(constant)

    # Queries

    @property
    def variable_names(self) -> List[str]:
        return list(self.variables)

    def binaries(self) -> List[str]:
        return [v.name for v in self.variables.values() if v.binary]

    def is_mip(self) -> bool:
        return any(v.binary for v in self.variables.values())

    def objective_value(self, values: Mapping[str, float]) -> float:
        return self.objective_constant + sum(c * values.get(v, 0.0) for v, c in self.objective.items())

    def max_violation(self, values: Mapping[str, float]) -> float:
        """Largest row or bound violation at the given values"""
        worst = 0.0
        for var in self.variables.values():
            val = values.get(var.name, 0.0)
            worst = max(worst, var.lower - val, val - var.upper)
        for row in self.rows:
            lhs = sum(c * values.get(v, 0.0) for v, c in row.coeffs.items())
            if row.sense == "<=":
                worst = max(worst, lhs - row.rhs)
            elif row.sense == ">=":
                worst = max(worst, row.rhs - lhs)
            else:
                worst = max(worst, abs(lhs - row.rhs))
        for cone in self.cones:
            worst = max(worst, cone.violation(values))
        return worst

    def copy(self) -> "ModelIR":
        clone = ModelIR(self.kind)
        clone.variables = {k: copy.copy(v) for k, v in self.variables.items()}
        clone.rows = [LinearRow(dict(r.coeffs), r.sense, r.rhs, r.name) for r in self.rows]
        clone.cones = list(self.cones)
        clone.objective = dict(self.objective)
        clone.objective_sense = self.objective_sense
        clone.objective_constant = self.objective_constant
        clone.blocks = list(self.blocks)
        clone.meta = dict(self.meta)
        return clone

    def __repr__(self) -> str:
        return (
            f"ModelIR(kind={self.kind}, vars={len(self.variables)}, rows={len(self.rows)}, "
            f"cones={len(self.cones)}, binaries={len(self.binaries())})"
        )

    # Export

    def to_lp_string(self) -> str:
        """The model in CPLEX LP file syntax; cone rows are written as comments"""
        lines = ["\\ logit-mp model: " + self.kind]
        lines.append("Maximize" if self.objective_sense == "max" else "Minimize")
        objective = _format_terms(self.objective.items()) or "0 " + next(iter(self.variables), "dummy")
        if self.objective_constant:
            objective += f" + {self.objective_constant:.12g}"
        lines.append(f" obj: {objective}")
        lines.append("Subject To")
        for row in self.rows:
            sense = "=" if row.sense == "==" else row.sense
            lines.append(f" {row.name}: {_format_terms(row.coeffs.items())} {sense} {row.rhs:.12g}")
        for k, cone in enumerate(self.cones):
            lines.append(f"\\ cone{k}: ({_format_affine(cone.left)}) * ({_format_affine(cone.right)})"
                         f" >= {' + '.join('(' + _format_affine(s) + ')^2' for s in cone.squares)}")
        lines.append("Bounds")
        for var in self.variables.values():
            lower = "-inf" if math.isinf(var.lower) else f"{var.lower:.12g}"
            upper = "+inf" if math.isinf(var.upper) else f"{var.upper:.12g}"
            lines.append(f" {lower} <= {var.name} <= {upper}")
        binaries = self.binaries()
        if binaries:
            lines.append("Binaries")
            lines.append(" " + " ".join(binaries))
        lines.append("End")
        return "\n".join(lines) + "\n"

    def write_lp(self, path) -> Path:
        path = Path(path)
        path.write_text(self.to_lp_string())
        return path


def _format_terms(terms: Iterable[Tuple[Hashable, float]]) -> str:
    parts = []
    for var, c in terms:
        sign = "-" if c < 0 else "+"
        parts.append(f"{sign} {abs(c):.12g} {var}")
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else text


def _format_affine(expr: AffineExpr) -> str:
    text = _format_terms(expr.coeffs)
    if expr.constant or not text:
        text = f"{text} + {expr.constant:.12g}" if text else f"{expr.constant:.12g}"
    return text


def assortment_from_values(values: Mapping[str, float], num_products: int) -> List[int]:
    """Items whose x variable rounds to 1"""
    return [i for i in range(1, num_products + 1) if values.get(VariableNamer.x(i), 0.0) > 0.5]


def block_values(
    values: Mapping[str, float], namer: VariableNamer, bundles: Sequence[Bundle]
) -> Tuple[float, Dict[Bundle, float]]:
    """(rho, y by bundle) of one perspective block"""
    return values.get(namer.rho(), 0.0), {e: values.get(namer.y(e), 0.0) for e in bundles}


def find_block(model: ModelIR, tag: str = "") -> Optional[PerspectiveBlock]:
    for block in model.blocks:
        if block.namer.tag == tag:
            return block
    return None
