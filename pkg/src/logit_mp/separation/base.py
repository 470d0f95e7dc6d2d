"""
Shared types for the separation oracles: fractional points, cuts and the cut pool.
"""

import threading
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence

import numpy as np

from ..errors import InvalidInput
from ..hypergraph import Bundle
from ..model import VariableNamer
from ..relaxation import LinearInequality


class CutFamily(str, Enum):
    X_LOWER = "XLower"
    X_UPPER = "XUpper"
    ODD_CYCLE = "OddCycle"
    RUNNING_INTERSECTION = "RunningIntersection"


@dataclass
class FractionalPoint:
    """
    A candidate (rho, y, x) taken from an LP solution.

    y_hat must cover every bundle the model created; x_hat[i - 1] is the
    value of x_i. The namer maps the point back to model variable names.
    """

    rho_hat: float
    y_hat: Dict[Bundle, float]
    x_hat: np.ndarray
    namer: VariableNamer = field(default_factory=VariableNamer)

    def __post_init__(self):
        self.x_hat = np.asarray(self.x_hat, dtype=float)
        values = [self.rho_hat, *self.y_hat.values(), *self.x_hat.tolist()]
        if not np.all(np.isfinite(values)):
            raise InvalidInput("Fractional point has non-finite entries")

    @classmethod
    def from_values(
        cls,
        values: Mapping[str, float],
        bundles: Sequence[Bundle],
        num_products: int,
        namer: Optional[VariableNamer] = None,
    ) -> "FractionalPoint":
        """Read a point off a solution's variable values"""
        namer = namer or VariableNamer()
        return cls(
            rho_hat=values.get(namer.rho(), 0.0),
            y_hat={e: values.get(namer.y(e), 0.0) for e in bundles},
            x_hat=np.array([values.get(namer.x(i), 0.0) for i in range(1, num_products + 1)]),
            namer=namer,
        )

    @property
    def num_products(self) -> int:
        return len(self.x_hat)

    def y(self, bundle: Bundle) -> float:
        try:
            return self.y_hat[bundle]
        except KeyError:
            raise InvalidInput(f"Point has no y value for bundle {bundle}")

    def x(self, item: int) -> float:
        return float(self.x_hat[item - 1])

    def values(self) -> Dict[str, float]:
        """The point keyed by model variable names"""
        out = {self.namer.rho(): self.rho_hat}
        for e, val in self.y_hat.items():
            out[self.namer.y(e)] = val
        for i in range(1, self.num_products + 1):
            out[self.namer.x(i)] = self.x(i)
        return out

    def inequality(self, terms: Mapping[Hashable, float], sense: str = "<=", rhs: float = 0.0) -> LinearInequality:
        """
        Build a row from symbolic terms: "rho", a Bundle for y_e, an int for x_i.
        Coefficients of repeated variables are added up.
        """
        coeffs: Dict[str, float] = {}
        for key, c in terms.items():
            if key == "rho":
                name = self.namer.rho()
            elif isinstance(key, Bundle):
                name = self.namer.y(key)
            else:
                name = self.namer.x(int(key))
            coeffs[name] = coeffs.get(name, 0.0) + c
        return LinearInequality(coeffs, sense, rhs)


@dataclass(frozen=True)
class Cut:
    inequality: LinearInequality
    family: CutFamily
    violation: float
    source: str = ""
    iteration: int = 0

    def log_line(self) -> str:
        return f"{self.family.value}\t{self.violation:.6e}\t{self.iteration}\t{self.inequality.render()}"


def make_cut(point: FractionalPoint, row: LinearInequality, family: CutFamily, source: str = "") -> Cut:
    """Wrap a row as a cut, recording its violation at the point"""
    return Cut(row, family, row.violation(point.values()), source)


class CutPool:
    """
    Cuts accepted so far, deduplicated by normalized coefficients.

    The pool is the only state shared between oracles and is guarded by a
    lock. When log_path is given, every accepted cut is appended to it as one
    tab-separated line: family, violation, iteration, inequality.
    """

    def __init__(self, log_path: Optional[Path] = None):
        self._seen: set = set()
        self._cuts: List[Cut] = []
        self._counts: Counter = Counter()
        self._lock = threading.Lock()
        self._log_path = Path(log_path) if log_path else None

    def add(self, cut: Cut) -> bool:
        key = cut.inequality.normalized_key()
        with self._lock:
            if key in self._seen:
                return False
            self._seen.add(key)
            self._cuts.append(cut)
            self._counts[cut.family] += 1
            if self._log_path is not None:
                with self._log_path.open("a") as fh:
                    fh.write(cut.log_line() + "\n")
        return True

    def extend(self, cuts: Iterable[Cut]) -> List[Cut]:
        """Add cuts and return the ones that were new"""
        return [cut for cut in cuts if self.add(cut)]

    def __len__(self) -> int:
        return len(self._cuts)

    def __iter__(self):
        return iter(list(self._cuts))

    def __contains__(self, cut: Cut) -> bool:
        return cut.inequality.normalized_key() in self._seen

    def counts(self) -> Dict[str, int]:
        return {family.value: self._counts.get(family, 0) for family in CutFamily}


def dedupe(cuts: Iterable[Cut]) -> List[Cut]:
    """Drop cuts whose normalized rows repeat, keeping the first"""
    seen = set()
    out = []
    for cut in cuts:
        key = cut.inequality.normalized_key()
        if key not in seen:
            seen.add(key)
            out.append(cut)
    return out
