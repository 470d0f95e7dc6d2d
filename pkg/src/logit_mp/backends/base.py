"""
Backend contract: every LP/MIP/conic solve goes through SolverBackend.
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional

from ..constants import DEFAULT_REL_GAP, DEFAULT_TIME_LIMIT, FEASIBILITY_TOL
from ..errors import InvalidInput
from ..model import ModelIR


class SolveStatus(str, Enum):
    OPTIMAL = "Optimal"
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    TIME_LIMIT = "TimeLimit"


@dataclass
class SolveParams:
    """
    Solver settings.

    Attributes:
        time_limit_s: Wall-clock limit per solve, in seconds
        rel_gap: Relative MIP optimality gap at which the solve stops
        threads: Requested worker threads (backends may ignore it)
        presolve: Whether the backend may presolve the model
        seed: Random seed for backends that take one (HiGHS through scipy
            is deterministic and ignores it)
    """

    time_limit_s: float = DEFAULT_TIME_LIMIT
    rel_gap: float = DEFAULT_REL_GAP
    threads: int = 1
    presolve: bool = True
    seed: int = 0

    def __post_init__(self):
        if not self.time_limit_s > 0:
            raise InvalidInput(f"time_limit_s must be positive, got {self.time_limit_s}")
        if not 0 <= self.rel_gap < 1:
            raise InvalidInput(f"rel_gap must lie in [0, 1), got {self.rel_gap}")
        if self.threads < 1:
            raise InvalidInput(f"threads must be >= 1, got {self.threads}")


@dataclass
class Solution:
    status: SolveStatus
    objective: float = math.nan
    best_bound: float = math.nan
    values: Dict[str, float] = field(default_factory=dict)
    node_count: int = 0
    solve_time_s: float = 0.0

    @property
    def has_values(self) -> bool:
        return self.status in (SolveStatus.OPTIMAL, SolveStatus.FEASIBLE)

    def value(self, name: str, default: float = 0.0) -> float:
        return self.values.get(name, default)


@dataclass(frozen=True)
class Capabilities:
    mip: bool
    cones: bool


class SolverBackend(ABC):
    """
    Abstract LP/MIP solver. One instance per concurrent solve.
    """

    name = "abstract"

    #: Primal feasibility tolerance; separation eps must stay above it
    feasibility_tolerance = FEASIBILITY_TOL

    @abstractmethod
    def capabilities(self) -> Capabilities:
        """Fixed capability record of this backend"""

    @abstractmethod
    def solve(self, model: ModelIR, params: Optional[SolveParams] = None) -> Solution:
        """
        Solve a model.

        Raises:
            ConeUnsupported: If the model has cone rows and the backend cannot handle them
            BackendFailure: If the engine fails for any other reason
        """
