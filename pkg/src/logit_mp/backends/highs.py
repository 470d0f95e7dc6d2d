"""
HiGHS backend through scipy.optimize.milp.
"""

import math
import os
import tempfile
import time
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import coo_array

from ..constants import LP_DUMP_ENV_VAR
from ..errors import BackendFailure, ConeUnsupported
from ..log import Log
from ..model import ModelIR
from .base import Capabilities, SolveParams, Solution, SolverBackend, SolveStatus


class HighsBackend(SolverBackend):
    """LP and MIP solves with the HiGHS engine bundled in SciPy"""

    name = "highs"

    def capabilities(self) -> Capabilities:
        return Capabilities(mip=True, cones=False)

    def solve(self, model: ModelIR, params: Optional[SolveParams] = None) -> Solution:
        params = params or SolveParams()
        if model.cones:
            raise ConeUnsupported(f"Backend {self.name} cannot solve {len(model.cones)} cone rows")

        names = model.variable_names
        col = {name: k for k, name in enumerate(names)}
        n = len(names)
        sign = -1.0 if model.objective_sense == "max" else 1.0

        # Objective (milp always minimizes)
        c = np.zeros(n)
        for var, coef in model.objective.items():
            c[col[var]] = sign * coef

        lower = np.array([model.variables[v].lower for v in names])
        upper = np.array([model.variables[v].upper for v in names])
        integrality = np.array([1 if model.variables[v].binary else 0 for v in names])

        constraints = []
        if model.rows:
            data, rows, cols = [], [], []
            row_lb = np.full(len(model.rows), -np.inf)
            row_ub = np.full(len(model.rows), np.inf)
            for k, row in enumerate(model.rows):
                for var, coef in row.coeffs.items():
                    rows.append(k)
                    cols.append(col[var])
                    data.append(coef)
                if row.sense in ("<=", "=="):
                    row_ub[k] = row.rhs
                if row.sense in (">=", "=="):
                    row_lb[k] = row.rhs
            A = coo_array((data, (rows, cols)), shape=(len(model.rows), n)).tocsr()
            constraints.append(LinearConstraint(A, row_lb, row_ub))

        options = {
            "disp": False,
            "presolve": params.presolve,
            "time_limit": params.time_limit_s,
            "mip_rel_gap": params.rel_gap,
        }

        start = time.perf_counter()
        try:
            result = milp(
                c=c,
                constraints=constraints or None,
                bounds=Bounds(lower, upper),
                integrality=integrality,
                options=options,
            )
        except Exception as e:
            self._dump(model, "exception")
            raise BackendFailure(f"HiGHS raised: {e}")
        elapsed = time.perf_counter() - start

        status = self._status(result)
        solution = Solution(status=status, solve_time_s=elapsed)
        if status in (SolveStatus.INFEASIBLE, SolveStatus.UNBOUNDED, SolveStatus.TIME_LIMIT):
            self._dump(model, status.value)
            return solution

        x = np.asarray(result.x, dtype=float)
        objective = sign * float(result.fun) + model.objective_constant
        bound = getattr(result, "mip_dual_bound", None)
        if bound is None or not math.isfinite(bound) or not model.is_mip():
            best_bound = objective
        else:
            best_bound = sign * float(bound) + model.objective_constant
        if model.objective_sense == "max":
            best_bound = max(best_bound, objective)
        else:
            best_bound = min(best_bound, objective)

        solution.objective = objective
        solution.best_bound = best_bound
        solution.values = {name: float(x[k]) for k, name in enumerate(names)}
        solution.node_count = int(getattr(result, "mip_node_count", 0) or 0)
        return solution

    @staticmethod
    def _status(result) -> SolveStatus:
        if result.status == 0:
            return SolveStatus.OPTIMAL
        if result.status == 1:
            # Time or iteration limit
            return SolveStatus.FEASIBLE if result.x is not None else SolveStatus.TIME_LIMIT
        if result.status == 2:
            return SolveStatus.INFEASIBLE
        if result.status == 3:
            return SolveStatus.UNBOUNDED
        raise BackendFailure(f"HiGHS returned status {result.status}: {result.message}")

    def _dump(self, model: ModelIR, reason: str) -> None:
        """Write the model to $LOGIT_MP_DUMP_LP when that variable is set"""
        target = os.environ.get(LP_DUMP_ENV_VAR)
        if not target:
            return
        directory = Path(target)
        directory.mkdir(parents=True, exist_ok=True)
        fd, path = tempfile.mkstemp(prefix=f"{model.kind}-{reason}-", suffix=".lp", dir=directory)
        os.close(fd)
        model.write_lp(path)
        Log.warning(f"Solve ended with {reason}; model written to {path}")
