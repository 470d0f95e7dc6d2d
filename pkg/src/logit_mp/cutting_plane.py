"""
Cutting-plane driver: strengthen the LP relaxation with separated cuts, then
solve the MIP once with every cut kept.
"""

import math
import time
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Any, Dict, FrozenSet, List, Mapping, Optional, Sequence

from rich.table import Table

from .backends import SolveParams, Solution, SolverBackend, SolveStatus, get_backend
from .constants import (
    DEFAULT_EPS,
    DEFAULT_M_BAR,
    DEFAULT_MAX_ITERS,
    DEFAULT_SEP_TIME_LIMIT,
    FEASIBILITY_TOL,
    STALL_ITERATIONS,
)
from .errors import BackendFailure, InvalidInput
from .formulations import ConstraintSet, build_base_perspective, lp_relax, set_assortment_objective
from .hypergraph import Bundle, Hypergraph
from .log import Log
from .model import ModelIR, assortment_from_values
from .separation import (
    Cut,
    CutPool,
    FractionalPoint,
    build_ri_structures,
    separate_odd_cycle,
    separate_running_intersection,
    separate_x_bounds,
)


class Separator(str, Enum):
    X_BOUNDS = "xbounds"
    ODD_CYCLE = "odd"
    RUNNING_INTERSECTION = "ric"


ALL_SEPARATORS = frozenset(Separator)


@dataclass
class CutConfig:
    """
    Cutting-plane settings.

    Attributes:
        max_iters: Maximum number of LP rounds
        eps: Minimum violation for a cut to be added
        sep_time_limit_s: Budget of cumulative separation time
        separators: Enabled oracles, called in the order x-bounds, odd-cycle,
            running-intersection
        m_bar: Largest number of intersections per running-intersection cut
        stall_iterations: Rounds without LP progress before the loop stops
        cut_log: Optional file receiving one line per accepted cut
        workers: Threads used by running-intersection separation
    """

    max_iters: int = DEFAULT_MAX_ITERS
    eps: float = DEFAULT_EPS
    sep_time_limit_s: float = DEFAULT_SEP_TIME_LIMIT
    separators: FrozenSet[Separator] = ALL_SEPARATORS
    m_bar: int = DEFAULT_M_BAR
    stall_iterations: int = STALL_ITERATIONS
    cut_log: Optional[Path] = None
    workers: Optional[int] = None

    def __post_init__(self):
        self.separators = frozenset(Separator(s) for s in self.separators)
        if self.max_iters < 1:
            raise InvalidInput(f"max_iters must be >= 1, got {self.max_iters}")
        if not self.eps > FEASIBILITY_TOL:
            raise InvalidInput(f"eps must exceed the backend feasibility tolerance {FEASIBILITY_TOL}")
        if self.m_bar < 1:
            raise InvalidInput(f"m_bar must be >= 1, got {self.m_bar}")


@dataclass
class SolveReport:
    formulation: str
    status: str = SolveStatus.OPTIMAL.value
    lp_obj_initial: Optional[float] = None
    lp_obj_final: Optional[float] = None
    mip_obj: Optional[float] = None
    mip_bound: Optional[float] = None
    cuts_added: Dict[str, int] = field(default_factory=dict)
    iterations: int = 0
    sep_time_s: float = 0.0
    solve_time_s: float = 0.0
    time_s: float = 0.0
    node_count: int = 0
    stalled: bool = False
    assortment: List[int] = field(default_factory=list)

    @property
    def has_solution(self) -> bool:
        return self.mip_obj is not None

    @property
    def root_gap_pct(self) -> Optional[float]:
        """100 (lp_obj_final - mip_obj) / mip_obj, defined when mip_obj > 0"""
        if self.lp_obj_final is None or self.mip_obj is None or self.mip_obj <= 0:
            return None
        return 100.0 * (self.lp_obj_final - self.mip_obj) / self.mip_obj

    @property
    def gap_pct(self) -> Optional[float]:
        """100 (mip_bound - mip_obj) / mip_obj, defined when mip_obj > 0"""
        if self.mip_bound is None or self.mip_obj is None or self.mip_obj <= 0:
            return None
        return 100.0 * (self.mip_bound - self.mip_obj) / self.mip_obj

    @property
    def total_cuts(self) -> int:
        return sum(self.cuts_added.values())

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["root_gap_pct"] = self.root_gap_pct
        data["gap_pct"] = self.gap_pct
        return data

    def to_table(self) -> Table:
        return report_table([self], title=f"{self.formulation} solve")


def _fmt(value: Optional[float], digits: int = 2) -> str:
    return "-" if value is None or (isinstance(value, float) and math.isnan(value)) else f"{value:.{digits}f}"


def report_table(reports: Sequence[SolveReport], title: str = "Solve report") -> Table:
    """Aligned table with one row per report"""
    table = Table(title=title)
    table.add_column("Model", style="cyan")
    table.add_column("Status")
    table.add_column("Obj", justify="right", style="green")
    table.add_column("Time", justify="right")
    table.add_column("Gap%", justify="right")
    table.add_column("RGap%", justify="right", style="magenta")
    table.add_column("#node", justify="right")
    table.add_column("#cuts", justify="right")
    table.add_column("#iter", justify="right")
    for r in reports:
        table.add_row(
            r.formulation,
            r.status,
            _fmt(r.mip_obj, 6),
            _fmt(r.time_s),
            _fmt(r.gap_pct),
            _fmt(r.root_gap_pct),
            str(r.node_count),
            str(r.total_cuts),
            str(r.iterations),
        )
    return table


def _solve_or_fail(backend: SolverBackend, model: ModelIR, params: SolveParams, what: str) -> Solution:
    solution = backend.solve(model, params)
    if solution.status in (SolveStatus.INFEASIBLE, SolveStatus.UNBOUNDED):
        raise BackendFailure(f"{what} ended {solution.status.value}")
    return solution


def _finish_mip(report: SolveReport, model: ModelIR, solution: Solution) -> None:
    report.status = solution.status.value
    report.solve_time_s += solution.solve_time_s
    report.node_count = solution.node_count
    if solution.has_values:
        report.mip_obj = solution.objective
        report.mip_bound = solution.best_bound
        n = int(model.meta.get("num_products", 0))
        report.assortment = assortment_from_values(solution.values, n)


class CuttingPlaneSolver:
    """
    Separate-and-resolve loop over every perspective block of a model.

    Example:
        solver = CuttingPlaneSolver(CutConfig(eps=1e-6), get_backend())
        report = solver.solve(model)
    """

    def __init__(
        self,
        config: Optional[CutConfig] = None,
        backend: Optional[SolverBackend] = None,
        params: Optional[SolveParams] = None,
    ):
        self.config = config or CutConfig()
        self.backend = backend or get_backend()
        self.params = params or SolveParams()
        self.pool = CutPool(self.config.cut_log)

    def _separate(self, solution: Solution, model: ModelIR, structures: Mapping[str, list]) -> List[Cut]:
        cfg = self.config
        n = int(model.meta.get("num_products", 0))
        cuts: List[Cut] = []
        for block in model.blocks:
            point = FractionalPoint.from_values(solution.values, block.bundles, n, block.namer)
            if Separator.X_BOUNDS in cfg.separators:
                cuts.extend(separate_x_bounds(point, block.hypergraph, cfg.eps))
            if Separator.ODD_CYCLE in cfg.separators and any(len(e) == 2 for e in block.hypergraph.edges):
                cuts.extend(separate_odd_cycle(point, block.hypergraph, cfg.eps))
            if Separator.RUNNING_INTERSECTION in cfg.separators and structures.get(block.namer.tag):
                cuts.extend(
                    separate_running_intersection(point, structures[block.namer.tag], cfg.eps, cfg.workers)
                )
        return cuts

    def solve(self, model: ModelIR) -> SolveReport:
        """
        Run the cutting-plane loop on the LP relaxation, then solve the MIP
        with all accepted cuts.

        Raises:
            InvalidInput: If the model has no perspective blocks
            BackendFailure: If an LP relaxation is infeasible or unbounded
        """
        if not model.blocks:
            raise InvalidInput(f"A {model.kind} model has no perspective blocks to separate over")
        cfg = self.config
        started = time.perf_counter()
        report = SolveReport(formulation=model.kind)

        structures: Dict[str, list] = {}
        if Separator.RUNNING_INTERSECTION in cfg.separators:
            for block in model.blocks:
                built = [s for s in build_ri_structures(block.hypergraph, cfg.m_bar) if s.orderings]
                structures[block.namer.tag] = built

        lp = lp_relax(model)
        previous = math.inf
        stalled_rounds = 0
        added_last = False
        solution: Optional[Solution] = None
        for k in range(1, cfg.max_iters + 1):
            solution = _solve_or_fail(self.backend, lp, self.params, "LP relaxation")
            report.solve_time_s += solution.solve_time_s
            report.iterations = k
            if report.lp_obj_initial is None:
                report.lp_obj_initial = solution.objective
            report.lp_obj_final = solution.objective
            Log.event("lp_solved", {"iteration": k, "objective": solution.objective})

            if solution.objective >= previous - 1e-9:
                stalled_rounds += 1
            else:
                stalled_rounds = 0
            previous = solution.objective
            if stalled_rounds >= cfg.stall_iterations:
                Log.warning(f"LP objective unchanged for {stalled_rounds} rounds; stopping separation")
                report.stalled = True
                added_last = False
                break

            sep_start = time.perf_counter()
            cuts = self._separate(solution, lp, structures)
            report.sep_time_s += time.perf_counter() - sep_start

            new = self.pool.extend(replace(cut, iteration=k) for cut in cuts)
            added_last = bool(new)
            if not new:
                break
            for j, cut in enumerate(new):
                lp.add_inequality(cut.inequality, f"cut{k}_{j}")
            Log.event("cuts_added", {"iteration": k, "count": len(new)})
            if report.sep_time_s > cfg.sep_time_limit_s:
                Log.info(f"Separation time budget of {cfg.sep_time_limit_s}s used up")
                break

        if added_last:
            # Bring the reported LP value up to date with the last round of cuts
            solution = _solve_or_fail(self.backend, lp, self.params, "LP relaxation")
            report.solve_time_s += solution.solve_time_s
            report.lp_obj_final = solution.objective

        report.cuts_added = self.pool.counts()
        mip = model.copy()
        for j, cut in enumerate(self.pool):
            mip.add_inequality(cut.inequality, f"cut_{j}")
        final = self.backend.solve(mip, self.params)
        _finish_mip(report, mip, final)
        report.time_s = time.perf_counter() - started
        Log.event("mip_solved", {"status": report.status, "objective": report.mip_obj, "nodes": report.node_count})
        return report


def solve_direct(
    model: ModelIR,
    backend: Optional[SolverBackend] = None,
    params: Optional[SolveParams] = None,
) -> SolveReport:
    """Solve the LP relaxation (for the root gap) and then the MIP, without cuts"""
    backend = backend or get_backend()
    params = params or SolveParams()
    started = time.perf_counter()
    report = SolveReport(formulation=model.kind)
    relaxed = _solve_or_fail(backend, lp_relax(model), params, "LP relaxation")
    report.lp_obj_initial = report.lp_obj_final = relaxed.objective
    report.solve_time_s = relaxed.solve_time_s
    report.iterations = 1
    _finish_mip(report, model, backend.solve(model, params))
    report.time_s = time.perf_counter() - started
    Log.event("mip_solved", {"status": report.status, "objective": report.mip_obj, "nodes": report.node_count})
    return report


def solve_with_cuts(
    hypergraph: Hypergraph,
    X: Optional[ConstraintSet] = None,
    revenues: Optional[Mapping[Bundle, float]] = None,
    config: Optional[CutConfig] = None,
    backend: Optional[SolverBackend] = None,
    params: Optional[SolveParams] = None,
) -> SolveReport:
    """
    Build the perspective model for one segment and run the cutting-plane loop.

    Args:
        hypergraph: The Logit-MP model
        X: Operational constraints
        revenues: Optional revenue overrides per bundle
        config: Cutting-plane settings
        backend: Solver backend (default from the environment)
        params: Solver settings
    """
    if revenues:
        hypergraph = hypergraph.with_values(revenues=dict(revenues))
    model = build_base_perspective(hypergraph, X=X)
    set_assortment_objective(model, hypergraph)
    return CuttingPlaneSolver(config, backend, params).solve(model)
