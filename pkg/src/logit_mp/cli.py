"""
Command-line front end: logit-mp generate | solve | compare | bench | estimate.

Exit codes:
    0  success
    1  solver backend or estimation failure (including ConeUnsupported)
    2  usage, input or schema error
    3  time limit reached without a feasible solution
"""

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple

from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from .backends import SolveParams, SolverBackend, SolveStatus, get_backend
from .constants import DEFAULT_REL_GAP, DEFAULT_TIME_LIMIT
from .cutting_plane import CutConfig, CuttingPlaneSolver, Separator, SolveReport, report_table, solve_direct
from .errors import BackendError, ConeUnsupported, EstimationError, InvalidInput, LogitMPError
from .estimation import TransactionData, build_candidate_hypergraph, cross_validate, fit_mle, restrict_to_offered
from .formulations import (
    ConstraintSet,
    add_conic,
    build_base_perspective,
    build_bigm,
    build_mixture,
    build_robust,
    set_assortment_objective,
)
from .instances import GenSpec, Instance
from .log import Log
from .model import ModelIR

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_NO_SOLUTION = 3

FORMULATIONS = ("pers", "bigm", "conic")
CUT_TOKENS = {"rmc": None, "xbounds": Separator.X_BOUNDS, "odd": Separator.ODD_CYCLE, "ric": Separator.RUNNING_INTERSECTION}

# Slack on the perspective-vs-Big-M LP bound comparison
BOUND_ORDER_TOL = 1e-8

console = Console()


@dataclass
class CliConfig:
    command: str
    paths: List[Path] = field(default_factory=list)
    formulation: str = "pers"
    cuts: Optional[FrozenSet[Separator]] = None
    time_limit: float = DEFAULT_TIME_LIMIT
    gap: float = DEFAULT_REL_GAP
    out: Optional[Path] = None
    seeds: List[int] = field(default_factory=list)
    folds: int = 5

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "CliConfig":
        seed = getattr(args, "seed", None)
        config = cls(
            command=args.command,
            paths=[Path(p) for p in getattr(args, "instances", [])],
            formulation=getattr(args, "formulation", "pers"),
            cuts=parse_cuts(getattr(args, "cuts", None)),
            time_limit=getattr(args, "time_limit", DEFAULT_TIME_LIMIT),
            gap=getattr(args, "gap", DEFAULT_REL_GAP),
            out=Path(args.out) if getattr(args, "out", None) else None,
            seeds=list(seed) if isinstance(seed, list) else ([] if seed is None else [seed]),
            folds=getattr(args, "folds", 5),
        )
        if config.formulation not in FORMULATIONS:
            raise InvalidInput(f"Unknown formulation {config.formulation!r}")
        if config.cuts is not None and config.formulation != "pers":
            raise InvalidInput("--cuts applies to the pers formulation only")
        return config

    @property
    def seed(self) -> Optional[int]:
        """First seed given, None when the command was run unseeded"""
        return self.seeds[0] if self.seeds else None

    @property
    def params(self) -> SolveParams:
        return SolveParams(time_limit_s=self.time_limit, rel_gap=self.gap, seed=self.seed or 0)


def parse_cuts(text: Optional[str]) -> Optional[FrozenSet[Separator]]:
    """'rmc,odd' -> {ODD_CYCLE}; rmc rows are always part of the model"""
    if text is None:
        return None
    tokens = [t.strip().lower() for t in text.split(",") if t.strip()]
    unknown = [t for t in tokens if t not in CUT_TOKENS]
    if unknown:
        raise InvalidInput(f"Unknown cut families {unknown}; choose from {sorted(CUT_TOKENS)}")
    return frozenset(CUT_TOKENS[t] for t in tokens if CUT_TOKENS[t] is not None)


def default_cuts(instance: Instance) -> FrozenSet[Separator]:
    """x-bounds always, odd-cycle with pair bundles, running-intersection from rank 3"""
    cuts = {Separator.X_BOUNDS}
    if any(len(e) == 2 for h in instance.segments for e in h.edges):
        cuts.add(Separator.ODD_CYCLE)
    if max(h.rank() for h in instance.segments) >= 3:
        cuts.add(Separator.RUNNING_INTERSECTION)
    return frozenset(cuts)


def _write_json(path: Path, payload: Dict[str, Any]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, default=str))


# Solving


def build_model(instance: Instance, formulation: str) -> ModelIR:
    """The requested formulation of an instance, objective set"""
    X = instance.constraints
    if instance.uncertainty is not None:
        if formulation != "pers":
            raise InvalidInput("Robust instances are solved with the pers formulation only")
        return build_robust(instance.segments, instance.uncertainty, X)
    if instance.is_mixture:
        if formulation != "pers":
            raise InvalidInput("Mixture instances are solved with the pers formulation only")
        return build_mixture(list(zip(instance.segments, instance.segment_weights)), X)

    hypergraph = instance.hypergraph
    if formulation == "pers":
        model = build_base_perspective(hypergraph, X=X)
    else:
        model = build_bigm(hypergraph, X=X)
    set_assortment_objective(model, hypergraph)
    if formulation == "conic":
        model = add_conic(model, hypergraph)
    return model


def run_solve(
    instance: Instance,
    formulation: str,
    backend: SolverBackend,
    params: SolveParams,
    cuts: Optional[FrozenSet[Separator]] = None,
) -> SolveReport:
    if formulation == "conic" and not backend.capabilities().cones:
        raise ConeUnsupported(f"Backend {backend.name} cannot solve cone rows")
    model = build_model(instance, formulation)
    if formulation == "pers":
        separators = default_cuts(instance) if cuts is None else cuts
        report = CuttingPlaneSolver(CutConfig(separators=separators), backend, params).solve(model)
    else:
        report = solve_direct(model, backend, params)
    report.formulation = formulation
    return report


def cmd_generate(config: CliConfig, args: argparse.Namespace) -> int:
    if config.out is None:
        raise InvalidInput("--out is required")
    spec = GenSpec(n=args.n, d=args.d, theta=args.theta, pi=args.pi, k=args.k, seed=config.seed)
    instance = Instance.generate(spec, robust=args.robust)
    instance.save(config.out)

    table = Table(title=f"Instance {config.out}")
    table.add_column("Field", style="cyan")
    table.add_column("Value", justify="right", style="green")
    table.add_row("N", str(instance.num_products))
    table.add_row("segments", str(len(instance.segments)))
    table.add_row("|E|", " / ".join(str(len(h)) for h in instance.segments))
    table.add_row("d", str(spec.d))
    table.add_row("theta", f"{spec.theta:g}")
    table.add_row("pi", f"{spec.pi:g}")
    table.add_row("robust", str(instance.uncertainty is not None))
    console.print(table)
    return EXIT_OK


def cmd_solve(config: CliConfig, args: argparse.Namespace) -> int:
    backend = get_backend()
    code = EXIT_OK
    reports = []
    for path in config.paths:
        report = run_solve(Instance.load(path), config.formulation, backend, config.params, config.cuts)
        reports.append(report)
        if report.status == SolveStatus.TIME_LIMIT.value and not report.has_solution:
            code = EXIT_NO_SOLUTION
    console.print(report_table(reports, title="Solve report"))
    if config.out is not None:
        payload = {str(p): r.to_dict() for p, r in zip(config.paths, reports)}
        _write_json(config.out, payload if len(reports) > 1 else reports[0].to_dict())
    return code


def _mean(values: Sequence[Optional[float]]) -> Optional[float]:
    kept = [v for v in values if v is not None and not math.isnan(v)]
    return sum(kept) / len(kept) if kept else None


def aggregate(results: Dict[str, List[SolveReport]]) -> Dict[str, Dict[str, Optional[float]]]:
    """Per-formulation #sol plus Time, Gap%, RGap% and #node averaged over instances"""
    summary: Dict[str, Dict[str, Optional[float]]] = {}
    for formulation, reports in results.items():
        summary[formulation] = {
            "solved": float(sum(r.status == SolveStatus.OPTIMAL.value for r in reports)),
            "instances": float(len(reports)),
            "time_s": _mean([r.time_s for r in reports]),
            "gap_pct": _mean([r.gap_pct for r in reports]),
            "root_gap_pct": _mean([r.root_gap_pct for r in reports]),
            "node_count": _mean([float(r.node_count) for r in reports]),
        }
    return summary


def summary_table(results: Dict[str, List[SolveReport]], title: str = "Formulation comparison") -> Table:
    table = Table(title=title)
    table.add_column("Model", style="cyan")
    for name in ("#sol", "Time", "Gap%", "RGap%", "#node"):
        table.add_column(name, justify="right", style="green")
    for formulation, row in aggregate(results).items():
        cells = [row["time_s"], row["gap_pct"], row["root_gap_pct"], row["node_count"]]
        solved = f"{int(row['solved'] or 0)}/{int(row['instances'] or 0)}"
        table.add_row(formulation, solved, *("-" if c is None else f"{c:.1f}" for c in cells))
    return table


def bound_order_violations(results: Dict[str, List[SolveReport]], labels: Sequence[Any]) -> List[str]:
    """Instances where the perspective root LP exceeds the Big-M root LP"""
    if "pers" not in results or "bigm" not in results:
        return []
    flagged = []
    for label, pers, bigm in zip(labels, results["pers"], results["bigm"]):
        if pers.lp_obj_initial is None or bigm.lp_obj_initial is None:
            continue
        if pers.lp_obj_initial > bigm.lp_obj_initial + BOUND_ORDER_TOL:
            flagged.append(str(label))
    return flagged


def _solve_grid(
    instances: Sequence[Instance], formulations: Sequence[str], backend: SolverBackend, config: CliConfig
) -> Tuple[Dict[str, List[SolveReport]], int]:
    """Every formulation on every instance, reports ordered by instance"""
    results: Dict[str, List[SolveReport]] = {f: [] for f in formulations}
    code = EXIT_OK
    for instance in instances:
        for formulation in formulations:
            report = run_solve(instance, formulation, backend, config.params, config.cuts)
            results[formulation].append(report)
            if report.status == SolveStatus.TIME_LIMIT.value and not report.has_solution:
                code = EXIT_NO_SOLUTION
    return results, code


def _formulations_for(backend: SolverBackend) -> List[str]:
    return ["pers", "bigm"] + (["conic"] if backend.capabilities().cones else [])


def cmd_compare(config: CliConfig, args: argparse.Namespace) -> int:
    backend = get_backend()
    instances = [Instance.load(p) for p in config.paths]
    if any(i.is_mixture for i in instances):
        raise InvalidInput("compare runs on single-segment instances")

    results, code = _solve_grid(instances, _formulations_for(backend), backend, config)
    console.print(summary_table(results))
    violations = bound_order_violations(results, config.paths)
    for path in violations:
        Log.warning(f"{path}: perspective root LP bound is weaker than Big-M")
    if config.out is not None:
        _write_json(
            config.out,
            {
                "instances": [str(p) for p in config.paths],
                "reports": {f: [r.to_dict() for r in rs] for f, rs in results.items()},
                "bound_order_violations": violations,
            },
        )
    return code


def cmd_bench(config: CliConfig, args: argparse.Namespace) -> int:
    """
    Generate one instance per seed and aggregate the formulation metrics.

    Mixtures and robust instances run the pers formulation only.
    """
    backend = get_backend()
    specs = [GenSpec(n=args.n, d=args.d, theta=args.theta, pi=args.pi, k=args.k, seed=s) for s in config.seeds]
    instances = [Instance.generate(spec, robust=args.robust) for spec in specs]
    formulations = ["pers"] if args.k > 1 else _formulations_for(backend)

    results, code = _solve_grid(instances, formulations, backend, config)
    title = f"N={args.n} d={args.d} theta={args.theta:g} pi={args.pi:g} over {len(specs)} seeds"
    console.print(summary_table(results, title=title))
    violations = bound_order_violations(results, [f"seed {s}" for s in config.seeds])
    for label in violations:
        Log.warning(f"{label}: perspective root LP bound is weaker than Big-M")
    if config.out is not None:
        _write_json(
            config.out,
            {
                "generator": {"n": args.n, "d": args.d, "theta": args.theta, "pi": args.pi, "k": args.k},
                "seeds": config.seeds,
                "summary": aggregate(results),
                "reports": {f: [r.to_dict() for r in rs] for f, rs in results.items()},
                "bound_order_violations": violations,
            },
        )
    return code


def cmd_estimate(config: CliConfig, args: argparse.Namespace) -> int:
    if config.out is None:
        raise InvalidInput("--out is required")
    data = TransactionData.from_csv(args.transactions, args.products, args.assortments)
    candidates = [(d, t) for d in args.d for t in args.theta]
    table = cross_validate(data, candidates, folds=config.folds, seed=config.seed)

    cv_path = config.out.with_suffix(".cv.csv")
    cv_path.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(cv_path, index=False)

    best = table.loc[table["chi2"].idxmin()]
    structure = restrict_to_offered(build_candidate_hypergraph(data, int(best["d"]), float(best["theta"])), data)
    params, ll = fit_mle(data, structure)
    hypergraph = structure.to_hypergraph(params)
    meta = {"fitted": {"d": int(best["d"]), "theta": float(best["theta"]), "log_likelihood": ll}}
    Instance([hypergraph], ConstraintSet.unconstrained(hypergraph.num_products), meta=meta).save(config.out)

    rich_table = Table(title="Out-of-sample performance")
    rich_table.add_column("d", style="cyan")
    rich_table.add_column("theta", justify="right")
    for name in ("chi2", "Improve%", "MSE", "Improve%"):
        rich_table.add_column(name, justify="right", style="green")
    for row in table.itertuples(index=False):
        rich_table.add_row(
            str(row.d),
            f"{row.theta:g}",
            f"{row.chi2:.4f}",
            f"{row.chi2_improve_pct:.2f}",
            f"{row.mse:.6f}",
            f"{row.mse_improve_pct:.2f}",
        )
    console.print(rich_table)
    return EXIT_OK


# Parser


def _add_generator_flags(cmd: argparse.ArgumentParser) -> None:
    cmd.add_argument("--n", type=int, required=True)
    cmd.add_argument("--d", type=int, default=2)
    cmd.add_argument("--theta", type=float, default=0.25)
    cmd.add_argument("--pi", type=float, default=0.0)
    cmd.add_argument("--k", type=int, default=1)
    cmd.add_argument("--robust", action="store_true")


def _add_solver_flags(cmd: argparse.ArgumentParser) -> None:
    cmd.add_argument("--cuts", default=None, help="Comma-separated: rmc, xbounds, odd, ric")
    cmd.add_argument("--time-limit", type=float, default=DEFAULT_TIME_LIMIT)
    cmd.add_argument("--gap", type=float, default=DEFAULT_REL_GAP)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="logit-mp", description="Assortment optimization under Logit-MP models")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="Generate a synthetic instance")
    _add_generator_flags(gen)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)

    for name, help_text in (("solve", "Solve instances"), ("compare", "Compare formulations")):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("instances", nargs="+")
        if name == "solve":
            cmd.add_argument("--formulation", choices=FORMULATIONS, default="pers")
        _add_solver_flags(cmd)
        cmd.add_argument("--seed", type=int, default=0)
        cmd.add_argument("--out", default=None)

    bench = sub.add_parser("bench", help="Compare formulations over generated instances, one per seed")
    _add_generator_flags(bench)
    _add_solver_flags(bench)
    bench.add_argument("--seed", type=int, nargs="+", default=list(range(5)))
    bench.add_argument("--out", default=None)

    est = sub.add_parser("estimate", help="Select and fit a Logit-MP model from transactions")
    est.add_argument("transactions")
    est.add_argument("products")
    est.add_argument("assortments", nargs="?", default=None)
    est.add_argument("--d", type=int, nargs="+", default=[2])
    est.add_argument("--theta", type=float, nargs="+", default=[0.1])
    est.add_argument("--folds", type=int, default=5)
    est.add_argument("--seed", type=int, default=None, help="Shuffle periods into folds with this seed")
    est.add_argument("--out", required=True)
    return parser


COMMANDS = {
    "generate": cmd_generate,
    "solve": cmd_solve,
    "compare": cmd_compare,
    "bench": cmd_bench,
    "estimate": cmd_estimate,
}


def _setup_logging() -> None:
    logger = logging.getLogger("logit_mp")
    if not any(isinstance(h, RichHandler) for h in logger.handlers):
        logger.addHandler(RichHandler(console=Console(stderr=True), show_path=False))
    logger.setLevel(logging.INFO)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE
    _setup_logging()

    try:
        config = CliConfig.from_args(args)
        return COMMANDS[config.command](config, args)
    except (BackendError, EstimationError) as e:
        Log.error(f"{type(e).__name__}: {e}")
        return EXIT_FAILURE
    except (LogitMPError, OSError) as e:
        Log.error(f"{type(e).__name__}: {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
