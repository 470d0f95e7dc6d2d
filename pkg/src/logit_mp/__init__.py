"""
Assortment optimization under the multi-purchase logit (Logit-MP) choice model.

A Logit-MP model is a hypergraph over products whose bundles carry an
attraction value and a revenue. The package builds perspective, Big-M and
conic MIP formulations of the revenue-maximizing assortment problem,
tightens the perspective LP with odd-cycle and running-intersection cuts,
and fits models from transaction data.

```python
from logit_mp import ConstraintSet, new_hypergraph, solve_with_cuts

H = new_hypergraph(3, [((1,), 1.0, 2.0), ((2,), 1.0, 3.0), ((3,), 1.0, 5.0), ((1, 2), 0.5, 5.0)])
report = solve_with_cuts(H, ConstraintSet.cardinality(3, 2))
print(report.assortment, report.mip_obj, report.root_gap_pct)
```
"""

from .backends import SolveParams, SolverBackend, SolveStatus, get_backend
from .bruteforce import EnumerationResult, brute_force_optimum, hull_membership, robust_brute_force
from .choice_model import (
    ChoicePoint,
    bundle_probability,
    choice_point,
    choice_probabilities,
    enumerate_choice_set,
    expected_revenue,
)
from .cutting_plane import (
    CutConfig,
    CuttingPlaneSolver,
    Separator,
    SolveReport,
    report_table,
    solve_direct,
    solve_with_cuts,
)
from .errors import InvalidInput, LogitMPError, TooLarge
from .estimation import (
    Structure,
    TransactionData,
    UtilityParams,
    UtilitySpec,
    build_candidate_hypergraph,
    cross_validate,
    fit_mle,
    log_likelihood,
    restrict_to_offered,
    simulate_transactions,
)
from .formulations import (
    ConstraintSet,
    UncertaintySet,
    add_conic,
    build_base_perspective,
    build_bigm,
    build_mixture,
    build_robust,
    lp_relax,
    set_assortment_objective,
)
from .hypergraph import Bundle, Hypergraph, RIOrdering, find_ri_ordering, new_hypergraph
from .instances import GenSpec, Instance, generate_mixture, generate_single
from .log import Log
from .model import ModelIR
from .relaxation import LinearInequality, build_rmc_trees, rmc_inequalities, standard_linear_relaxation

__all__ = [
    "Bundle",
    "ChoicePoint",
    "ConstraintSet",
    "CutConfig",
    "CuttingPlaneSolver",
    "EnumerationResult",
    "GenSpec",
    "Hypergraph",
    "Instance",
    "InvalidInput",
    "LinearInequality",
    "Log",
    "LogitMPError",
    "ModelIR",
    "RIOrdering",
    "Separator",
    "SolveParams",
    "SolveReport",
    "SolveStatus",
    "SolverBackend",
    "Structure",
    "TooLarge",
    "TransactionData",
    "UncertaintySet",
    "UtilityParams",
    "UtilitySpec",
    "add_conic",
    "brute_force_optimum",
    "build_base_perspective",
    "build_bigm",
    "build_candidate_hypergraph",
    "build_mixture",
    "build_rmc_trees",
    "build_robust",
    "bundle_probability",
    "choice_point",
    "choice_probabilities",
    "cross_validate",
    "enumerate_choice_set",
    "expected_revenue",
    "find_ri_ordering",
    "fit_mle",
    "generate_mixture",
    "generate_single",
    "get_backend",
    "hull_membership",
    "log_likelihood",
    "lp_relax",
    "new_hypergraph",
    "report_table",
    "restrict_to_offered",
    "rmc_inequalities",
    "robust_brute_force",
    "set_assortment_objective",
    "simulate_transactions",
    "solve_direct",
    "solve_with_cuts",
    "standard_linear_relaxation",
]
