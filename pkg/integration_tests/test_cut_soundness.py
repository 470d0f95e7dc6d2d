"""
Every cut the driver emits on the exactness, sharpness and mixture sets is
valid at every point of the choice set of its instance.

A row that holds at all vertices holds on their convex hull, so checking the
enumerated points decides validity against the integer hull.
"""

from cases import exactness_sweep, mixture_instances, nested_chains, rank_two_graphs

from logit_mp.backends import SolveParams, get_backend
from logit_mp.choice_model import choice_point, enumerate_choice_set
from logit_mp.cutting_plane import CutConfig, CuttingPlaneSolver
from logit_mp.formulations import build_base_perspective, build_mixture, build_robust, set_assortment_objective
from logit_mp.separation import FractionalPoint

# Instances are enumerated in full
MAX_PRODUCTS = 12


def _vertex_values(model, x):
    """Model values at the 0/1 point x, with y_e = rho * prod_{i in e} x_i in every block"""
    values = {}
    for block in model.blocks:
        rho = choice_point(block.hypergraph, x).rho
        y = {e: rho if all(x[i - 1] for i in e) else 0.0 for e in block.bundles}
        values.update(FractionalPoint(rho, y, list(x), block.namer).values())
    return values


class TestCutSoundness:
    """Run the driver on the acceptance instance sets and re-check its pools."""

    @classmethod
    def setup_class(cls):
        """Solve every set with the separators its own test uses and keep the pools."""
        backend = get_backend()
        params = SolveParams(time_limit_s=120.0, rel_gap=0.0)

        jobs = []
        for spec, hypergraph, X in exactness_sweep():
            model = set_assortment_objective(build_base_perspective(hypergraph, X=X), hypergraph)
            jobs.append((f"exact n={spec.n} seed={spec.seed}", model, CutConfig()))
        for name, hypergraph in rank_two_graphs():
            model = set_assortment_objective(build_base_perspective(hypergraph), hypergraph)
            jobs.append((name, model, CutConfig(eps=1e-6, separators={"odd"}, stall_iterations=100)))
        for name, hypergraph in nested_chains():
            model = set_assortment_objective(build_base_perspective(hypergraph), hypergraph)
            jobs.append((name, model, CutConfig(eps=1e-6, separators={"ric"}, stall_iterations=100)))
        for k, (segments, uncertainty, X) in enumerate(mixture_instances()):
            weights = uncertainty.center.tolist()
            jobs.append((f"mixture-{k}", build_mixture(list(zip(segments, weights)), X), CutConfig()))
            jobs.append((f"robust-{k}", build_robust(segments, uncertainty, X, backend), CutConfig()))

        cls.runs = []
        for name, model, config in jobs:
            solver = CuttingPlaneSolver(config, backend, params)
            solver.solve(model)
            cls.runs.append((name, model, list(solver.pool)))

    def test_instances_are_enumerable(self):
        """Every instance in the sweep is small enough to enumerate."""
        for name, model, _ in self.runs:
            assert model.blocks[0].hypergraph.num_products <= MAX_PRODUCTS, name

    def test_cuts_hold_at_every_vertex(self):
        """No emitted cut is violated by more than 1e-9 at a choice-set point."""
        for name, model, cuts in self.runs:
            if not cuts:
                continue
            for x, _ in enumerate_choice_set(model.blocks[0].hypergraph, MAX_PRODUCTS):
                values = _vertex_values(model, x)
                for cut in cuts:
                    assert cut.inequality.violation(values) <= 1e-9, f"{name}: {cut.inequality.render()}"

    def test_some_cuts_were_found(self):
        """The runs exercise the separators."""
        assert sum(len(cuts) for _, _, cuts in self.runs) > 0
