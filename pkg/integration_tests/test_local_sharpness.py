"""
Zero integrality gap of the cut-tightened perspective relaxation on
structures where its separators describe the multilinear polytope exactly.
"""

import pytest
from cases import nested_chains, rank_two_graphs

from logit_mp.backends import SolveParams, get_backend
from logit_mp.bruteforce import brute_force_optimum
from logit_mp.cutting_plane import CutConfig, solve_with_cuts
from logit_mp.instances import cycle_graph


class TestLocalSharpness:
    """Unconstrained LP bound equals the enumerated optimum."""

    @classmethod
    def setup_class(cls):
        cls.backend = get_backend()
        cls.params = SolveParams(time_limit_s=300.0, rel_gap=0.0)

    def _assert_sharp(self, hypergraph, separators):
        config = CutConfig(eps=1e-6, separators=separators, stall_iterations=100)
        report = solve_with_cuts(hypergraph, config=config, backend=self.backend, params=self.params)
        expected = brute_force_optimum(hypergraph).value
        assert report.mip_obj == pytest.approx(expected, abs=1e-6)
        assert report.lp_obj_final == pytest.approx(expected, rel=1e-5, abs=1e-6)
        return report

    def test_graphs_without_k4_minor(self):
        """Odd-cycle cuts close the gap on paths, cycles and series-parallel graphs."""
        for name, hypergraph in rank_two_graphs():
            report = self._assert_sharp(hypergraph, {"odd"})
            assert report.iterations >= 1, name

    def test_cycles_need_odd_cycle_cuts(self):
        """Without cuts the unit-value cycle keeps a gap the odd cuts remove."""
        hypergraph = cycle_graph(5)
        plain = solve_with_cuts(hypergraph, config=CutConfig(separators=()), backend=self.backend, params=self.params)
        cut = self._assert_sharp(hypergraph, {"odd"})
        assert cut.lp_obj_final <= plain.lp_obj_final + 1e-9

    def test_nested_chains(self):
        """Kite-free beta-acyclic chains are closed by running-intersection cuts."""
        for _, hypergraph in nested_chains():
            self._assert_sharp(hypergraph, {"ric"})
