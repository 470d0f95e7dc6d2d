"""
Root gap of the cut-tightened perspective model on generated instances of
realistic size, with a rich table and a markdown summary of the runs.
"""

import os
from datetime import datetime

from rich.console import Console
from rich.table import Table

from logit_mp.backends import SolveParams, get_backend
from logit_mp.cutting_plane import CutConfig, solve_with_cuts
from logit_mp.instances import GenSpec, generate_single

SPECS = [
    GenSpec(n=100, d=2, theta=0.25, pi=0.0, seed=0),
    GenSpec(n=100, d=2, theta=0.25, pi=0.0, seed=1),
    GenSpec(n=100, d=2, theta=0.25, pi=0.0, seed=2),
    GenSpec(n=100, d=2, theta=0.25, pi=1.0, seed=3),
    GenSpec(n=100, d=2, theta=0.25, pi=1.0, seed=4),
]


class TestRootGap:
    """The root LP after separation is within 0.1% of the MIP optimum."""

    @classmethod
    def setup_class(cls):
        """Solve every instance once; the tests only read the reports."""
        backend = get_backend()
        params = SolveParams(time_limit_s=600.0)
        cls.reports = []
        for spec in SPECS:
            hypergraph, X = generate_single(spec)
            cls.reports.append((spec, solve_with_cuts(hypergraph, X, backend=backend, params=params)))

    def test_all_solved(self):
        """Every instance reaches a proven optimum."""
        for spec, report in self.reports:
            assert report.status == "Optimal", spec

    def test_root_gap_is_small(self):
        """RGap stays at or below 0.1%."""
        for spec, report in self.reports:
            assert report.root_gap_pct is not None
            assert report.root_gap_pct <= 0.1, spec

    def test_few_branch_and_bound_nodes(self):
        """Branch-and-bound explores at most ten nodes."""
        for spec, report in self.reports:
            assert report.node_count <= 10, spec

    def test_write_summary(self):
        """Print the runs and save them as markdown."""
        console = Console()
        table = Table(title="Perspective root gap (N = 100, d = 2, theta = 0.25)")
        table.add_column("Seed", justify="right", style="cyan")
        table.add_column("pi", justify="right")
        table.add_column("RGap %", justify="right", style="green")
        table.add_column("Cuts", justify="right")
        table.add_column("Nodes", justify="right")
        table.add_column("Time (s)", justify="right", style="magenta")

        md_content = "# Root Gap Results\n\n"
        md_content += "| Seed | pi | RGap % | Cuts | Nodes | Time (s) |\n"
        md_content += "|------|----|--------|------|-------|----------|\n"
        for spec, report in self.reports:
            row = [
                str(spec.seed),
                f"{spec.pi:.1f}",
                f"{report.root_gap_pct:.4f}",
                str(report.total_cuts),
                str(report.node_count),
                f"{report.time_s:.1f}",
            ]
            table.add_row(*row)
            md_content += "| " + " | ".join(row) + " |\n"
        console.print(table)

        md_content += "\n\n## Test Information\n\n"
        md_content += f"- Date/Time: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}\n"

        results_dir = "performance_results"
        os.makedirs(results_dir, exist_ok=True)
        with open(f"{results_dir}/root_gap.md", "w") as f:
            f.write(md_content)
        assert os.path.exists(f"{results_dir}/root_gap.md")
