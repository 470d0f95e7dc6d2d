"""
Exhaustive check of odd-cycle separation on small rank-2 instances.

Every simple cycle of the base graph (products plus the virtual node) and
every odd subset of its edges is enumerated; the separator must return a cut
exactly when some such row is violated by more than eps.
"""

import itertools

import numpy as np

from logit_mp.hypergraph import Bundle, new_hypergraph
from logit_mp.instances import make_rng
from logit_mp.separation import FractionalPoint
from logit_mp.separation.odd_cycle import VIRTUAL, odd_cycle_inequality, separate_odd_cycle

EPS = 1e-6
# Points whose exhaustive violation sits this close to eps are skipped
MARGIN = 1e-7


def _random_graph(n, rng):
    pairs = [(a, b) for a, b in itertools.combinations(range(1, n + 1), 2) if rng.random() < 0.6]
    edges = [((i,), 1.0, 1.0) for i in range(1, n + 1)] + [(pair, 1.0, 1.0) for pair in pairs]
    return new_hypergraph(n, edges), pairs


def _mccormick_point(n, pairs, rng):
    """A point with y_ij / rho in the McCormick box of (y_i / rho, y_j / rho)"""
    rho = rng.uniform(0.1, 1.0)
    a = rng.uniform(0.0, 1.0, size=n)
    y = {Bundle.of(i): rho * a[i - 1] for i in range(1, n + 1)}
    for i, j in pairs:
        low = max(0.0, a[i - 1] + a[j - 1] - 1.0)
        high = min(a[i - 1], a[j - 1])
        # Lean towards the lower bound, where odd-cycle rows bite
        y[Bundle.of(i, j)] = rho * (low + (high - low) * rng.random() ** 2)
    return FractionalPoint(rho, y, a)


def _simple_cycles(nodes, adjacent):
    for size in range(3, len(nodes) + 1):
        for subset in itertools.combinations(nodes, size):
            first, rest = subset[0], subset[1:]
            for order in itertools.permutations(rest):
                if order[0] > order[-1]:
                    continue
                ring = (first, *order)
                cycle = [(ring[k - 1], ring[k]) for k in range(size)]
                if all(frozenset(e) in adjacent for e in cycle):
                    yield cycle


def _exhaustive_violation(point, pairs, n):
    adjacent = {frozenset((VIRTUAL, i)) for i in range(1, n + 1)} | {frozenset(p) for p in pairs}
    values = point.values()
    best = -np.inf
    for cycle in _simple_cycles(list(range(n + 1)), adjacent):
        for size in range(1, len(cycle) + 1, 2):
            for odd in itertools.combinations(cycle, size):
                row = point.inequality(odd_cycle_inequality(point, cycle, odd), "<=", 0.0)
                best = max(best, row.violation(values))
    return best


class TestOddCycleCompleteness:
    """Compare the shortest-path oracle against full enumeration."""

    @classmethod
    def setup_class(cls):
        """Draw small random graphs and McCormick-feasible points on them."""
        rng = make_rng(2024)
        cls.cases = []
        for _ in range(40):
            n = int(rng.integers(3, 7))
            hypergraph, pairs = _random_graph(n, rng)
            for _ in range(4):
                cls.cases.append((hypergraph, pairs, _mccormick_point(n, pairs, rng)))

    def test_cut_found_iff_some_row_is_violated(self):
        """The oracle finds a cut exactly when enumeration does."""
        violated = 0
        for hypergraph, pairs, point in self.cases:
            best = _exhaustive_violation(point, pairs, hypergraph.num_products)
            if abs(best - EPS) < MARGIN:
                continue
            cuts = separate_odd_cycle(point, hypergraph, EPS)
            assert bool(cuts) == (best > EPS), f"pairs={pairs} best={best:.3e}"
            for cut in cuts:
                assert EPS < cut.violation <= best + 1e-9
            violated += best > EPS
        assert violated > 0

    def test_integral_points_are_never_cut(self):
        """Rows from the oracle are valid at every 0/1 point."""
        rng = make_rng(7)
        for hypergraph, pairs, _ in self.cases[::4]:
            n = hypergraph.num_products
            for _ in range(5):
                a = rng.integers(0, 2, size=n).astype(float)
                y = {Bundle.of(i): a[i - 1] for i in range(1, n + 1)}
                y.update({Bundle.of(i, j): a[i - 1] * a[j - 1] for i, j in pairs})
                assert separate_odd_cycle(FractionalPoint(1.0, y, a), hypergraph, EPS) == []
