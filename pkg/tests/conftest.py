"""
Pytest configuration and shared fixtures for logit-mp tests.
"""

import pytest

from logit_mp.backends import SolveParams, get_backend
from logit_mp.hypergraph import new_hypergraph
from logit_mp.instances import cycle_graph, figure_general_pattern, path_graph


@pytest.fixture
def pair_instance():
    """
    The two-product instance with a single pair bundle.

    Products 1 and 2 and the bundle {1,2} all have v = 1 and revenues
    r = (2, 3, 5) for {1}, {2} and {1,2}.
    """
    return new_hypergraph(2, [((1,), 1.0, 2.0), ((2,), 1.0, 3.0), ((1, 2), 1.0, 5.0)])


@pytest.fixture
def three_product_instance():
    """Singletons plus {1,2} with v = (0.5, 0.8, 1.0, 2.0) and r = (2, 3, 1, 5)"""
    return new_hypergraph(
        3,
        [((1,), 0.5, 2.0), ((2,), 0.8, 3.0), ((3,), 1.0, 1.0), ((1, 2), 2.0, 5.0)],
    )


@pytest.fixture
def triple_instance():
    """A rank-3 instance sharing the prefix {1,2} between two triples"""
    return new_hypergraph(
        4,
        [
            ((1,), 0.6, 2.0),
            ((2,), 0.7, 2.5),
            ((3,), 0.5, 3.0),
            ((4,), 0.9, 1.5),
            ((1, 2, 3), 1.4, 8.0),
            ((1, 2, 4), 0.8, 6.0),
        ],
    )


@pytest.fixture
def figure_instance():
    """Six products, e0 = {1..6} with neighbors {1,2}, {2,3}, {3,4,5}"""
    return figure_general_pattern()


@pytest.fixture
def path4():
    return path_graph(4, seed=3)


@pytest.fixture
def cycle5():
    return cycle_graph(5, seed=5)


@pytest.fixture
def backend():
    """A fresh default backend handle"""
    return get_backend()


@pytest.fixture
def quick_params():
    return SolveParams(time_limit_s=60.0, rel_gap=0.0)
