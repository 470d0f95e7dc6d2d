"""
Instance sets shared by the integration tests.
"""

from logit_mp.instances import (
    GenSpec,
    candidate_bundles,
    cycle_graph,
    generate_mixture,
    generate_single,
    make_rng,
    nested_chain,
    path_graph,
    series_parallel,
)


def exactness_sweep(count=50):
    """(spec, hypergraph, X) for small random instances with a random cardinality limit"""
    rng = make_rng(11)
    for seed in range(count):
        n = int(rng.integers(4, 11))
        d = int(rng.integers(2, 4))
        total = len(candidate_bundles(n, d))
        spec = GenSpec(
            n=n,
            d=d,
            theta=min(1.0, 8 / total),
            pi=0.0,
            categories=1,
            seed=seed,
            cardinality_ratio=float(rng.uniform(0.2, 0.8)),
        )
        yield spec, *generate_single(spec)


def rank_two_graphs():
    """Paths, cycles and series-parallel graphs, named"""
    for seed in range(5):
        yield f"path-{seed}", path_graph(5 + seed, seed=seed)
        yield f"cycle-{seed}", cycle_graph(4 + seed, seed=seed)
    for seed in range(10):
        yield f"series-parallel-{seed}", series_parallel(6 + seed % 4, seed=seed)


def nested_chains():
    for links in (1, 2, 3, 4):
        for seed in range(5):
            yield f"chain-{links}-{seed}", nested_chain(links, seed=seed)


def mixture_instances():
    """(segments, uncertainty, X) with two segments on six to eight products"""
    return [
        generate_mixture(GenSpec(n=6 + seed % 3, d=2, theta=0.4, pi=0.5, k=2, seed=seed, cardinality_ratio=0.5))
        for seed in range(10)
    ]
