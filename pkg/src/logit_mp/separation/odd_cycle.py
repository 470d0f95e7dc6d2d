"""
Odd-cycle cuts for the rank-2 part of the hypergraph.

Products plus a virtual node o (with value 0) form a graph whose edges are the
pairs {i, j} in E and the spokes {i, o}. With c_io = x_i and
c_ij = x_i + x_j - 2 z_ij, every cycle C and odd subset D of C satisfies

    sum_{D} (1 - c) + sum_{C \\ D} c >= 1,

and multiplying by rho puts the row in (rho, y) space. Separation searches a
doubled graph for the shortest path from i to its copy i'; the path must use
an odd number of cross edges, which select D.
"""

from typing import Dict, Hashable, List, Sequence, Tuple

import networkx as nx

from ..constants import DEFAULT_EPS, NEGATIVE_WEIGHT_TOL
from ..errors import NegativeWeight
from ..hypergraph import Bundle, Hypergraph
from .base import Cut, CutFamily, FractionalPoint, dedupe, make_cut

VIRTUAL = 0

# A base edge is a pair (a, b) of nodes; node 0 is the virtual node o
Edge = Tuple[int, int]


def _edge(a: int, b: int) -> Edge:
    return (a, b) if a < b else (b, a)


def scaled_length(edge: Edge) -> Dict[Hashable, float]:
    """rho * c_e written in (rho, y): y_i for a spoke, y_i + y_j - 2 y_ij otherwise"""
    a, b = edge
    if a == VIRTUAL:
        return {Bundle((b,)): 1.0}
    return {Bundle((a,)): 1.0, Bundle((b,)): 1.0, Bundle((a, b)): -2.0}


def _evaluate(point: FractionalPoint, terms: Dict[Hashable, float]) -> float:
    return sum(c * (point.rho_hat if k == "rho" else point.y(k)) for k, c in terms.items())


def odd_cycle_inequality(
    point: FractionalPoint, cycle: Sequence[Edge], odd_subset: Sequence[Edge]
) -> Dict[Hashable, float]:
    """
    Terms of the rho-scaled odd-cycle row  terms <= 0.

    The row is (rho - L) / 2 <= 0 with
    L = sum_{D} (rho - rho c_e) + sum_{C \\ D} rho c_e, which puts
    coefficient +-1 on every pair variable y_ij.
    """
    chosen = {_edge(*e) for e in odd_subset}
    terms: Dict[Hashable, float] = {"rho": 0.5}
    for raw in cycle:
        e = _edge(*raw)
        sign = 1.0 if e in chosen else -1.0
        if e in chosen:
            terms["rho"] -= 0.5
        for key, c in scaled_length(e).items():
            terms[key] = terms.get(key, 0.0) + 0.5 * sign * c
    return {k: c for k, c in terms.items() if abs(c) > 1e-15}


def _base_edges(hypergraph: Hypergraph) -> List[Edge]:
    edges = [(VIRTUAL, i) for i in hypergraph.products]
    edges += [e.items for e in hypergraph.edges if len(e) == 2]
    return edges


def _clamp(weight: float, edge: Edge) -> float:
    if weight >= 0:
        return weight
    if weight >= -NEGATIVE_WEIGHT_TOL:
        return 0.0
    raise NegativeWeight(f"Edge {edge} has length {weight:.3e} below -{NEGATIVE_WEIGHT_TOL}")


def doubled_graph(point: FractionalPoint, hypergraph: Hypergraph) -> nx.Graph:
    """
    The doubled graph with nodes (v, 0) and (v, 1).

    Same-side edges carry rho c_e, cross edges carry rho (1 - c_e); slightly
    negative lengths from LP tolerances are clamped to zero.
    """
    graph = nx.Graph()
    for edge in _base_edges(hypergraph):
        a, b = edge
        same = _evaluate(point, scaled_length(edge))
        cross = point.rho_hat - same
        same, cross = _clamp(same, edge), _clamp(cross, edge)
        graph.add_edge((a, 0), (b, 0), weight=same, cross=False)
        graph.add_edge((a, 1), (b, 1), weight=same, cross=False)
        graph.add_edge((a, 0), (b, 1), weight=cross, cross=True)
        graph.add_edge((a, 1), (b, 0), weight=cross, cross=True)
    return graph


def _simple_odd_cycle(walk: List[Tuple[int, bool]]) -> List[Tuple[int, bool]]:
    """
    Reduce a closed walk with an odd number of cross steps to a simple cycle.

    walk holds (node, cross) steps; step k goes from walk[k-1] (or the start
    node, walk[-1]) to walk[k]. Splitting at a repeated node leaves one part
    with odd parity; that part is kept until no node repeats.
    """
    while True:
        position: Dict[int, int] = {}
        split = None
        for k, (node, _) in enumerate(walk):
            if node in position:
                split = (position[node], k)
                break
            position[node] = k
        if split is None:
            return walk
        first, second = split
        inner = walk[first + 1 : second + 1]
        outer = walk[: first + 1] + walk[second + 1 :]
        inner_odd = sum(cross for _, cross in inner) % 2 == 1
        walk = inner if inner_odd else outer


def separate_odd_cycle(point: FractionalPoint, hypergraph: Hypergraph, eps: float = DEFAULT_EPS) -> List[Cut]:
    """
    Odd-cycle cuts violated by more than eps.

    Only bundles with at most two items are used. One shortest-path search
    runs per product; paths are reduced to simple cycles before the row is
    built.

    Raises:
        NegativeWeight: If an edge length is below the clamping tolerance
    """
    if point.rho_hat <= 0:
        return []
    graph = doubled_graph(point, hypergraph.restrict_rank(2))

    cuts: List[Cut] = []
    for i in hypergraph.products:
        try:
            length, path = nx.single_source_dijkstra(graph, (i, 0), target=(i, 1), weight="weight")
        except nx.NetworkXNoPath:
            continue
        if length >= point.rho_hat:
            continue

        # Closed walk in the base graph: (node, arrived by cross edge)
        walk = [(node[0], graph.edges[prev, node]["cross"]) for prev, node in zip(path, path[1:])]
        steps = _simple_odd_cycle(walk)
        if len(steps) < 3:
            continue

        nodes = [n for n, _ in steps]
        cycle = [_edge(nodes[k - 1], nodes[k]) for k in range(len(nodes))]
        odd = [cycle[k] for k, (_, cross) in enumerate(steps) if cross]
        row = point.inequality(odd_cycle_inequality(point, cycle, odd), "<=", 0.0)
        cut = make_cut(point, row, CutFamily.ODD_CYCLE, "cycle=" + "-".join("o" if n == VIRTUAL else str(n) for n in nodes))
        if cut.violation > eps:
            cuts.append(cut)
    return dedupe(cuts)
