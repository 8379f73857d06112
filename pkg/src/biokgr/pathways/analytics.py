"""Graph analytics used by the benchmark curators.

All functions are pure; the graph arguments are never mutated. Anything with
a `node_ids()` / `edge_pairs()` pair is accepted, so the same routines serve
both the signed interaction graph and the reaction graph.
"""
from __future__ import annotations

from dataclasses import dataclass

import networkx as nx

from biokgr.pathways.graphs import ReactionGraph, SignedPathwayGraph

MAX_PATH_EDGES = 8
MAX_PATHS_PER_PAIR = 10_000


class NodeNotFound(Exception):
    pass


@dataclass(frozen=True)
class PolarityResult:
    """Mean product of edge signs over enumerated simple paths.

    `no_path` marks a well-defined zero (no evidence of a disease-promoting
    route) rather than an error; `truncated` flags that enumeration hit the
    path-count cap, so the mean covers only the enumerated prefix.
    """

    value: float
    path_count: int
    no_path: bool = False
    truncated: bool = False


def _digraph(graph) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(graph.node_ids())
    g.add_edges_from(graph.edge_pairs())
    return g


def path_polarity(
    graph: SignedPathwayGraph,
    gene: str,
    endpoints: set[str] | list[str] | None = None,
    max_edges: int = MAX_PATH_EDGES,
    max_paths: int = MAX_PATHS_PER_PAIR,
) -> PolarityResult:
    """Average signed-path polarity from `gene` to the disease endpoints.

    Simple paths are expanded depth-first in lexicographic neighbor order, up
    to `max_edges` edges per path and `max_paths` paths per (gene, endpoint)
    pair. Each path contributes the product of its edge weights; the result
    is the mean over every enumerated path against every endpoint.
    """
    if gene not in graph.nodes:
        raise NodeNotFound(f"gene {gene!r} not in pathway graph")
    targets = sorted(endpoints) if endpoints is not None else sorted(graph.endpoints)
    for endpoint in targets:
        if endpoint not in graph.nodes:
            raise NodeNotFound(f"endpoint {endpoint!r} not in pathway graph")

    adjacency = graph.signed_adjacency()
    total = 0
    count = 0
    truncated = False

    for endpoint in targets:
        if endpoint == gene:
            continue
        # iterative DFS over (node, product, depth) with an explicit path set
        stack: list[tuple[str, int, int, tuple[str, ...]]] = [(gene, 1, 0, (gene,))]
        pair_count = 0
        while stack:
            node, product, depth, path = stack.pop()
            if node == endpoint:
                total += product
                count += 1
                pair_count += 1
                if pair_count >= max_paths:
                    truncated = True
                    break
                continue
            if depth == max_edges:
                continue
            # reversed so the lexicographically smallest neighbor pops first
            for nxt, weight in reversed(adjacency.get(node, [])):
                if nxt in path:
                    continue
                stack.append((nxt, product * weight, depth + 1, path + (nxt,)))

    if count == 0:
        return PolarityResult(value=0.0, path_count=0, no_path=True)
    return PolarityResult(
        value=total / count, path_count=count, truncated=truncated
    )


def betweenness(graph) -> dict[str, float]:
    """Unnormalized directed betweenness centrality with unit edge lengths."""
    g = _digraph(graph)
    if g.number_of_nodes() == 0:
        return {}
    return dict(nx.betweenness_centrality(g, normalized=False))


def strongly_connected_components(graph) -> list[set[str]]:
    """Partition of the node set into strongly connected components."""
    g = _digraph(graph)
    components = [set(c) for c in nx.strongly_connected_components(g)]
    return sorted(components, key=lambda c: sorted(c)[0])


def cyclic_nodes(graph) -> set[str]:
    """Nodes on a directed cycle: members of a multi-node SCC or a self-loop."""
    g = _digraph(graph)
    cyclic: set[str] = set()
    for component in nx.strongly_connected_components(g):
        if len(component) > 1:
            cyclic |= component
    cyclic |= {u for u, v in g.edges if u == v}
    return cyclic


def k_step_neighborhood(
    graph: ReactionGraph,
    node: str,
    k: int,
    direction: str = "downstream",
) -> set[str]:
    """Nodes reachable within 1..k steps of `node`, excluding `node` itself."""
    if direction not in ("downstream", "upstream"):
        raise ValueError(f"direction must be downstream or upstream, got {direction!r}")
    if node not in set(graph.node_ids()):
        raise NodeNotFound(f"node {node!r} not in graph")
    if k < 0:
        raise ValueError("k must be >= 0")

    forward: dict[str, set[str]] = {}
    for src, dst in graph.edge_pairs():
        if direction == "downstream":
            forward.setdefault(src, set()).add(dst)
        else:
            forward.setdefault(dst, set()).add(src)

    reached: set[str] = set()
    frontier = {node}
    for _ in range(k):
        nxt: set[str] = set()
        for n in frontier:
            nxt |= forward.get(n, set())
        frontier = nxt - reached - {node}
        if not frontier:
            break
        reached |= frontier
    return reached


def terminal_endpoints(graph: ReactionGraph) -> set[str]:
    """Exactly the nodes with out-degree zero."""
    nodes = set(graph.node_ids())
    with_out = {src for src, _dst in graph.edge_pairs()}
    return nodes - with_out
