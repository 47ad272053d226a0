"""Deterministic synthetic graphs and seedings for tests and bundled fixtures."""

from __future__ import annotations

import numpy as np

from .graph import WeightedGraph
from .leaning import LEFT, RIGHT, ORIGIN_POLITICIAN, SeedLabel


def planted_partition_graph(
    n_per_side: int = 500,
    p_in: float = 0.05,
    p_out: float = 0.005,
    seeds_per_side: int = 10,
    rng: np.random.Generator | None = None,
) -> tuple[WeightedGraph, list[SeedLabel], dict[str, int]]:
    """Two-community random graph with known membership.

    Within-community edges appear with probability ``p_in``, cross edges
    with ``p_out``; weights are small random integers. Nodes left isolated
    are attached to a same-side neighbor so the spreading operator is well
    defined. Returns the graph, politician-style seeds (the first
    ``seeds_per_side`` of each side), and the ground-truth membership.
    """
    rng = rng or np.random.default_rng(0)
    left_nodes = [f"L{i:04d}" for i in range(n_per_side)]
    right_nodes = [f"R{i:04d}" for i in range(n_per_side)]
    nodes = left_nodes + right_nodes
    membership = {u: LEFT for u in left_nodes}
    membership.update({u: RIGHT for u in right_nodes})

    g = WeightedGraph()
    for side in (left_nodes, right_nodes):
        for i in range(len(side)):
            for j in range(i + 1, len(side)):
                if rng.random() < p_in:
                    g.add_edge(side[i], side[j], int(rng.integers(1, 4)))
    for u in left_nodes:
        for v in right_nodes:
            if rng.random() < p_out:
                g.add_edge(u, v, 1)
    for idx, u in enumerate(nodes):
        if u not in g.adj:
            side = left_nodes if u in membership and membership[u] == LEFT else right_nodes
            v = side[(idx + 1) % len(side)]
            if v == u:
                v = side[(idx + 2) % len(side)]
            g.add_edge(u, v, 1)

    seeds = [SeedLabel(u, LEFT, ORIGIN_POLITICIAN) for u in left_nodes[:seeds_per_side]]
    seeds += [SeedLabel(u, RIGHT, ORIGIN_POLITICIAN) for u in right_nodes[:seeds_per_side]]
    g.seeds = frozenset(s.user_id for s in seeds)
    return g, seeds, membership


def random_connected_graph(
    n: int, rng: np.random.Generator, extra_edges: int | None = None
) -> WeightedGraph:
    """Connected random graph: a random spanning tree plus extra edges."""
    nodes = [f"u{i:04d}" for i in range(n)]
    g = WeightedGraph()
    for i in range(1, n):
        j = int(rng.integers(0, i))
        g.add_edge(nodes[i], nodes[j], int(rng.integers(1, 10)))
    if extra_edges is None:
        extra_edges = n
    added = 0
    while added < extra_edges:
        i, j = rng.integers(0, n, size=2)
        if i == j:
            continue
        u, v = nodes[int(i)], nodes[int(j)]
        if not g.has_edge(u, v):
            g.add_edge(u, v, int(rng.integers(1, 10)))
        added += 1
    return g


def community_hashtag_counts(
    membership: dict[str, int],
    left_tag: str,
    right_tag: str,
    rng: np.random.Generator,
    activity_rate: float = 0.5,
    fidelity: float = 0.97,
) -> dict[str, dict[str, int]]:
    """Hashtag usage correlated with community membership.

    A random subset of users posts partisan hashtags; with probability
    ``fidelity`` all their posts use their own side's tag, otherwise usage
    is mixed enough to leave them unseeded (score inside the threshold).
    """
    counts: dict[str, dict[str, int]] = {}
    for user in sorted(membership):
        if rng.random() >= activity_rate:
            continue
        own = left_tag if membership[user] == LEFT else right_tag
        other = right_tag if membership[user] == LEFT else left_tag
        n_posts = int(rng.integers(3, 12))
        if rng.random() < fidelity:
            counts[user] = {own: n_posts}
        else:
            counts[user] = {own: n_posts, other: n_posts}
    return counts
