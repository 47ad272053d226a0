"""Within-country retweet networks and disparity-filter backbone extraction.

The network is undirected: nodes are geolocated users of one country, an
edge's weight counts simple retweets (quote tweets excluded) between the
two users in either direction. Backbone extraction keeps an edge when its
share of either endpoint's strength is statistically significant, with one
modification: edges connecting two seed users are always retained so that
seeds stay connected to the rest of the network.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .geolocate import GeoUser
from .ingest import TweetRecord


@dataclass
class WeightedGraph:
    """Undirected user-user graph with positive integer edge weights.

    Edges are stored once per unordered pair in ``adj`` (kept symmetric);
    ``seeds`` is the subset of nodes with prior labels.
    """

    adj: dict[str, dict[str, int]] = field(default_factory=dict)
    seeds: frozenset[str] = frozenset()

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[str, str, int]],
        seeds: Iterable[str] = (),
    ) -> "WeightedGraph":
        g = cls()
        for u, v, w in edges:
            g.add_edge(u, v, w)
        g.seeds = frozenset(seeds) & g.nodes()
        return g

    def add_edge(self, u: str, v: str, weight: int = 1) -> None:
        if u == v:
            raise ValueError(f"self-loop rejected: {u}")
        if weight < 1:
            raise ValueError(f"edge weight must be >= 1, got {weight}")
        self.adj.setdefault(u, {})
        self.adj.setdefault(v, {})
        self.adj[u][v] = self.adj[u].get(v, 0) + weight
        self.adj[v][u] = self.adj[v].get(u, 0) + weight

    def nodes(self) -> frozenset[str]:
        return frozenset(self.adj)

    def n_nodes(self) -> int:
        return len(self.adj)

    def n_edges(self) -> int:
        return sum(len(nbrs) for nbrs in self.adj.values()) // 2

    def degree(self, u: str) -> int:
        return len(self.adj[u])

    def strength(self, u: str) -> int:
        return sum(self.adj[u].values())

    def weight(self, u: str, v: str) -> int:
        return self.adj[u][v]

    def has_edge(self, u: str, v: str) -> bool:
        return u in self.adj and v in self.adj[u]

    def edges(self) -> Iterator[tuple[str, str, int]]:
        """Yield each edge once as (u, v, weight) with u < v."""
        for u in self.adj:
            for v, w in self.adj[u].items():
                if u < v:
                    yield u, v, w

    def copy_with_seeds(self, seeds: Iterable[str]) -> "WeightedGraph":
        """Same topology with a replaced seed set (restricted to nodes)."""
        return WeightedGraph(adj=self.adj, seeds=frozenset(seeds) & self.nodes())


@dataclass(frozen=True)
class BackboneConfig:
    significance_threshold: float = 0.05
    keep_seed_seed_edges: bool = True

    def __post_init__(self):
        if not 0.0 < self.significance_threshold < 1.0:
            raise ValueError("significance threshold must be in (0,1)")


def build_network(
    corpus: Iterable[TweetRecord],
    geo_users: Mapping[str, GeoUser],
    country: str,
) -> WeightedGraph:
    """Build the within-country retweet network for one country.

    Only simple retweets where both users are geolocated to ``country``
    contribute; weights accumulate over both retweet directions. The result
    is independent of corpus record order.
    """
    weights: dict[tuple[str, str], int] = {}
    for rec in corpus:
        if not rec.is_simple_retweet:
            continue
        u, v = rec.user_id, rec.retweeted_user_id
        if u == v:
            continue
        gu, gv = geo_users.get(u), geo_users.get(v)
        if gu is None or gv is None or gu.country != country or gv.country != country:
            continue
        key = (u, v) if u < v else (v, u)
        weights[key] = weights.get(key, 0) + 1
    return WeightedGraph.from_edges((u, v, w) for (u, v), w in weights.items())


def disparity_pvalue(p: float, k: int) -> float:
    """Significance of an edge carrying share ``p`` of a degree-``k`` node.

    Closed form (1-p)^(k-1) of the disparity-filter null model. Degree-1
    endpoints return 1.0: an only-edge can never look significant from that
    side.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"normalized weight outside [0,1]: {p}")
    if k < 1:
        raise ValueError(f"degree must be >= 1, got {k}")
    if k == 1:
        return 1.0
    return (1.0 - p) ** (k - 1)


def extract_backbone(g: WeightedGraph, cfg: BackboneConfig | None = None) -> WeightedGraph:
    """Keep edges significant from at least one endpoint, plus seed-seed edges.

    An edge survives iff its disparity p-value from either endpoint is
    strictly below the threshold, or both endpoints are seeds and
    ``keep_seed_seed_edges`` is set. Nodes left isolated are dropped and the
    seed set is restricted to surviving nodes. Weights are unchanged.
    """
    if cfg is None:
        cfg = BackboneConfig()
    strengths = {u: g.strength(u) for u in g.adj}
    degrees = {u: g.degree(u) for u in g.adj}
    kept = WeightedGraph()
    for u, v, w in g.edges():
        significant = (
            disparity_pvalue(w / strengths[u], degrees[u]) < cfg.significance_threshold
            or disparity_pvalue(w / strengths[v], degrees[v]) < cfg.significance_threshold
        )
        seed_pair = cfg.keep_seed_seed_edges and u in g.seeds and v in g.seeds
        if significant or seed_pair:
            kept.add_edge(u, v, w)
    kept.seeds = g.seeds & kept.nodes()
    return kept


def write_edges(path: str | Path, g: WeightedGraph) -> None:
    """Export the edge list as CSV (u,v,weight), canonically ordered."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["u", "v", "weight"])
        for u, v, w in sorted(g.edges()):
            writer.writerow([u, v, w])


def write_seeds(path: str | Path, g: WeightedGraph) -> None:
    """Export the seed node list, one user_id per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for u in sorted(g.seeds):
            fh.write(u + "\n")


def read_graph(edges_path: str | Path, seeds_path: str | Path | None = None) -> WeightedGraph:
    """Import a graph written by write_edges/write_seeds."""
    edges = []
    with open(edges_path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            edges.append((row["u"], row["v"], int(row["weight"])))
    seeds: list[str] = []
    if seeds_path is not None and Path(seeds_path).is_file():
        with open(seeds_path, encoding="utf-8") as fh:
            seeds = [line.strip() for line in fh if line.strip()]
    return WeightedGraph.from_edges(edges, seeds=seeds)
