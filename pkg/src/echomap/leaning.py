"""Seeded label spreading over retweet networks.

Seed users (politicians by party position, or hashtag-derived partisans)
carry fixed labels on a left/right axis. Scores diffuse over the symmetric
normalized adjacency S = D^(-1/2) W D^(-1/2) via the fixed point
F = alpha*S*F + (1-alpha)*Y, where Y is a two-column indicator (left, right)
over the seeds. A node's raw score is f_right/(f_left+f_right) in [0,1],
defined only where some seed mass arrived; final scores are rescaled to
[-1,1], negative meaning left-leaning.

The label matrix encoding and the convergence criterion (max-abs residual
below tolerance) are implementation choices documented here; nodes
unreachable from every seed stay unscored rather than defaulting to 0.
"""

from __future__ import annotations

import csv
import logging
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import ConvergenceError
from .geolocate import GeoUser
from .graph import WeightedGraph
from .ingest import TweetRecord

logger = logging.getLogger(__name__)

LEFT = -1
RIGHT = 1

ORIGIN_POLITICIAN = "politician"
ORIGIN_HASHTAG = "hashtag"

# Fixed shuffle seed for cross-validation fold assignment; overridable via
# the pipeline's rng_seed so full runs stay reproducible end to end.
DEFAULT_CV_SEED = 2020

DEFAULT_ALPHA_GRID = tuple(round(0.05 * i, 2) for i in range(1, 20))


@dataclass(frozen=True)
class SeedLabel:
    user_id: str
    label: int  # LEFT or RIGHT
    origin: str  # politician | hashtag

    def __post_init__(self):
        if self.label not in (LEFT, RIGHT):
            raise ValueError(f"seed label must be -1 or +1, got {self.label}")


@dataclass(frozen=True)
class SpreadConfig:
    alpha: float = 0.85
    tolerance: float = 1e-10
    max_iterations: int = 1000

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0,1), got {self.alpha}")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True)
class LeaningScore:
    user_id: str
    country: str
    score: float  # in [-1, 1]; negative = left-leaning
    is_seed: bool
    origin: str


@dataclass(frozen=True)
class HashtagLexicon:
    left_tags: frozenset[str]
    right_tags: frozenset[str]

    def __post_init__(self):
        clash = self.left_tags & self.right_tags
        if clash:
            raise ValueError(f"hashtags on both sides: {sorted(clash)[:5]}")


def load_seeds(path: str | Path, coverage_threshold: float = 0.40) -> tuple[list[SeedLabel], float]:
    """Load politician seed labels from CSV (user_id,position,has_account).

    Returns the left/right seeds that have accounts plus the account
    coverage over all listed politicians. Center-position politicians are
    never seeded (they have no column in the label matrix) but do count
    toward coverage. Countries under the coverage threshold should be
    rejected by the caller; a warning is logged here.
    """
    seeds: list[SeedLabel] = []
    seen: dict[str, int] = {}
    total = 0
    with_account = 0
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.DictReader(fh), start=2):
            position = row["position"].strip().lower()
            if position not in ("left", "center", "right"):
                raise ValueError(f"{path}:{lineno} unknown position {position!r}")
            has_account = row["has_account"].strip().lower() in ("1", "true", "yes")
            total += 1
            if not has_account:
                continue
            with_account += 1
            if position == "center":
                continue
            label = LEFT if position == "left" else RIGHT
            user_id = row["user_id"].strip()
            if user_id in seen and seen[user_id] != label:
                raise ValueError(f"{path}:{lineno} conflicting labels for {user_id}")
            if user_id not in seen:
                seen[user_id] = label
                seeds.append(SeedLabel(user_id, label, ORIGIN_POLITICIAN))
    if total == 0:
        raise ValueError(f"empty seed file: {path}")
    coverage = with_account / total
    if coverage < coverage_threshold:
        logger.warning(
            "%s: politician account coverage %.1f%% below threshold %.0f%%",
            path, 100 * coverage, 100 * coverage_threshold,
        )
    if not seeds:
        logger.warning("%s: no left/right seeds (all center or without accounts)", path)
    return seeds, coverage


@dataclass(frozen=True)
class NormalizedOperator:
    """Symmetric normalized adjacency with the node ordering it was built on."""

    nodes: tuple[str, ...]
    index: dict[str, int]
    matrix: sp.csr_matrix


def normalize_adjacency(g: WeightedGraph) -> NormalizedOperator:
    """Build S = D^(-1/2) W D^(-1/2) over the graph's nodes (sorted order).

    Spectral radius is at most 1. Raises on isolated (zero-strength) nodes,
    which should have been dropped before spreading.
    """
    nodes = tuple(sorted(g.adj))
    index = {u: i for i, u in enumerate(nodes)}
    strength = np.zeros(len(nodes))
    for u in nodes:
        s = g.strength(u)
        if s <= 0:
            raise ValueError(f"zero-strength node in graph: {u}")
        strength[index[u]] = s
    rows, cols, data = [], [], []
    inv_sqrt = 1.0 / np.sqrt(strength)
    for u, v, w in g.edges():
        i, j = index[u], index[v]
        s_uv = w * inv_sqrt[i] * inv_sqrt[j]
        rows.extend((i, j))
        cols.extend((j, i))
        data.extend((s_uv, s_uv))
    n = len(nodes)
    matrix = sp.csr_matrix(
        (np.asarray(data), (np.asarray(rows), np.asarray(cols))), shape=(n, n)
    )
    return NormalizedOperator(nodes=nodes, index=index, matrix=matrix)


def _seed_matrix(op: NormalizedOperator, seeds: Iterable[SeedLabel]) -> np.ndarray:
    y = np.zeros((len(op.nodes), 2))
    n_left = n_right = 0
    for seed in seeds:
        i = op.index.get(seed.user_id)
        if i is None:
            continue
        if seed.label == LEFT:
            y[i, 0] = 1.0
            n_left += 1
        else:
            y[i, 1] = 1.0
            n_right += 1
    if n_left == 0 or n_right == 0:
        logger.warning(
            "degenerate seeding: %d left / %d right seeds present in graph",
            n_left, n_right,
        )
    return y


def spread_matrix(
    op: NormalizedOperator, seeds: Iterable[SeedLabel], cfg: SpreadConfig
) -> np.ndarray:
    """Iterate F <- alpha*S*F + (1-alpha)*Y to the fixed point.

    Returns the converged (n, 2) score matrix, matching the closed form
    (1-alpha)(I-alpha*S)^(-1)Y within tolerance. Raises ConvergenceError if
    the iteration cap is reached first.
    """
    y = _seed_matrix(op, seeds)
    f = y.copy()
    alpha = cfg.alpha
    base = (1.0 - alpha) * y
    residual = np.inf
    for _ in range(cfg.max_iterations):
        f_next = alpha * (op.matrix @ f) + base
        residual = float(np.max(np.abs(f_next - f)))
        f = f_next
        if residual < cfg.tolerance:
            return f
    raise ConvergenceError(residual, cfg.max_iterations)


def label_spread(
    op: NormalizedOperator, seeds: Iterable[SeedLabel], cfg: SpreadConfig
) -> dict[str, float]:
    """Raw spreading scores in [0,1]: f_right / (f_left + f_right).

    Nodes unreachable from every seed receive no entry at all.
    """
    f = spread_matrix(op, seeds, cfg)
    total = f[:, 0] + f[:, 1]
    return {
        op.nodes[i]: f[i, 1] / total[i]
        for i in np.flatnonzero(total > 0.0)
    }


def rescale(raw: float) -> float:
    """Map a raw [0,1] spreading score onto [-1,1]."""
    if not 0.0 <= raw <= 1.0:
        raise ValueError(f"raw score outside [0,1]: {raw}")
    return 2.0 * raw - 1.0


def spread_scores(
    g: WeightedGraph,
    seeds: Sequence[SeedLabel],
    cfg: SpreadConfig,
    country: str,
    origin: str = ORIGIN_POLITICIAN,
) -> dict[str, LeaningScore]:
    """Run label spreading on a graph and assemble rescaled per-user scores.

    The rescaled score is computed as (f_right-f_left)/(f_right+f_left),
    algebraically identical to rescale(raw) but exactly antisymmetric under
    a left/right label swap.
    """
    op = normalize_adjacency(g)
    f = spread_matrix(op, seeds, cfg)
    seed_ids = {s.user_id for s in seeds}
    total = f[:, 0] + f[:, 1]
    scores: dict[str, LeaningScore] = {}
    for i in np.flatnonzero(total > 0.0):
        user = op.nodes[i]
        value = (f[i, 1] - f[i, 0]) / total[i]
        scores[user] = LeaningScore(user, country, float(value), user in seed_ids, origin)
    return scores


def select_alpha(
    g: WeightedGraph,
    seeds: Sequence[SeedLabel],
    cfg: SpreadConfig | None = None,
    folds: int = 10,
    grid: Sequence[float] = DEFAULT_ALPHA_GRID,
    shuffle_seed: int = DEFAULT_CV_SEED,
) -> tuple[float, float]:
    """Line-search alpha by stratified k-fold cross-validation on the seeds.

    For each alpha, each fold of seeds is held out in turn, labels are
    spread from the rest, and accuracy is the fraction of held-out seeds
    whose score sign matches their label (unreachable seeds count as
    misses). Returns (best_alpha, mean_accuracy); ties go to the smallest
    alpha. Folds are fixed by ``shuffle_seed`` so the search is
    deterministic.
    """
    base = cfg or SpreadConfig()
    in_graph = [s for s in seeds if s.user_id in g.adj]
    left = [s for s in in_graph if s.label == LEFT]
    right = [s for s in in_graph if s.label == RIGHT]
    if len(left) < folds or len(right) < folds:
        raise ValueError(
            f"need at least {folds} seeds per class in the graph, "
            f"got {len(left)} left / {len(right)} right"
        )
    rng = np.random.default_rng(shuffle_seed)
    left = [left[i] for i in rng.permutation(len(left))]
    right = [right[i] for i in rng.permutation(len(right))]
    fold_sets = [left[i::folds] + right[i::folds] for i in range(folds)]

    op = normalize_adjacency(g)
    best_alpha = None
    best_acc = -1.0
    for alpha in grid:
        spread_cfg = SpreadConfig(alpha=alpha, tolerance=base.tolerance,
                                  max_iterations=base.max_iterations)
        accs = []
        for fold in fold_sets:
            heldout = {s.user_id: s.label for s in fold}
            train = [s for s in in_graph if s.user_id not in heldout]
            f = spread_matrix(op, train, spread_cfg)
            correct = 0
            for user, label in heldout.items():
                i = op.index[user]
                diff = f[i, 1] - f[i, 0]
                predicted = int(diff > 0) - int(diff < 0)
                if (f[i, 0] + f[i, 1]) > 0 and predicted == label:
                    correct += 1
            accs.append(correct / len(heldout))
        mean_acc = float(np.mean(accs))
        if mean_acc > best_acc:
            best_alpha, best_acc = alpha, mean_acc
    return best_alpha, best_acc


def load_hashtag_lexicon(left_path: str | Path, right_path: str | Path) -> HashtagLexicon:
    """Load the partisan hashtag lists (one lowercase tag per line)."""

    def read_tags(path):
        with open(path, encoding="utf-8") as fh:
            return frozenset(
                line.strip().lstrip("#").lower() for line in fh if line.strip()
            )

    return HashtagLexicon(left_tags=read_tags(left_path), right_tags=read_tags(right_path))


def count_partisan_hashtags(
    corpus: Iterable[TweetRecord], lex: HashtagLexicon
) -> dict[str, dict[str, int]]:
    """Per-user occurrence counts of lexicon hashtags."""
    counts: dict[str, Counter] = {}
    relevant = lex.left_tags | lex.right_tags
    for rec in corpus:
        for tag in rec.hashtags:
            if tag in relevant:
                counts.setdefault(rec.user_id, Counter())[tag] += 1
    return {u: dict(c) for u, c in counts.items()}


def hashtag_scores(
    user_tag_counts: Mapping[str, Mapping[str, int]],
    lex: HashtagLexicon,
    threshold: float = 0.9,
) -> list[SeedLabel]:
    """Derive seed labels from partisan hashtag usage.

    Per user, with L and R the posted counts of left/right lexicon tags,
    the score is (R-L)/(R+L); users strictly below -threshold become left
    seeds, strictly above +threshold right seeds, everyone else is skipped.
    """
    seeds: list[SeedLabel] = []
    for user in sorted(user_tag_counts):
        tag_counts = user_tag_counts[user]
        l = sum(c for t, c in tag_counts.items() if t in lex.left_tags)
        r = sum(c for t, c in tag_counts.items() if t in lex.right_tags)
        if l + r == 0:
            continue
        score = (r - l) / (r + l)
        if score < -threshold:
            seeds.append(SeedLabel(user, LEFT, ORIGIN_HASHTAG))
        elif score > threshold:
            seeds.append(SeedLabel(user, RIGHT, ORIGIN_HASHTAG))
    return seeds


def compare_seedings(
    scores_a: Mapping[str, float], scores_b: Mapping[str, float]
) -> tuple[int, float]:
    """Sign agreement between two scoring runs over their common users.

    Score 0 counts as its own class. Returns (common_count, agreement).
    """
    common = scores_a.keys() & scores_b.keys()
    if not common:
        raise ValueError("no users scored in both runs")

    def sign(x: float) -> int:
        return (x > 0) - (x < 0)

    agree = sum(1 for u in common if sign(scores_a[u]) == sign(scores_b[u]))
    return len(common), agree / len(common)


def bridging_users(
    geo_users: Mapping[str, GeoUser],
    corpus: Iterable[TweetRecord],
    country_a: str,
    country_b: str,
) -> set[str]:
    """Users located in country_a with >=1 simple retweet of country_b users.

    Directional: swap the arguments for the opposite direction.
    """
    bridges: set[str] = set()
    for rec in corpus:
        if not rec.is_simple_retweet:
            continue
        gu = geo_users.get(rec.user_id)
        gv = geo_users.get(rec.retweeted_user_id)
        if gu is not None and gv is not None:
            if gu.country == country_a and gv.country == country_b:
                bridges.add(rec.user_id)
    return bridges


def attach_cross_country_edges(
    g: WeightedGraph,
    corpus: Iterable[TweetRecord],
    geo_users: Mapping[str, GeoUser],
    country: str,
    foreign_bridges: set[str],
) -> WeightedGraph:
    """Augment a country's (backbone) graph with foreign bridging users.

    Each foreign bridge user is attached via edges counting simple retweets
    (either direction) between them and users of ``country`` already present
    in the graph. Cross edges are added after backbone extraction and are
    not re-filtered. Seeds are unchanged.
    """
    augmented = WeightedGraph(seeds=g.seeds)
    for u, v, w in g.edges():
        augmented.add_edge(u, v, w)
    domestic = g.nodes()
    for rec in corpus:
        if not rec.is_simple_retweet:
            continue
        u, v = rec.user_id, rec.retweeted_user_id
        for bridge, local in ((u, v), (v, u)):
            if bridge in foreign_bridges and local in domestic:
                gu = geo_users.get(local)
                gb = geo_users.get(bridge)
                if gu is not None and gu.country == country and gb is not None and gb.country != country:
                    augmented.add_edge(bridge, local, 1)
                break
    augmented.seeds = g.seeds & augmented.nodes()
    return augmented


def dual_predict(
    bridge_set: set[str],
    graph_a: WeightedGraph,
    seeds_a: Sequence[SeedLabel],
    graph_b: WeightedGraph,
    seeds_b: Sequence[SeedLabel],
    cfg: SpreadConfig,
    country_a: str,
    country_b: str,
) -> tuple[dict[str, tuple[float, float]], int]:
    """Score bridging users independently in two augmented country graphs.

    Both graphs must already carry the bridge users' cross-country edges
    (see attach_cross_country_edges). Users unreachable on either side are
    dropped from the paired output and counted.
    """
    scores_a = spread_scores(graph_a, seeds_a, cfg, country_a)
    scores_b = spread_scores(graph_b, seeds_b, cfg, country_b)
    pairs: dict[str, tuple[float, float]] = {}
    dropped = 0
    for user in sorted(bridge_set):
        sa = scores_a.get(user)
        sb = scores_b.get(user)
        if sa is None or sb is None:
            dropped += 1
            continue
        pairs[user] = (sa.score, sb.score)
    return pairs, dropped


def write_scores(path: str | Path, scores: Mapping[str, LeaningScore]) -> None:
    """Write scores as CSV (user_id,country,score,is_seed,origin)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["user_id", "country", "score", "is_seed", "origin"])
        for user_id in sorted(scores):
            s = scores[user_id]
            writer.writerow([s.user_id, s.country, repr(s.score), int(s.is_seed), s.origin])


def read_scores(path: str | Path) -> dict[str, LeaningScore]:
    """Read a CSV written by write_scores."""
    scores: dict[str, LeaningScore] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            scores[row["user_id"]] = LeaningScore(
                user_id=row["user_id"],
                country=row["country"],
                score=float(row["score"]),
                is_seed=bool(int(row["is_seed"])),
                origin=row["origin"],
            )
    return scores
