import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_tweet
from echomap.errors import ConvergenceError
from echomap.geolocate import GeoUser
from echomap.graph import WeightedGraph
from echomap.leaning import (
    LEFT,
    RIGHT,
    HashtagLexicon,
    SeedLabel,
    SpreadConfig,
    attach_cross_country_edges,
    bridging_users,
    compare_seedings,
    count_partisan_hashtags,
    dual_predict,
    hashtag_scores,
    label_spread,
    load_seeds,
    normalize_adjacency,
    read_scores,
    rescale,
    select_alpha,
    spread_matrix,
    spread_scores,
    write_scores,
)
from echomap.synthetic import random_connected_graph


def closed_form(op, seeds, alpha):
    """Dense oracle: F = (1-alpha) (I - alpha S)^-1 Y."""
    n = len(op.nodes)
    y = np.zeros((n, 2))
    for s in seeds:
        if s.user_id in op.index:
            y[op.index[s.user_id], 0 if s.label == LEFT else 1] = 1.0
    s_dense = op.matrix.toarray()
    return (1 - alpha) * np.linalg.solve(np.eye(n) - alpha * s_dense, y)


def seeds_for(graph, n_per_side=1):
    nodes = sorted(graph.adj)
    return (
        [SeedLabel(u, LEFT, "politician") for u in nodes[:n_per_side]]
        + [SeedLabel(u, RIGHT, "politician") for u in nodes[-n_per_side:]]
    )


class TestLoadSeeds:
    def write(self, tmp_path, rows):
        path = tmp_path / "seeds.csv"
        path.write_text(
            "user_id,position,has_account\n" + "".join(",".join(r) + "\n" for r in rows)
        )
        return path

    def test_paper_scale_coverage(self, tmp_path):
        # 609 politicians, 593 with accounts -> coverage 97.4%
        rows = []
        for i in range(609):
            position = "left" if i % 2 == 0 else "right"
            if i % 40 == 0:
                position = "center"
            rows.append((f"p{i}", position, "true" if i < 593 else "false"))
        seeds, coverage = load_seeds(self.write(tmp_path, rows))
        assert coverage == 593 / 609
        assert round(coverage, 3) == 0.974
        assert all(s.label in (LEFT, RIGHT) for s in seeds)

    def test_center_only_gives_empty_seed_set(self, tmp_path):
        path = self.write(tmp_path, [(f"p{i}", "center", "true") for i in range(5)])
        seeds, coverage = load_seeds(path)
        assert seeds == []
        assert coverage == 1.0

    def test_low_coverage_reported(self, tmp_path):
        rows = [(f"p{i}", "left", "true" if i < 3 else "false") for i in range(10)]
        _, coverage = load_seeds(self.write(tmp_path, rows), coverage_threshold=0.4)
        assert coverage == 0.3  # caller rejects the country

    def test_empty_file_is_an_error(self, tmp_path):
        with pytest.raises(ValueError, match="empty"):
            load_seeds(self.write(tmp_path, []))

    def test_conflicting_labels_rejected(self, tmp_path):
        path = self.write(tmp_path, [("p1", "left", "true"), ("p1", "right", "true")])
        with pytest.raises(ValueError, match="conflicting"):
            load_seeds(path)


class TestNormalizeAdjacency:
    def test_single_edge_normalizes_to_one(self):
        g = WeightedGraph.from_edges([("a", "b", 4)])
        op = normalize_adjacency(g)
        i, j = op.index["a"], op.index["b"]
        assert op.matrix[i, j] == 1.0

    def test_path_entry(self):
        g = WeightedGraph.from_edges([("a", "b", 1), ("b", "c", 1)])
        op = normalize_adjacency(g)
        assert op.matrix[op.index["a"], op.index["b"]] == pytest.approx(1 / math.sqrt(2))

    def test_spectral_radius_at_most_one(self):
        rng = np.random.default_rng(5)
        g = random_connected_graph(50, rng)
        op = normalize_adjacency(g)
        eigvals = np.linalg.eigvalsh(op.matrix.toarray())
        assert np.max(np.abs(eigvals)) <= 1.0 + 1e-9

    def test_isolated_node_rejected(self):
        g = WeightedGraph(adj={"a": {}})
        with pytest.raises(ValueError, match="zero-strength"):
            normalize_adjacency(g)


class TestLabelSpread:
    def test_left_only_component_raw_zero(self):
        g = WeightedGraph.from_edges([("seed", "other", 3)])
        op = normalize_adjacency(g)
        raw = label_spread(op, [SeedLabel("seed", LEFT, "politician")], SpreadConfig())
        assert raw["seed"] == 0.0
        assert raw["other"] == 0.0

    def test_symmetric_path_midpoint(self):
        g = WeightedGraph.from_edges([("a", "b", 1), ("b", "c", 1)])
        op = normalize_adjacency(g)
        raw = label_spread(
            op,
            [SeedLabel("a", LEFT, "politician"), SeedLabel("c", RIGHT, "politician")],
            SpreadConfig(alpha=0.5),
        )
        assert raw["b"] == pytest.approx(0.5, abs=1e-12)

    def test_unreachable_nodes_have_no_score(self):
        g = WeightedGraph.from_edges([("a", "b", 1), ("x", "y", 1)])
        op = normalize_adjacency(g)
        raw = label_spread(op, [SeedLabel("a", LEFT, "politician")], SpreadConfig())
        assert set(raw) == {"a", "b"}

    def test_matches_closed_form_within_ten_tolerances(self):
        rng = np.random.default_rng(17)
        for _ in range(6):
            n = int(rng.integers(20, 200))
            g = random_connected_graph(n, rng)
            seeds = seeds_for(g, 5)
            op = normalize_adjacency(g)
            for alpha in (0.1, 0.5, 0.9):
                cfg = SpreadConfig(alpha=alpha)
                f = spread_matrix(op, seeds, cfg)
                expected = closed_form(op, seeds, alpha)
                assert np.max(np.abs(f - expected)) <= 10 * cfg.tolerance

    def test_nonconvergence_raises_with_residual(self):
        rng = np.random.default_rng(2)
        g = random_connected_graph(60, rng)
        op = normalize_adjacency(g)
        cfg = SpreadConfig(alpha=0.9, tolerance=1e-12, max_iterations=3)
        with pytest.raises(ConvergenceError) as err:
            spread_matrix(op, seeds_for(g, 2), cfg)
        assert err.value.residual > 0

    def test_raw_scores_inside_unit_interval(self):
        rng = np.random.default_rng(23)
        g = random_connected_graph(80, rng)
        op = normalize_adjacency(g)
        raw = label_spread(op, seeds_for(g, 4), SpreadConfig(alpha=0.7))
        assert all(0.0 <= v <= 1.0 for v in raw.values())


class TestRescale:
    @pytest.mark.parametrize("raw,expected", [(0.0, -1.0), (0.5, 0.0), (1.0, 1.0)])
    def test_endpoints(self, raw, expected):
        assert rescale(raw) == expected

    def test_domain_error(self):
        with pytest.raises(ValueError):
            rescale(-0.01)
        with pytest.raises(ValueError):
            rescale(1.01)


class TestSpreadScores:
    def test_label_swap_negates_exactly(self):
        rng = np.random.default_rng(31)
        for _ in range(5):
            g = random_connected_graph(40, rng)
            seeds = seeds_for(g, 3)
            flipped = [SeedLabel(s.user_id, -s.label, s.origin) for s in seeds]
            cfg = SpreadConfig(alpha=0.6)
            scores = spread_scores(g, seeds, cfg, "US")
            mirror = spread_scores(g, flipped, cfg, "US")
            assert set(scores) == set(mirror)
            for user in scores:
                assert mirror[user].score == -scores[user].score

    def test_left_only_component_scores_minus_one_exactly(self):
        g = WeightedGraph.from_edges(
            [("s", "a", 2), ("a", "b", 1), ("x", "y", 1), ("y", "z", 3)]
        )
        seeds = [
            SeedLabel("s", LEFT, "politician"),
            SeedLabel("x", RIGHT, "politician"),
        ]
        scores = spread_scores(g, seeds, SpreadConfig(alpha=0.85), "US")
        for user in ("s", "a", "b"):
            assert scores[user].score == -1.0
        for user in ("x", "y", "z"):
            assert scores[user].score == 1.0

    def test_relabeling_permutes_scores(self):
        rng = np.random.default_rng(13)
        g = random_connected_graph(30, rng)
        seeds = seeds_for(g, 2)
        cfg = SpreadConfig(alpha=0.5)
        scores = spread_scores(g, seeds, cfg, "US")

        mapping = {u: f"z{idx:03d}" for idx, u in enumerate(sorted(g.adj, reverse=True))}
        relabeled = WeightedGraph.from_edges(
            (mapping[u], mapping[v], w) for u, v, w in g.edges()
        )
        seeds2 = [SeedLabel(mapping[s.user_id], s.label, s.origin) for s in seeds]
        scores2 = spread_scores(relabeled, seeds2, cfg, "US")
        for user, score in scores.items():
            assert scores2[mapping[user]].score == pytest.approx(score.score, abs=1e-9)

    def test_seed_flag_set(self):
        g = WeightedGraph.from_edges([("s", "a", 1), ("a", "r", 1)])
        seeds = [SeedLabel("s", LEFT, "politician"), SeedLabel("r", RIGHT, "politician")]
        scores = spread_scores(g, seeds, SpreadConfig(), "US")
        assert scores["s"].is_seed and scores["r"].is_seed
        assert not scores["a"].is_seed


class TestSelectAlpha:
    def test_single_value_grid(self):
        rng = np.random.default_rng(41)
        g = random_connected_graph(80, rng)
        seeds = seeds_for(g, 12)
        alpha, _ = select_alpha(g, seeds, folds=10, grid=[0.3])
        assert alpha == 0.3

    def test_deterministic(self):
        rng = np.random.default_rng(43)
        g = random_connected_graph(80, rng)
        seeds = seeds_for(g, 12)
        first = select_alpha(g, seeds, folds=5, grid=[0.2, 0.5, 0.8])
        second = select_alpha(g, seeds, folds=5, grid=[0.2, 0.5, 0.8])
        assert first == second

    def test_too_few_seeds(self):
        rng = np.random.default_rng(47)
        g = random_connected_graph(30, rng)
        with pytest.raises(ValueError, match="seeds per class"):
            select_alpha(g, seeds_for(g, 2), folds=10)


class TestHashtagSeeding:
    LEX = HashtagLexicon(left_tags=frozenset({"blue"}), right_tags=frozenset({"red"}))

    def test_pure_left_user(self):
        seeds = hashtag_scores({"u": {"blue": 5}}, self.LEX)
        assert seeds == [SeedLabel("u", LEFT, "hashtag")]

    def test_balanced_user_excluded(self):
        assert hashtag_scores({"u": {"blue": 5, "red": 5}}, self.LEX) == []

    def test_boundary_is_strict(self):
        # (19-1)/(19+1) = 0.9 exactly: not greater than 0.9, so excluded
        assert hashtag_scores({"u": {"red": 19, "blue": 1}}, self.LEX) == []
        assert hashtag_scores({"u": {"red": 20, "blue": 1}}, self.LEX) == [
            SeedLabel("u", RIGHT, "hashtag")
        ]

    def test_no_lexicon_tags_excluded(self):
        assert hashtag_scores({"u": {"other": 50}}, self.LEX) == []

    @given(r=st.integers(0, 100), l=st.integers(0, 100))
    @settings(max_examples=200, deadline=None)
    def test_antisymmetric_under_swap(self, r, l):
        fwd = hashtag_scores({"u": {"red": r, "blue": l}}, self.LEX)
        rev = hashtag_scores({"u": {"red": l, "blue": r}}, self.LEX)
        fwd_label = fwd[0].label if fwd else 0
        rev_label = rev[0].label if rev else 0
        assert fwd_label == -rev_label

    def test_count_partisan_hashtags(self):
        corpus = [
            make_tweet(tweet_id="t1", user_id="u", hashtags=("blue", "unrelated")),
            make_tweet(tweet_id="t2", user_id="u", hashtags=("blue",)),
            make_tweet(tweet_id="t3", user_id="v", hashtags=("red",)),
        ]
        counts = count_partisan_hashtags(corpus, self.LEX)
        assert counts == {"u": {"blue": 2}, "v": {"red": 1}}

    def test_lexicon_must_be_disjoint(self):
        with pytest.raises(ValueError):
            HashtagLexicon(frozenset({"x"}), frozenset({"x"}))

    def test_bundled_lexicon(self, fixtures_dir):
        from echomap.leaning import load_hashtag_lexicon

        lex = load_hashtag_lexicon(
            fixtures_dir / "hashtags_left.txt", fixtures_dir / "hashtags_right.txt"
        )
        assert len(lex.left_tags) == 314
        assert len(lex.right_tags) == 246
        assert "voteblue" in lex.left_tags
        assert "maga" in lex.right_tags


class TestCompareSeedings:
    def test_identical(self):
        scores = {"a": -0.5, "b": 0.7}
        assert compare_seedings(scores, dict(scores)) == (2, 1.0)

    def test_sign_flipped(self):
        a = {"a": -0.5, "b": 0.7}
        b = {"a": 0.5, "b": -0.7}
        assert compare_seedings(a, b) == (2, 0.0)

    def test_zero_is_its_own_class(self):
        assert compare_seedings({"a": 0.0}, {"a": 0.1}) == (1, 0.0)
        assert compare_seedings({"a": 0.0}, {"a": 0.0}) == (1, 1.0)

    def test_empty_intersection_is_an_error(self):
        with pytest.raises(ValueError):
            compare_seedings({"a": 1.0}, {"b": 1.0})


class TestBridging:
    def geo(self):
        return {
            "a1": GeoUser("a1", "US", "geotag"),
            "a2": GeoUser("a2", "US", "geotag"),
            "b1": GeoUser("b1", "GB", "geotag"),
        }

    def test_no_cross_edges(self):
        corpus = [make_tweet(tweet_id="t1", user_id="a1", retweeted_user_id="a2")]
        assert bridging_users(self.geo(), corpus, "US", "GB") == set()

    def test_planted_bridgers(self):
        geo = {f"u{i}": GeoUser(f"u{i}", "US", "geotag") for i in range(10)}
        geo.update({f"v{i}": GeoUser(f"v{i}", "GB", "geotag") for i in range(3)})
        corpus = [
            make_tweet(tweet_id=f"t{i}", user_id=f"u{i}", retweeted_user_id=f"v{i % 3}")
            for i in range(5)
        ]
        assert bridging_users(geo, corpus, "US", "GB") == {f"u{i}" for i in range(5)}

    def test_directional(self):
        corpus = [make_tweet(tweet_id="t1", user_id="a1", retweeted_user_id="b1")]
        assert bridging_users(self.geo(), corpus, "US", "GB") == {"a1"}
        assert bridging_users(self.geo(), corpus, "GB", "US") == set()

    def test_quote_does_not_bridge(self):
        corpus = [
            make_tweet(tweet_id="t1", user_id="a1", retweeted_user_id="b1", is_quote=True)
        ]
        assert bridging_users(self.geo(), corpus, "US", "GB") == set()


class TestDualPredict:
    def build_country_graph(self, prefix):
        return WeightedGraph.from_edges(
            [
                (f"{prefix}_L", f"{prefix}_m", 2),
                (f"{prefix}_m", f"{prefix}_R", 2),
            ]
        )

    def country_seeds(self, prefix):
        return [
            SeedLabel(f"{prefix}_L", LEFT, "politician"),
            SeedLabel(f"{prefix}_R", RIGHT, "politician"),
        ]

    def test_left_retweeter_scores_left_on_both_sides(self):
        graph_a = self.build_country_graph("a")
        graph_b = self.build_country_graph("b")
        # bridge user retweets each country's left seed only
        graph_a.add_edge("bridge", "a_L", 3)
        graph_b.add_edge("bridge", "b_L", 3)
        cfg = SpreadConfig(alpha=0.5)
        pairs, dropped = dual_predict(
            {"bridge"}, graph_a, self.country_seeds("a"), graph_b,
            self.country_seeds("b"), cfg, "A", "B",
        )
        assert dropped == 0
        sa, sb = pairs["bridge"]
        assert sa < 0 and sb < 0

        # dense-solve oracle for the A-side score
        op = normalize_adjacency(graph_a)
        f = closed_form(op, self.country_seeds("a"), 0.5)
        i = op.index["bridge"]
        expected = (f[i, 1] - f[i, 0]) / (f[i, 0] + f[i, 1])
        assert sa == pytest.approx(expected, abs=1e-8)

    def test_unreachable_side_dropped_and_counted(self):
        graph_a = self.build_country_graph("a")
        graph_a.add_edge("bridge", "a_L", 1)
        graph_b = self.build_country_graph("b")  # bridge absent on side B
        pairs, dropped = dual_predict(
            {"bridge"}, graph_a, self.country_seeds("a"), graph_b,
            self.country_seeds("b"), SpreadConfig(), "A", "B",
        )
        assert pairs == {}
        assert dropped == 1

    def test_empty_bridge_set(self):
        pairs, dropped = dual_predict(
            set(), self.build_country_graph("a"), self.country_seeds("a"),
            self.build_country_graph("b"), self.country_seeds("b"),
            SpreadConfig(), "A", "B",
        )
        assert pairs == {} and dropped == 0


class TestAttachCrossEdges:
    def test_attaches_foreign_bridger(self):
        g = WeightedGraph.from_edges([("us1", "us2", 5)], seeds=["us1"])
        geo = {
            "us1": GeoUser("us1", "US", "geotag"),
            "us2": GeoUser("us2", "US", "geotag"),
            "gb1": GeoUser("gb1", "GB", "geotag"),
        }
        corpus = [
            make_tweet(tweet_id="t1", user_id="gb1", retweeted_user_id="us1"),
            make_tweet(tweet_id="t2", user_id="gb1", retweeted_user_id="us1"),
            make_tweet(tweet_id="t3", user_id="us2", retweeted_user_id="gb1"),
        ]
        augmented = attach_cross_country_edges(g, corpus, geo, "US", {"gb1"})
        assert augmented.weight("gb1", "us1") == 2
        assert augmented.weight("gb1", "us2") == 1
        assert augmented.seeds == {"us1"}
        assert g.n_nodes() == 2  # original untouched

    def test_ignores_users_outside_backbone(self):
        g = WeightedGraph.from_edges([("us1", "us2", 5)])
        geo = {
            "us1": GeoUser("us1", "US", "geotag"),
            "us3": GeoUser("us3", "US", "geotag"),
            "gb1": GeoUser("gb1", "GB", "geotag"),
        }
        corpus = [make_tweet(tweet_id="t1", user_id="gb1", retweeted_user_id="us3")]
        augmented = attach_cross_country_edges(g, corpus, geo, "US", {"gb1"})
        assert "gb1" not in augmented.adj


def test_scores_roundtrip(tmp_path):
    g = WeightedGraph.from_edges([("s", "a", 2), ("a", "r", 3)])
    seeds = [SeedLabel("s", LEFT, "politician"), SeedLabel("r", RIGHT, "politician")]
    scores = spread_scores(g, seeds, SpreadConfig(alpha=0.85), "US")
    path = tmp_path / "scores.csv"
    write_scores(path, scores)
    assert read_scores(path) == scores
