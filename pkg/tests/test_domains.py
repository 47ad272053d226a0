
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_tweet
from echomap.domains import (
    DomainProfile,
    Resolution,
    ResolutionStats,
    ShortenerMap,
    SuffixRules,
    audience_reach,
    average_audience_leaning,
    build_domain_profiles,
    collect_user_domains,
    extract_domain,
    extract_user_urls,
    resolve_url,
)
from echomap.leaning import LeaningScore


@pytest.fixture(scope="module")
def rules(fixtures_dir):
    return SuffixRules.load(fixtures_dir / "public_suffixes.dat")


@pytest.fixture(scope="module")
def shortener_map(fixtures_dir):
    return ShortenerMap.load(
        fixtures_dir / "shorteners.csv", fixtures_dir / "resolved_cache.csv"
    )


class TestExtractDomain:
    def test_standard_suffix(self, rules):
        assert extract_domain("https://www.cnn.com/a/b", rules) == "cnn.com"

    def test_country_suffix_stays_distinct(self, rules):
        assert extract_domain("https://www.bbc.co.uk/news", rules) == "bbc.co.uk"
        assert extract_domain("https://www.bbc.com/news", rules) == "bbc.com"

    def test_subdomain_collapses(self, rules):
        # rules oracle by hand: "com" is the longest matching suffix (1 label),
        # so the registrable domain is the last 2 labels
        assert extract_domain("https://edition.cnn.com/x", rules) == "cnn.com"

    def test_wildcard_rule(self, rules):
        assert extract_domain("https://foo.bar.ck/x", rules) == "foo.bar.ck"

    def test_exception_rule(self, rules):
        assert extract_domain("https://www.ck/x", rules) == "www.ck"

    def test_unknown_tld_falls_back_to_two_labels(self, rules):
        assert extract_domain("https://a.b.unknowntld/x", rules) == "b.unknowntld"

    def test_unparseable(self, rules):
        for bad in ("not a url", "https:///path", "https://192.168.0.1/x", "https://com/"):
            with pytest.raises(ValueError):
                extract_domain(bad, rules)

    def test_case_insensitive(self, rules):
        assert extract_domain("https://WWW.CNN.COM/A", rules) == "cnn.com"

    @given(
        st.sampled_from(
            ["cnn.com", "bbc.co.uk", "example.org", "b.unknowntld", "foo.bar.ck"]
        )
    )
    @settings(max_examples=20, deadline=None)
    def test_idempotent_on_own_output(self, rules, domain):
        assert extract_domain(f"https://{domain}", rules) == domain


class TestResolveUrl:
    def test_platform_shortener(self, shortener_map):
        res = resolve_url("https://wapo.st/abc123", shortener_map)
        assert res.status == "platform"
        assert res.domain == "washingtonpost.com"

    def test_cache_hit(self, shortener_map):
        short = next(iter(shortener_map.resolved_cache))
        res = resolve_url(short, shortener_map)
        assert res.status == "resolved"
        assert res.url == shortener_map.resolved_cache[short]

    def test_cache_miss_offline(self, shortener_map):
        res = resolve_url("https://sh.example/never-cached", shortener_map)
        assert res.status == "unresolved"
        assert "cache" in res.reason

    def test_passthrough(self, shortener_map):
        res = resolve_url("https://www.cnn.com/a", shortener_map)
        assert res == Resolution("direct", url="https://www.cnn.com/a")

    def test_general_host_never_resolves_as_platform(self, shortener_map):
        for host in shortener_map.general_hosts:
            res = resolve_url(f"https://{host}/zzz", shortener_map)
            assert res.status != "platform"

    def test_platform_and_general_must_be_disjoint(self):
        with pytest.raises(ValueError):
            ShortenerMap(platform_map={"x.co": "y.com"}, general_hosts={"x.co"})


class TestExtractUserUrls:
    def test_two_urls_two_pairs(self):
        corpus = [make_tweet(tweet_id="t1", user_id="u", urls=("http://a.com", "http://b.com"))]
        assert list(extract_user_urls(corpus, {"u"})) == [
            ("u", "http://a.com"),
            ("u", "http://b.com"),
        ]

    def test_unscored_user_dropped(self):
        corpus = [make_tweet(tweet_id="t1", user_id="u", urls=("http://a.com",))]
        assert list(extract_user_urls(corpus, {"someone_else"})) == []

    def test_bundled_corpus_pair_count(self, pipeline_run, manifest):
        from echomap.ingest import read_corpus
        from echomap.leaning import read_scores

        scored = set()
        for country in ("US", "ES", "TR"):
            scored |= set(read_scores(pipeline_run / "spread" / f"scores_{country}.csv"))
        pairs = list(
            extract_user_urls(read_corpus(pipeline_run / "ingest" / "corpus.jsonl"), scored)
        )
        assert len(pairs) == manifest["scored_url_pairs"]


class TestCollectUserDomains:
    def test_counts_and_mapping(self, shortener_map, rules):
        pairs = [
            ("u1", "https://www.cnn.com/a"),
            ("u1", "https://wapo.st/x"),
            ("u2", "https://sh.example/never-cached"),
            ("u2", "not a url"),
            ("u2", "https://www.cnn.com/b"),
        ]
        stats = ResolutionStats()
        user_domains = collect_user_domains(pairs, shortener_map, rules, stats=stats)
        assert user_domains == {
            "u1": {"cnn.com", "washingtonpost.com"},
            "u2": {"cnn.com"},
        }
        assert stats.direct == 3
        assert stats.platform == 1
        assert stats.unresolved == 1
        assert stats.parse_errors == 1
        assert stats.shortener_success_rate == 0.5


def profile_fixture():
    scores = {}
    user_domains = {}
    for i in range(2):
        user = f"us{i}"
        scores[user] = LeaningScore(user, "US", -0.5, False, "politician")
        user_domains[user] = {"d.example"}
    for i in range(3):
        user = f"es{i}"
        scores[user] = LeaningScore(user, "ES", 0.5, False, "politician")
        user_domains[user] = {"d.example", "other.example"}
    return build_domain_profiles(user_domains, scores), scores


class TestAudienceReach:
    def test_three_sharers(self):
        profiles, _ = profile_fixture()
        assert audience_reach(profiles, "other.example") == 3

    def test_repeat_shares_count_once(self):
        scores = {"u": LeaningScore("u", "US", 0.1, False, "politician")}
        # the same user sharing a domain five times collapses to one set entry
        user_domains = {"u": {"d.example"}}
        profiles = build_domain_profiles(user_domains, scores)
        assert audience_reach(profiles, "d.example") == 1

    def test_partition_identity(self):
        profiles, _ = profile_fixture()
        assert audience_reach(profiles, "d.example") == 5
        assert audience_reach(profiles, "d.example", "US") == 2
        assert audience_reach(profiles, "d.example", "ES") == 3

    def test_unknown_domain_is_zero(self):
        profiles, _ = profile_fixture()
        assert audience_reach(profiles, "nope.example") == 0


class TestAverageLeaning:
    def test_symmetric_pair(self):
        scores = {
            "a": LeaningScore("a", "US", -1.0, False, "p"),
            "b": LeaningScore("b", "US", 1.0, False, "p"),
        }
        profiles = build_domain_profiles({"a": {"d"}, "b": {"d"}}, scores)
        assert average_audience_leaning(profiles, "d") == 0.0

    def test_mean(self):
        scores = {
            "a": LeaningScore("a", "US", -1.0, False, "p"),
            "b": LeaningScore("b", "US", 0.5, False, "p"),
            "c": LeaningScore("c", "US", 0.5, False, "p"),
        }
        profiles = build_domain_profiles({u: {"d"} for u in scores}, scores)
        assert average_audience_leaning(profiles, "d") == 0.0

    def test_min_reach_floor(self):
        profiles, _ = profile_fixture()
        assert average_audience_leaning(profiles, "other.example", min_reach=50) is None
        assert average_audience_leaning(profiles, "other.example", min_reach=3) == 0.5

    def test_sixty_sharer_oracle(self):
        import numpy as np

        rng = np.random.default_rng(60)
        values = [float(v) for v in rng.uniform(-1, 1, size=60)]
        scores = {
            f"u{i}": LeaningScore(f"u{i}", "US", v, False, "p")
            for i, v in enumerate(values)
        }
        profiles = build_domain_profiles({u: {"d"} for u in scores}, scores)
        # independent oracle: plain left-to-right accumulation
        total = 0.0
        for v in values:
            total += v
        oracle = total / len(values)
        assert abs(average_audience_leaning(profiles, "d") - oracle) <= 1e-12

    def test_translation_equivariance(self):
        import numpy as np

        rng = np.random.default_rng(61)
        values = [float(v) for v in rng.uniform(-0.5, 0.5, size=25)]
        shift = 0.25

        def mean_of(vals):
            scores = {
                f"u{i}": LeaningScore(f"u{i}", "US", v, False, "p")
                for i, v in enumerate(vals)
            }
            profiles = build_domain_profiles({u: {"d"} for u in scores}, scores)
            return average_audience_leaning(profiles, "d")

        base = mean_of(values)
        shifted = mean_of([v + shift for v in values])
        assert shifted == pytest.approx(base + shift, abs=1e-12)

    def test_mean_bounded_by_scores(self):
        profiles, scores = profile_fixture()
        mean = average_audience_leaning(profiles, "d.example")
        values = profiles["d.example"].scores()
        assert min(values) <= mean <= max(values)


def test_domain_profile_scores_are_copies():
    profile = DomainProfile("d", {"US": [0.5]})
    listed = profile.scores("US")
    listed.append(99.0)
    assert profile.scores_by_country["US"] == [0.5]


def test_resolution_stats_empty_rate_is_none():
    assert ResolutionStats().shortener_success_rate is None
