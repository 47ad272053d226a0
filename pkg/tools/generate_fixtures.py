#!/usr/bin/env python3
"""Regenerate the bundled synthetic fixture bundle under fixtures/.

The corpus is fully deterministic and engineered so the pipeline's outputs
are known in advance:

* Three countries (US, ES, TR). Each country's retweet network is two
  disconnected blocks (left/right). Every block is a set of seed hubs in a
  weight-1 ring (those edges survive only through the seed-seed exception)
  plus spokes that retweet their primary seed 25 times (that edge passes
  the disparity filter from the spoke side: p-value 1/26) and a secondary
  seed once (that edge fails and is dropped).
* Consequently the backbone of each country contains exactly the planted
  seeds+spokes, each block scores -1 or +1 exactly, and the left fraction
  equals the planted ratio (US 0.70, ES 0.55, TR 0.40).
* URL shares, shorteners, bridging retweets, geo conflicts, and decoy
  users (multi-country geotags, ambiguous/imaginary profiles, one quote
  tweet) exercise the remaining pipeline paths.

hashtags_left.txt / hashtags_right.txt are static fixtures and are not
rewritten here.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from echomap.geolocate import build_gazetteer, parse_profile_location  # noqa: E402
from echomap.ingest import assign_substreams, load_substreams, parse_tweet  # noqa: E402

HEAVY = 25  # retweets on the spoke->primary-seed edge; p-value 1/26 < 0.05

SUBSTREAMS = [
    {"stream_id": 1,
     "keywords": ["wuhanlockdown", "wuhan", "kungflu", "sinophobia", "n95",
                  "world health organization", "cdc", "outbreak", "epidemic"],
     "languages": []},
    {"stream_id": 2,
     "keywords": ["lockdown", "panic buying", "panicbuying", "socialdistance",
                  "social distance", "socialdistancing", "social distancing"],
     "languages": []},
    {"stream_id": 3, "keywords": ["pandemic", "covd", "ncov"], "languages": ["en", "es"]},
    {"stream_id": 4, "keywords": ["coronavirus"], "languages": ["en"]},
    {"stream_id": 5, "keywords": ["covid"], "languages": ["en"]},
    {"stream_id": 6, "keywords": ["covid–19", "covid—19", "covid19"], "languages": ["en"]},
    {"stream_id": 7,
     "keywords": ["corona", "corona virus", "sars-cov-2", "sarscov2", "koronavirus",
                  "wuhancoronavirus", "wuhanvirus", "wuhan virus", "chinese virus",
                  "chinesevirus", "china"],
     "languages": ["en"]},
    {"stream_id": 8, "keywords": ["coronavirus", "corona", "corona virus"], "languages": ["es"]},
    {"stream_id": 9,
     "keywords": ["covid19", "covid", "covid–19", "covid—19", "sars-cov-2",
                  "sarscov2", "koronavirus", "wuhancoronavirus", "wuhanvirus",
                  "wuhan virus", "chinese virus", "chinesevirus", "china"],
     "languages": ["es"]},
    {"stream_id": 10,
     "keywords": ["coronavirus", "corona", "corona virus", "covid19", "covid",
                  "covid–19", "covid—19", "sars-cov-2", "sarscov2", "koronavirus",
                  "wuhancoronavirus", "wuhanvirus", "wuhan virus", "chinese virus",
                  "chinesevirus", "china"],
     "languages": ["th", "it", "fr", "tr"]},
    {"stream_id": 11,
     "keywords": ["coronavirus", "corona", "corona virus", "covid19", "covid",
                  "covid–19", "covid—19", "sars-cov-2", "sarscov2", "koronavirus",
                  "wuhancoronavirus", "wuhanvirus", "wuhan virus", "chinese virus",
                  "chinesevirus", "china"],
     "languages": ["in", "ko", "ja", "und"]},
    {"stream_id": 12,
     "keywords": ["coronavirus", "corona", "corona virus", "covid19", "covid",
                  "covid–19", "covid—19", "sars-cov-2", "sarscov2", "koronavirus",
                  "wuhancoronavirus", "wuhanvirus", "wuhan virus", "chinese virus",
                  "chinesevirus", "china"],
     "languages": ["pt", "zh", "ar", "de", "tl", "cs", "vi", "pl", "ru", "sr", "el",
                   "nl", "hi", "da", "ro", "is", "no", "hu", "fi", "lv", "et", "bg",
                   "ht", "uk", "lt", "cy", "ka", "ur", "sv", "ta", "sl", "iw", "ne",
                   "fa", "am", "te", "km", "ckb", "hy", "eu", "bn", "si", "my", "pa",
                   "ml", "gu", "kn", "ps", "mr", "sd", "lo", "or", "bo", "ug", "dv", "ca"]},
]

GAZETTEER_ROWS = [
    ("Springfield", "Illinois", "IL", "United States", "US"),
    ("Austin", "Texas", "TX", "United States", "US"),
    ("Portland", "Oregon", "OR", "United States", "US"),
    ("Paris", "Texas", "TX", "United States", "US"),
    ("Madrid", "Comunidad de Madrid", "MD", "Spain", "ES"),
    ("Sevilla", "Andalucia", "AN", "Spain", "ES"),
    ("Valencia", "Comunidad Valenciana", "VC", "Spain", "ES"),
    ("Ankara", "Ankara Province", "06", "Turkey", "TR"),
    ("Izmir", "Izmir Province", "35", "Turkey", "TR"),
    ("Istanbul", "Istanbul Province", "34", "Turkey", "TR"),
    ("Paris", "Ile-de-France", "IDF", "France", "FR"),
    ("Lyon", "Auvergne-Rhone-Alpes", "ARA", "France", "FR"),
    ("Canberra", "Australian Capital Territory", "ACT", "Australia", "AU"),
    ("Sydney", "New South Wales", "NSW", "Australia", "AU"),
    ("London", "Greater London", "LDN", "United Kingdom", "GB"),
    ("London", "Ontario", "ON", "Canada", "CA"),
    ("Toronto", "Ontario", "ON", "Canada", "CA"),
]

SUFFIX_RULES = """\
// synthetic public-suffix snapshot; pinned for reproducible domain extraction
com
org
net
edu
gov
io
co
uk
co.uk
org.uk
gov.uk
ac.uk
au
com.au
net.au
org.au
es
com.es
org.es
tr
com.tr
org.tr
fr
de
ca
us
st
ly
tv
cx
example
*.ck
!www.ck
"""

SHORTENERS = [
    ("wapo.st", "platform", "washingtonpost.com"),
    ("cnb.cx", "platform", "cnbc.com"),
    ("sh.example", "general", ""),
    ("bit.example", "general", ""),
]

TEXT_TEMPLATES = {
    "en": "covid lockdown diary day {n}",
    "es": "coronavirus en casa dia {n}",
    "tr": "coronavirus salgin raporu gun {n}",
    "und": "coronavirus 123 {n}",
}

PROFILE_STRINGS = {
    "US": ["Springfield, IL", "Austin, Texas", "Portland, United States",
           "Austin, TX", "Springfield, Illinois"],
    "ES": ["Madrid, Spain", "Sevilla", "Valencia, ES", "Madrid, Comunidad de Madrid"],
    "TR": ["Ankara, Turkey", "Istanbul", "Izmir, TR"],
}

COUNTRY_PLANS = {
    "US": {"seeds": 5, "spokes_left": 695, "spokes_right": 295,
           "lang_main": "en", "lang_minor": "es",
           "domain_left": "bluebeacon.example", "domain_right": "redledger.example"},
    "ES": {"seeds": 4, "spokes_left": 271, "spokes_right": 221,
           "lang_main": "es", "lang_minor": "en",
           "domain_left": "elfaro.example", "domain_right": "lavoz.example"},
    "TR": {"seeds": 4, "spokes_left": 156, "spokes_right": 236,
           "lang_main": "tr", "lang_minor": "en",
           "domain_left": "gunes.example", "domain_right": "haber.example"},
}

# ten US left spokes get a conflicting foreign profile (geotag must win)
CONFLICT_IDX = set(range(41, 41 + 10 * 13, 13))

LEFT_TAG = "voteblue"
RIGHT_TAG = "maga"


class CorpusBuilder:
    def __init__(self):
        self.records: list[dict] = []
        self.ts = 1_585_000_000
        self.seq = 0
        self.cache: dict[str, str] = {}

    def add(self, user, text, lang, place=None, rt=None, quote=False,
            profile=None, hashtags=(), urls=()):
        self.seq += 1
        self.ts += 3
        rec = {
            "id": f"t{self.seq:07d}",
            "user_id": user,
            "created_at": self.ts,
            "lang": lang,
            "text": text,
            "hashtags": list(hashtags),
            "urls": list(urls),
            "place_country": place,
            "retweeted_user_id": rt,
            "is_quote": quote,
            "profile_location": profile,
        }
        self.records.append(rec)
        return rec


def spoke_urls(country: str, side: str, i: int, plan: dict, builder: CorpusBuilder) -> list[str]:
    urls: list[str] = []

    def short_daily() -> str:
        short = f"https://sh.example/u{country.lower()}{side}{i}"
        builder.cache[short] = f"https://www.dailyglobe.example/story/{country.lower()}{i}"
        return short

    if country == "US":
        if side == "L":
            if i % 2 == 0:
                urls.append(f"https://www.bluebeacon.example/a/{i}")
            if i % 5 == 0:
                urls.append(f"https://wireservice.example/wire/{i}")
            if i % 7 == 0:
                urls.append(f"https://wapo.st/w{i}")
            if i % 21 == 0:
                urls.append(short_daily())
            if i % 11 == 0:
                urls.append(f"https://www.bbc.co.uk/news/{i}")
            if i < 6:
                urls.append(f"https://lowreach.example/p/{i}")
            if 20 <= i < 80:
                urls.append(f"https://blog{(i - 20) // 5}.example/post/{i}")
            if i and i % 101 == 0:
                urls.append(f"https://sh.example/missing{i}")
            if i and i % 97 == 0:
                urls.append("not a url at all")
        else:
            if i % 2 == 0:
                urls.append(f"https://redledger.example/a/{i}")
            if i % 5 == 0:
                urls.append(f"https://wireservice.example/wire/{i}")
                urls.append(short_daily())
            if i % 3 == 0:
                urls.append(f"https://wapo.st/r{i}")
            if i % 29 == 0:
                urls.append(f"https://www.bbc.co.uk/news/r{i}")
            if i < 4:
                urls.append(f"https://lowreach.example/p/r{i}")
            if 20 <= i < 45:
                urls.append(f"https://blog{(i - 20) // 5}.example/post/r{i}")
    elif country == "ES":
        if side == "L":
            if i % 2 == 0:
                urls.append(f"https://elfaro.example/n/{i}")
            if i % 4 == 0:
                urls.append(f"https://wireservice.example/wire/es{i}")
            if i % 19 == 0:
                urls.append(short_daily())
            if i % 13 == 0:
                urls.append(f"https://www.bbc.co.uk/mundo/{i}")
            if 10 <= i < 60:
                urls.append(f"https://noticias{(i - 10) // 5}.example/a/{i}")
        else:
            if i % 2 == 0:
                urls.append(f"https://lavoz.example/n/{i}")
            if i % 4 == 0:
                urls.append(f"https://wireservice.example/wire/esr{i}")
            if 10 <= i < 40:
                urls.append(f"https://gaceta{(i - 10) // 5}.example/a/{i}")
    else:  # TR
        if side == "L":
            if i % 2 == 0:
                urls.append(f"https://gunes.example/h/{i}")
            if i % 4 == 0:
                urls.append(f"https://wireservice.example/wire/tr{i}")
            if i % 17 == 0:
                urls.append(short_daily())
            if 8 <= i < 48:
                urls.append(f"https://gazete{(i - 8) // 5}.example/h/{i}")
        else:
            if i % 2 == 0:
                urls.append(f"https://haber.example/h/{i}")
            if i % 4 == 0:
                urls.append(f"https://wireservice.example/wire/trr{i}")
            if i % 23 == 0:
                urls.append(f"https://www.bbc.co.uk/turkce/{i}")
            if 8 <= i < 38:
                urls.append(f"https://koseyazi{(i - 8) // 5}.example/h/{i}")
    return urls


def build_country(builder: CorpusBuilder, country: str, plan: dict) -> None:
    n_seeds = plan["seeds"]
    profiles = PROFILE_STRINGS[country]

    for side, n_spokes in (("L", plan["spokes_left"]), ("R", plan["spokes_right"])):
        seeds = [f"{country}_S{side}{j}" for j in range(n_seeds)]
        side_domain = plan["domain_left"] if side == "L" else plan["domain_right"]

        for j, seed in enumerate(seeds):
            urls = [f"https://{side_domain}/lead/{j}",
                    f"https://wireservice.example/wire/s{country}{side}{j}"]
            for t in range(3):
                builder.add(
                    seed,
                    TEXT_TEMPLATES[plan["lang_main"]].format(n=t),
                    plan["lang_main"],
                    place=country if t == 0 else None,
                    urls=urls if t == 0 else (),
                )
        # weight-1 ring between seeds: survives only via the seed-seed rule
        for j in range(n_seeds):
            builder.add(
                seeds[(j + 1) % n_seeds],
                "rt: " + TEXT_TEMPLATES[plan["lang_main"]].format(n=j),
                plan["lang_main"],
                rt=seeds[j],
            )

        for i in range(n_spokes):
            user = f"{country}_{side}{i:04d}"
            primary = seeds[i % n_seeds]
            secondary = seeds[(i + 1) % n_seeds]
            geomode = i % 3  # 0 geotag, 1 profile, 2 both
            profile = profiles[i % len(profiles)] if geomode in (1, 2) else None
            conflict = country == "US" and side == "L" and i in CONFLICT_IDX
            if conflict:
                profile = "Madrid, Spain"
            geotag = geomode in (0, 2) or conflict
            urls = spoke_urls(country, side, i, plan, builder)
            tag = LEFT_TAG if side == "L" else RIGHT_TAG
            n_tweets = HEAVY + 1
            for t in range(n_tweets):
                lang = plan["lang_minor"] if t % 10 == 9 else plan["lang_main"]
                if country == "TR" and i % 50 == 0 and t == 3:
                    lang = "und"
                tweet_urls = [u for k, u in enumerate(urls) if k * 3 % n_tweets == t]
                builder.add(
                    user,
                    "rt: " + TEXT_TEMPLATES[lang].format(n=t),
                    lang,
                    place=country if (geotag and t == 0) else None,
                    rt=primary if t < HEAVY else secondary,
                    profile=profile,
                    hashtags=[tag] if country == "US" and t % 8 == 0 else (),
                    urls=tweet_urls,
                )


def build_bridges(builder: CorpusBuilder) -> dict[str, int]:
    bridges = {
        "US->ES": [("US_L0003", "ES_SL0", 2), ("US_L0008", "ES_SL0", 2),
                   ("US_L0013", "ES_SL1", 1), ("US_R0003", "ES_SR0", 1),
                   ("US_R0008", "ES_SR1", 1)],
        "ES->US": [("ES_L0003", "US_SL1", 1), ("ES_L0008", "US_SL0", 1),
                   ("ES_R0003", "US_SR1", 1)],
        "TR->US": [("TR_L0003", "US_SL0", 1)],
    }
    for pairs in bridges.values():
        for user, target, count in pairs:
            for _ in range(count):
                builder.add(user, "rt: covid lockdown abroad", "en", rt=target)
    return {k: len(v) for k, v in bridges.items()}


def build_decoys(builder: CorpusBuilder) -> None:
    for j, (a, b) in enumerate([("US", "ES"), ("US", "TR"), ("ES", "TR")]):
        user = f"mover{j}"
        builder.add(user, TEXT_TEMPLATES["en"].format(n=j), "en", place=a,
                    urls=["https://www.bluebeacon.example/a/decoy"] if j == 0 else ())
        builder.add(user, TEXT_TEMPLATES["en"].format(n=j + 1), "en", place=b)
    for j, prof in enumerate(["Paris", "Paris", "London"]):
        builder.add(f"amb{j}", TEXT_TEMPLATES["en"].format(n=j), "en", profile=prof)
    for j, prof in enumerate(["Mars", "Neverland"]):
        builder.add(f"imag{j}", TEXT_TEMPLATES["en"].format(n=j), "en", profile=prof)
    # quote tweet: must never create a retweet edge
    builder.add("quoter0", "rt: covid lockdown but with commentary", "en",
                rt="US_SL0", quote=True, place="US")


def write_static(out: Path) -> None:
    (out / "substreams.json").write_text(
        json.dumps(SUBSTREAMS, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    with open(out / "gazetteer.csv", "w", encoding="utf-8") as fh:
        fh.write("city,state_name,state_abbrev,country_name,country_code\n")
        for row in GAZETTEER_ROWS:
            fh.write(",".join(row) + "\n")
    (out / "public_suffixes.dat").write_text(SUFFIX_RULES, encoding="utf-8")
    with open(out / "shorteners.csv", "w", encoding="utf-8") as fh:
        fh.write("host,kind,target_domain\n")
        for host, kind, target in SHORTENERS:
            fh.write(f"{host},{kind},{target}\n")


def write_seeds(out: Path) -> None:
    seeds_dir = out / "seeds"
    seeds_dir.mkdir(exist_ok=True)
    for country, plan in COUNTRY_PLANS.items():
        rows = []
        for j in range(plan["seeds"]):
            rows.append((f"{country}_SL{j}", "left", "true"))
            rows.append((f"{country}_SR{j}", "right", "true"))
        rows.append((f"{country}_C0", "center", "true"))
        rows.append((f"{country}_X0", "left", "false"))
        if country == "US":
            rows.append((f"{country}_X1", "right", "false"))
        with open(seeds_dir / f"seeds_{country}.csv", "w", encoding="utf-8") as fh:
            fh.write("user_id,position,has_account\n")
            for row in rows:
                fh.write(",".join(row) + "\n")


def write_external(out: Path) -> None:
    ext = out / "external"
    ext.mkdir(exist_ok=True)
    with open(ext / "us_survey_panel.csv", "w", encoding="utf-8") as fh:
        fh.write("domain,score,kind,source_name\n")
        for domain, score in [
            ("bluebeacon.example", -0.9), ("redledger.example", 0.9),
            ("wireservice.example", -0.3), ("washingtonpost.com", 0.1),
            ("dailyglobe.example", 0.25), ("bbc.co.uk", -0.65),
            ("absent.example", 0.5),
        ]:
            fh.write(f"{domain},{score},numeric,survey_panel\n")
    with open(ext / "us_editorial_board.csv", "w", encoding="utf-8") as fh:
        fh.write("domain,score,kind,source_name\n")
        for domain, label in [
            ("bluebeacon.example", "L"), ("redledger.example", "R"),
            ("wireservice.example", "C"), ("washingtonpost.com", "CL"),
            ("dailyglobe.example", "CR"), ("bbc.co.uk", "CL"),
            ("absent.example", "ER"),
        ]:
            fh.write(f"{domain},{label},ordinal,editorial_board\n")
    with open(ext / "es_reader_survey.csv", "w", encoding="utf-8") as fh:
        fh.write("domain,score,kind,source_name\n")
        for domain, score in [
            ("elfaro.example", -0.7), ("lavoz.example", 0.8),
            ("wireservice.example", -0.05),
        ]:
            fh.write(f"{domain},{score},numeric,reader_survey\n")


def write_rate_limits(out: Path, rng: np.random.Generator) -> None:
    with open(out / "rate_limits.jsonl", "w", encoding="utf-8") as fh:
        for stream in SUBSTREAMS:
            for _ in range(3):
                delivered = int(rng.integers(20_000, 120_000))
                skipped = int(rng.integers(0, delivered // 20))
                fh.write(json.dumps({
                    "stream_id": stream["stream_id"],
                    "delivered_count": delivered,
                    "skipped_count": skipped,
                }) + "\n")


def write_config(out: Path, seed: int) -> None:
    config = {
        "corpus_path": "corpus.jsonl",
        "rate_limits_path": "rate_limits.jsonl",
        "substreams_path": "substreams.json",
        "gazetteer_path": "gazetteer.csv",
        "hashtag_left_path": "hashtags_left.txt",
        "hashtag_right_path": "hashtags_right.txt",
        "shortener_map_path": "shorteners.csv",
        "resolved_cache_path": "resolved_cache.csv",
        "suffix_rules_path": "public_suffixes.dat",
        "seeds_paths": {cc: f"seeds/seeds_{cc}.csv" for cc in COUNTRY_PLANS},
        "external_scores": {
            "US": ["external/us_survey_panel.csv", "external/us_editorial_board.csv"],
            "ES": ["external/es_reader_survey.csv"],
        },
        "countries": list(COUNTRY_PLANS),
        "spread": {"alpha": 0.85, "tolerance": 1e-10, "max_iterations": 1000},
        "cv_select_alpha": False,
        "coverage_threshold": 0.4,
        "backbone_threshold": 0.05,
        "min_reach": 50,
        "top_k_domains": 10,
        "profile_k": 15,
        "profile_domains": ["wireservice.example", "bluebeacon.example"],
        "output_dir": "out",
        "rng_seed": seed,
    }
    (out / "config.json").write_text(
        json.dumps(config, indent=2) + "\n", encoding="utf-8"
    )


def self_check(builder: CorpusBuilder, out: Path) -> None:
    """Every record must parse, match a sub-stream, and planted profiles resolve."""
    streams = load_substreams(out / "substreams.json")
    gaz = build_gazetteer(out / "gazetteer.csv")
    for raw in builder.records:
        rec = parse_tweet(raw)
        assert assign_substreams(rec, streams), f"tweet matches no stream: {raw['text']}"
    for country, strings in PROFILE_STRINGS.items():
        for s in strings:
            assert parse_profile_location(s, gaz) == country, (s, country)
    assert parse_profile_location("Paris", gaz) is None
    assert parse_profile_location("London", gaz) is None
    assert parse_profile_location("Mars", gaz) is None


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(REPO / "fixtures"))
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)

    builder = CorpusBuilder()
    for country, plan in COUNTRY_PLANS.items():
        build_country(builder, country, plan)
    bridge_counts = build_bridges(builder)
    build_decoys(builder)

    write_static(out)
    write_seeds(out)
    write_external(out)
    write_rate_limits(out, rng)
    write_config(out, args.seed)
    with open(out / "resolved_cache.csv", "w", encoding="utf-8") as fh:
        fh.write("short_url,full_url\n")
        for short, full in sorted(builder.cache.items()):
            fh.write(f"{short},{full}\n")

    self_check(builder, out)

    lines = [json.dumps(rec, ensure_ascii=False, sort_keys=True) for rec in builder.records]
    # one in-file duplicate id (first occurrence must win downstream)
    lines.append(json.dumps(builder.records[100], ensure_ascii=False, sort_keys=True))
    malformed = ['{"id": "broken1", "user_id": ', '{"id": "broken2", "user_id": "u0"}']
    with open(out / "corpus.jsonl", "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines[: len(lines) // 2]) + "\n")
        fh.write(malformed[0] + "\n")
        fh.write("\n".join(lines[len(lines) // 2 :]) + "\n")
        fh.write(malformed[1] + "\n")

    scored_ids = set()
    for cc, plan in COUNTRY_PLANS.items():
        for j in range(plan["seeds"]):
            scored_ids.update((f"{cc}_SL{j}", f"{cc}_SR{j}"))
        scored_ids.update(f"{cc}_L{i:04d}" for i in range(plan["spokes_left"]))
        scored_ids.update(f"{cc}_R{i:04d}" for i in range(plan["spokes_right"]))
    url_mentions = sum(len(r["urls"]) for r in builder.records)
    scored_url_pairs = sum(
        len(r["urls"]) for r in builder.records if r["user_id"] in scored_ids
    )

    manifest = {
        "total_lines": len(lines) + len(malformed),
        "malformed_lines": len(malformed),
        "valid_records": len(lines),
        "distinct_tweet_ids": len(builder.records),
        "total_url_mentions": url_mentions,
        "scored_url_pairs": scored_url_pairs,
        "heavy_edge_weight": HEAVY,
        "countries": {
            cc: {
                "seeds_left": plan["seeds"],
                "seeds_right": plan["seeds"],
                "n_scored": 2 * plan["seeds"] + plan["spokes_left"] + plan["spokes_right"],
                "n_left": plan["seeds"] + plan["spokes_left"],
                "n_right": plan["seeds"] + plan["spokes_right"],
                "frac_left": (plan["seeds"] + plan["spokes_left"])
                / (2 * plan["seeds"] + plan["spokes_left"] + plan["spokes_right"]),
            }
            for cc, plan in COUNTRY_PLANS.items()
        },
        "bridges": bridge_counts,
        "planted_conflicts": len(CONFLICT_IDX),
        "low_reach_domain": "lowreach.example",
    }
    (out / "corpus_manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"wrote {len(lines)} corpus lines (+{len(malformed)} malformed) to {out}")


if __name__ == "__main__":
    main()
