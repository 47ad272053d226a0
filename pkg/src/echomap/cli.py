"""Command-line pipeline runner.

Each stage reads the previous stage's artifacts from the output directory
and writes its own as plain CSV/JSON, so any stage can be re-run and
inspected independently. Re-running a stage over unchanged inputs produces
byte-identical artifacts.

    echomap <stage> --config fixtures/config.json [--country CC]
        [--workers N] [--allow-network] [--seed N] [--output-dir DIR]

Stages: ingest, geolocate, graph, spread, bridge, media, report, all.
Exit codes: 0 success, 1 configuration error, 2 missing prerequisite.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import domains as domains_mod
from . import geolocate as geo_mod
from . import graph as graph_mod
from . import ingest as ingest_mod
from . import leaning as leaning_mod
from . import report as report_mod
from .config import PipelineConfig, load_config
from .errors import ConfigError, MissingArtifactError

logger = logging.getLogger(__name__)

STAGES = ("ingest", "geolocate", "graph", "spread", "bridge", "media", "report")
SCHEMA_VERSION = 1


def _write_json(path: Path, payload: dict) -> None:
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    path.write_text(
        json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


def _require(path: Path, artifact: str) -> Path:
    if not path.is_file():
        raise MissingArtifactError(artifact)
    return path


def _map_countries(
    func: Callable[[str], object], countries: Sequence[str], workers: int
) -> dict[str, object]:
    """Run a per-country job, optionally in parallel; results keyed by country."""
    if workers <= 1 or len(countries) <= 1:
        return {c: func(c) for c in countries}
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(func, countries))
    return dict(zip(countries, results))


class StageRunner:
    """Holds shared context for one CLI invocation."""

    def __init__(
        self,
        cfg: PipelineConfig,
        country_filter: str | None = None,
        workers: int = 1,
        allow_network: bool = False,
    ):
        self.cfg = cfg
        self.workers = max(workers, 1)
        self.allow_network = allow_network
        if country_filter is not None and country_filter not in cfg.countries:
            raise ConfigError(f"--country {country_filter} not in configured countries")
        self.countries = (
            [country_filter] if country_filter is not None else list(cfg.countries)
        )
        self.out = cfg.output_dir

    def _dir(self, stage: str) -> Path:
        path = self.out / stage
        path.mkdir(parents=True, exist_ok=True)
        return path

    # ---------------------------------------------------------------- ingest

    def run_ingest(self) -> None:
        cfg = self.cfg
        out = self._dir("ingest")
        streams_cfg = ingest_mod.load_substreams(cfg.substreams_path)
        reader = ingest_mod.read_corpus(cfg.corpus_path)

        per_stream: dict[int, list[ingest_mod.TweetRecord]] = {
            s.stream_id: [] for s in streams_cfg
        }
        for rec in reader:
            for sid in ingest_mod.assign_substreams(rec, streams_cfg):
                per_stream[sid].append(rec)
        stream_ids = sorted(per_stream)
        for sid in stream_ids:
            per_stream[sid].sort(key=lambda r: (r.timestamp, r.tweet_id))

        stats = ingest_mod.DedupStats()
        n_out = 0
        with open(out / "corpus.jsonl", "w", encoding="utf-8") as fh:
            for rec in ingest_mod.union_dedup(
                [per_stream[sid] for sid in stream_ids], stats=stats
            ):
                fh.write(ingest_mod.tweet_to_json(rec) + "\n")
                n_out += 1

        sampling_rates: dict[str, float] = {}
        rate_records = (
            ingest_mod.load_rate_limits(cfg.rate_limits_path)
            if cfg.rate_limits_path is not None
            else []
        )
        known = {r.stream_id for r in rate_records}
        for sid in stream_ids:
            rate = (
                ingest_mod.estimate_sampling_rate(rate_records, sid)
                if sid in known
                else 1.0
            )
            sampling_rates[str(sid)] = rate

        _write_json(
            out / "stats.json",
            {
                "records_read": reader.read,
                "lines_skipped": reader.skipped,
                "records_out": n_out,
                "duplicates_merged": stats.duplicates,
                "per_stream_counts": {
                    str(sid): len(per_stream[sid]) for sid in stream_ids
                },
                "sampling_rates": sampling_rates,
            },
        )
        logger.info("ingest: %d records out, %d skipped lines", n_out, reader.skipped)

    # ------------------------------------------------------------- geolocate

    def _merged_corpus(self) -> Path:
        return _require(self.out / "ingest" / "corpus.jsonl", "ingest/corpus.jsonl")

    def run_geolocate(self) -> None:
        out = self._dir("geolocate")
        corpus_path = self._merged_corpus()
        gazetteer = geo_mod.build_gazetteer(self.cfg.gazetteer_path)
        geotagged = geo_mod.geotag_users(ingest_mod.read_corpus(corpus_path))
        geoparsed = geo_mod.geoparse_users(ingest_mod.read_corpus(corpus_path), gazetteer)
        merged = geo_mod.merge_locations(geotagged, geoparsed)
        geo_mod.write_geo_users(out / "geo_users.csv", merged)

        overlap = geotagged.keys() & geoparsed.keys()
        precision = geo_mod.geoparse_precision(geotagged, geoparsed) if overlap else None
        per_country: dict[str, int] = {}
        for gu in merged.values():
            per_country[gu.country] = per_country.get(gu.country, 0) + 1
        _write_json(
            out / "stats.json",
            {
                "n_geotagged": len(geotagged),
                "n_geoparsed": len(geoparsed),
                "n_overlap": len(overlap),
                "geoparse_precision": precision,
                "n_merged": len(merged),
                "users_per_country": dict(sorted(per_country.items())),
            },
        )
        logger.info("geolocate: %d users resolved", len(merged))

    # ----------------------------------------------------------------- graph

    def _geo_users(self) -> dict[str, geo_mod.GeoUser]:
        path = _require(self.out / "geolocate" / "geo_users.csv", "geolocate/geo_users.csv")
        return geo_mod.read_geo_users(path)

    def run_graph(self) -> None:
        out = self._dir("graph")
        corpus_path = self._merged_corpus()
        geo_users = self._geo_users()
        corpus = list(ingest_mod.read_corpus(corpus_path))
        backbone_cfg = graph_mod.BackboneConfig(
            significance_threshold=self.cfg.backbone_threshold
        )

        def build(country: str) -> dict:
            seeds, coverage = leaning_mod.load_seeds(
                self.cfg.seeds_paths[country], self.cfg.coverage_threshold
            )
            if coverage < self.cfg.coverage_threshold:
                logger.warning("%s rejected: politician coverage %.2f", country, coverage)
                return {"rejected": True, "coverage": coverage}
            network = graph_mod.build_network(corpus, geo_users, country)
            network.seeds = frozenset(s.user_id for s in seeds) & network.nodes()
            backbone = graph_mod.extract_backbone(network, backbone_cfg)
            graph_mod.write_edges(out / f"network_{country}.csv", network)
            graph_mod.write_seeds(out / f"network_{country}_seeds.txt", network)
            graph_mod.write_edges(out / f"backbone_{country}.csv", backbone)
            graph_mod.write_seeds(out / f"backbone_{country}_seeds.txt", backbone)
            return {
                "rejected": False,
                "coverage": coverage,
                "network_nodes": network.n_nodes(),
                "network_edges": network.n_edges(),
                "backbone_nodes": backbone.n_nodes(),
                "backbone_edges": backbone.n_edges(),
                "seeds_in_network": len(network.seeds),
            }

        results = _map_countries(build, self.countries, self.workers)
        _write_json(out / "stats.json", {"countries": dict(sorted(results.items()))})

    # ---------------------------------------------------------------- spread

    def _backbone(self, country: str) -> graph_mod.WeightedGraph:
        edges = _require(
            self.out / "graph" / f"backbone_{country}.csv", f"graph/backbone_{country}.csv"
        )
        return graph_mod.read_graph(edges, self.out / "graph" / f"backbone_{country}_seeds.txt")

    def run_spread(self) -> None:
        out = self._dir("spread")

        def spread(country: str) -> dict:
            backbone = self._backbone(country)
            seeds, _ = leaning_mod.load_seeds(
                self.cfg.seeds_paths[country], self.cfg.coverage_threshold
            )
            spread_cfg = self.cfg.spread
            cv_info = None
            if self.cfg.cv_select_alpha:
                alpha, acc = leaning_mod.select_alpha(
                    backbone, seeds, cfg=spread_cfg, shuffle_seed=self.cfg.rng_seed
                )
                spread_cfg = leaning_mod.SpreadConfig(
                    alpha=alpha,
                    tolerance=spread_cfg.tolerance,
                    max_iterations=spread_cfg.max_iterations,
                )
                cv_info = {"alpha": alpha, "cv_accuracy": acc}
            scores = leaning_mod.spread_scores(backbone, seeds, spread_cfg, country)
            leaning_mod.write_scores(out / f"scores_{country}.csv", scores)
            n_left = sum(1 for s in scores.values() if s.score < 0)
            n_right = sum(1 for s in scores.values() if s.score > 0)
            return {
                "alpha": spread_cfg.alpha,
                "cv": cv_info,
                "n_scored": len(scores),
                "n_left": n_left,
                "n_right": n_right,
                "n_unclassified": len(scores) - n_left - n_right,
            }

        results = _map_countries(spread, self.countries, self.workers)
        _write_json(out / "stats.json", {"countries": dict(sorted(results.items()))})

    # ---------------------------------------------------------------- bridge

    def _scores(self, country: str) -> dict[str, leaning_mod.LeaningScore]:
        path = _require(
            self.out / "spread" / f"scores_{country}.csv", f"spread/scores_{country}.csv"
        )
        return leaning_mod.read_scores(path)

    def run_bridge(self) -> None:
        out = self._dir("bridge")
        corpus = list(ingest_mod.read_corpus(self._merged_corpus()))
        geo_users = self._geo_users()
        countries = list(self.cfg.countries)

        directional: dict[str, dict] = {}
        bridge_sets: dict[tuple[str, str], set[str]] = {}
        for a in countries:
            for b in countries:
                if a == b:
                    continue
                users = leaning_mod.bridging_users(geo_users, corpus, a, b)
                bridge_sets[(a, b)] = users
                directional[f"{a}->{b}"] = {"count": len(users)}

        pair_stats: dict[str, dict] = {}
        for i, a in enumerate(countries):
            for b in countries[i + 1 :]:
                bridge_set = bridge_sets[(a, b)] | bridge_sets[(b, a)]
                seeds_a, _ = leaning_mod.load_seeds(self.cfg.seeds_paths[a])
                seeds_b, _ = leaning_mod.load_seeds(self.cfg.seeds_paths[b])
                graph_a = leaning_mod.attach_cross_country_edges(
                    self._backbone(a), corpus, geo_users, a, bridge_sets[(b, a)]
                )
                graph_b = leaning_mod.attach_cross_country_edges(
                    self._backbone(b), corpus, geo_users, b, bridge_sets[(a, b)]
                )
                pairs, dropped = leaning_mod.dual_predict(
                    bridge_set, graph_a, seeds_a, graph_b, seeds_b, self.cfg.spread, a, b
                )
                with open(out / f"pairs_{a}_{b}.csv", "w", encoding="utf-8") as fh:
                    fh.write(f"user_id,score_{a},score_{b}\n")
                    for user in sorted(pairs):
                        sa, sb = pairs[user]
                        fh.write(f"{user},{sa!r},{sb!r}\n")
                pair_stats[f"{a}|{b}"] = {
                    "bridge_users": len(bridge_set),
                    "paired": len(pairs),
                    "dropped": dropped,
                }

        _write_json(
            out / "stats.json",
            {"directional_counts": directional, "pairs": pair_stats},
        )

    # ----------------------------------------------------------------- media

    def _all_scores(self) -> dict[str, leaning_mod.LeaningScore]:
        merged: dict[str, leaning_mod.LeaningScore] = {}
        for country in self.cfg.countries:
            merged.update(self._scores(country))
        return merged

    def run_media(self) -> None:
        out = self._dir("media")
        corpus_path = self._merged_corpus()
        scores = self._all_scores()
        shortener_map = domains_mod.ShortenerMap.load(
            self.cfg.shortener_map_path, self.cfg.resolved_cache_path
        )
        rules = domains_mod.SuffixRules.load(self.cfg.suffix_rules_path)
        stats = domains_mod.ResolutionStats()
        pairs = domains_mod.extract_user_urls(
            ingest_mod.read_corpus(corpus_path), set(scores)
        )
        user_domains = domains_mod.collect_user_domains(
            pairs, shortener_map, rules, allow_network=self.allow_network, stats=stats
        )
        profiles = domains_mod.build_domain_profiles(user_domains, scores)

        with open(out / "domain_profiles.csv", "w", encoding="utf-8") as fh:
            fh.write("domain,country,reach,mean_leaning\n")
            for domain in sorted(profiles):
                profile = profiles[domain]
                for country in profile.countries():
                    mean = domains_mod.average_audience_leaning(profiles, domain, country)
                    fh.write(f"{domain},{country},{profile.reach(country)},{mean!r}\n")
        scores_payload = {
            domain: {c: profiles[domain].scores_by_country[c] for c in profiles[domain].countries()}
            for domain in sorted(profiles)
        }
        _write_json(out / "domain_scores.json", {"domains": scores_payload})
        _write_json(
            out / "stats.json",
            {
                "n_sharing_users": len(user_domains),
                "n_domains": len(profiles),
                "resolution": stats.as_dict(),
            },
        )

    # ---------------------------------------------------------------- report

    def _domain_profiles(self) -> dict[str, domains_mod.DomainProfile]:
        path = _require(self.out / "media" / "domain_scores.json", "media/domain_scores.json")
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        profiles: dict[str, domains_mod.DomainProfile] = {}
        for domain, by_country in payload["domains"].items():
            profiles[domain] = domains_mod.DomainProfile(
                domain, {c: list(v) for c, v in by_country.items()}
            )
        return profiles

    def run_report(self) -> None:
        out = self._dir("report")
        cfg = self.cfg
        corpus = list(ingest_mod.read_corpus(self._merged_corpus()))
        geo_users = self._geo_users()
        profiles = self._domain_profiles()
        suffix_rules = domains_mod.SuffixRules.load(cfg.suffix_rules_path)
        ingest_stats = json.loads(
            _require(self.out / "ingest" / "stats.json", "ingest/stats.json").read_text()
        )

        countries_payload: dict[str, dict] = {}
        scored_totals: dict[str, int] = {}
        all_scores: dict[str, leaning_mod.LeaningScore] = {}
        for country in cfg.countries:
            scores = self._scores(country)
            all_scores.update(scores)
            scored_totals[country] = len(scores)
            dist = report_mod.leaning_distribution(scores.values(), country)
            shares = report_mod.language_shares(corpus, geo_users, country, top_k=2)
            ranked = report_mod.top_domains(profiles, country, k=cfg.top_k_domains)
            profile_rows = report_mod.country_profile(profiles, country, k=cfg.profile_k)
            for row in profile_rows:
                row["kde"] = report_mod.kde_density(row["scores"])
                row["histogram"] = _histogram(row["scores"], bins=50, value_range=(-1.0, 1.0))
            validations = []
            for ext_path in cfg.external_scores.get(country, []):
                external = report_mod.load_external_scores(ext_path, suffix_rules)
                try:
                    corr = report_mod.validate_against(
                        profiles, external, country, min_reach=cfg.min_reach
                    )
                except ValueError as exc:
                    validations.append(
                        {"source_name": external.source_name, "error": str(exc)}
                    )
                    continue
                entry = corr.to_dict()
                ext_vals = [p[1] for p in corr.pairs]
                our_vals = [p[2] for p in corr.pairs]
                entry["marginals"] = {
                    "external": _histogram(ext_vals),
                    "ours": _histogram(our_vals),
                }
                validations.append(entry)
            countries_payload[country] = {
                "distribution": dist.to_dict(),
                "language_shares": [[lang, frac] for lang, frac in shares],
                "top_domains": [[d, r] for d, r in ranked],
                "profile": profile_rows,
                "validations": validations,
            }

        media_payload: dict[str, list[dict]] = {}
        for domain in cfg.profile_domains:
            rows = report_mod.media_profile(profiles, domain, cfg.countries)
            for row in rows:
                row["kde"] = report_mod.kde_density(row["scores"])
                row["histogram"] = _histogram(row["scores"], bins=50, value_range=(-1.0, 1.0))
            media_payload[domain] = rows

        global_ranking = report_mod.top_domains(profiles, None, cfg.top_k_domains)
        heat_domains = [d for d, _ in global_ranking]
        first = cfg.countries[0]

        def heat_key(domain: str) -> tuple:
            mean = domains_mod.average_audience_leaning(profiles, domain, first)
            return (mean is None, mean if mean is not None else 0.0, domain)

        heat_domains.sort(key=heat_key)
        heatmap = report_mod.reach_heatmap(profiles, heat_domains, cfg.countries, scored_totals)

        bridge_stats_path = self.out / "bridge" / "stats.json"
        bridges_payload: dict = {}
        if bridge_stats_path.is_file():
            bridge_stats = json.loads(bridge_stats_path.read_text())
            pairs_payload = {}
            for i, a in enumerate(cfg.countries):
                for b in cfg.countries[i + 1 :]:
                    pair_path = self.out / "bridge" / f"pairs_{a}_{b}.csv"
                    if not pair_path.is_file():
                        continue
                    points = []
                    with open(pair_path, encoding="utf-8") as fh:
                        next(fh)
                        for line in fh:
                            user, sa, sb = line.rstrip("\n").split(",")
                            points.append([user, float(sa), float(sb)])
                    pairs_payload[f"{a}|{b}"] = {
                        "points": points,
                        **bridge_stats["pairs"].get(f"{a}|{b}", {}),
                    }
            bridges_payload = {
                "directional_counts": bridge_stats.get("directional_counts", {}),
                "pairs": pairs_payload,
            }

        report = {
            "schema_version": SCHEMA_VERSION,
            "config": {
                "countries": cfg.countries,
                "alpha": cfg.spread.alpha,
                "min_reach": cfg.min_reach,
                "top_k_domains": cfg.top_k_domains,
                "profile_k": cfg.profile_k,
                "rng_seed": cfg.rng_seed,
            },
            "kde_grid": list(report_mod.kde_grid()),
            "sampling_rates": ingest_stats.get("sampling_rates", {}),
            "top_domains_global": [
                {
                    "domain": d,
                    "reach": r,
                    "mean": domains_mod.average_audience_leaning(profiles, d, first),
                }
                for d, r in global_ranking
            ],
            "countries": countries_payload,
            "media_profiles": media_payload,
            "heatmap": {
                "domains": heat_domains,
                "countries": cfg.countries,
                "matrix": heatmap,
                "scored_totals": scored_totals,
            },
            "bridges": bridges_payload,
        }
        (out / "report.json").write_text(
            report_mod.render_report_json(report), encoding="utf-8"
        )

        with open(out / "distributions.csv", "w", encoding="utf-8") as fh:
            fh.write("country,n_users,frac_left,frac_right,frac_unclassified\n")
            for country in cfg.countries:
                d = countries_payload[country]["distribution"]
                fh.write(
                    f"{country},{d['n_users']},{d['frac_left']!r},"
                    f"{d['frac_right']!r},{d['frac_unclassified']!r}\n"
                )
        with open(out / "domains.csv", "w", encoding="utf-8") as fh:
            fh.write("domain,country,reach,mean_leaning\n")
            for domain in sorted(profiles):
                for country in profiles[domain].countries():
                    mean = domains_mod.average_audience_leaning(profiles, domain, country)
                    fh.write(f"{domain},{country},{profiles[domain].reach(country)},{mean!r}\n")
        with open(out / "correlations.csv", "w", encoding="utf-8") as fh:
            fh.write("country,source_name,kind,n_overlap,coverage,coefficient,p_value\n")
            for country in cfg.countries:
                for v in countries_payload[country]["validations"]:
                    if "error" in v:
                        continue
                    fh.write(
                        f"{country},{v['source_name']},{v['kind']},{v['n_overlap']},"
                        f"{v['coverage']!r},{v['coefficient']!r},{v['p_value']!r}\n"
                    )
        logger.info("report: wrote %s", out / "report.json")


def _histogram(
    values: Sequence[float],
    bins: int = 15,
    value_range: tuple[float, float] | None = None,
) -> dict:
    counts, edges = np.histogram(np.asarray(values, dtype=float), bins=bins, range=value_range)
    return {"edges": [float(e) for e in edges], "counts": [int(c) for c in counts]}


def run_stage(stage: str, runner: StageRunner) -> None:
    """Execute one stage (or `all`) against prepared context."""
    sequence = STAGES if stage == "all" else (stage,)
    for name in sequence:
        getattr(runner, f"run_{name}")()


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="echomap",
        description="Retweet-network leaning estimation and media audience profiling",
    )
    parser.add_argument("stage", choices=STAGES + ("all",))
    parser.add_argument("--config", required=True, help="pipeline config (JSON)")
    parser.add_argument("--country", help="restrict per-country stages to one country")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument(
        "--allow-network",
        action="store_true",
        help="permit live resolution of general shortener URLs",
    )
    parser.add_argument("--seed", type=int, help="override the configured rng seed")
    parser.add_argument("--output-dir", help="override the configured output directory")
    parser.add_argument("-v", "--verbose", action="store_true")
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.rng_seed = args.seed
        if args.output_dir is not None:
            cfg.output_dir = Path(args.output_dir)
        runner = StageRunner(
            cfg,
            country_filter=args.country,
            workers=args.workers,
            allow_network=args.allow_network,
        )
        run_stage(args.stage, runner)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except MissingArtifactError as exc:
        print(f"error: {exc} (run the earlier stage first)", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
