"""Shared-URL extraction, shortener resolution, and domain audience profiles.

URLs shared by scored users are mapped to registrable domains (public-suffix
semantics over a bundled rules snapshot), shortened URLs are resolved via a
platform map and an offline cache (live HTTP resolution only behind an
explicit flag), and each domain is profiled by the number and mean leaning
of its sharers per country.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping
from urllib.parse import urlsplit

from .ingest import TweetRecord
from .leaning import LeaningScore

logger = logging.getLogger(__name__)

DIRECT = "direct"
PLATFORM = "platform"
RESOLVED = "resolved"
UNRESOLVED = "unresolved"


class SuffixRules:
    """Public-suffix rules: exact, wildcard (*.x), and exception (!y.x) lines.

    The registrable domain of a host is the public suffix plus one label.
    Hosts with no matching rule fall back to the implicit "*" rule (the
    rightmost label is the suffix).
    """

    def __init__(self, rules: Iterable[str]):
        self.exact: set[tuple[str, ...]] = set()
        self.exceptions: set[tuple[str, ...]] = set()
        for line in rules:
            line = line.strip().lower()
            if not line or line.startswith("//"):
                continue
            if line.startswith("!"):
                self.exceptions.add(tuple(line[1:].split(".")))
            else:
                self.exact.add(tuple(line.split(".")))

    @classmethod
    def load(cls, path: str | Path) -> "SuffixRules":
        with open(path, encoding="utf-8") as fh:
            return cls(fh)

    @staticmethod
    def _matches(rule: tuple[str, ...], labels: tuple[str, ...]) -> bool:
        if len(rule) > len(labels):
            return False
        tail = labels[-len(rule):]
        return all(r == "*" or r == l for r, l in zip(rule, tail))

    def public_suffix_length(self, labels: tuple[str, ...]) -> int:
        """Number of trailing labels forming the public suffix."""
        for rule in self.exceptions:
            if self._matches(rule, labels):
                return len(rule) - 1
        best = 1  # implicit "*" default rule
        for rule in self.exact:
            if len(rule) > best and self._matches(rule, labels):
                best = len(rule)
        return best


def extract_domain(url: str, rules: SuffixRules) -> str:
    """Lowercase registrable domain of a URL (one label + public suffix).

    Raises ValueError for URLs without a usable hostname (no host, IP
    literals, or hosts that are themselves a public suffix).
    """
    host = urlsplit(url).hostname
    if not host:
        raise ValueError(f"URL has no hostname: {url!r}")
    host = host.rstrip(".")
    if not host or ":" in host:
        raise ValueError(f"not a domain name: {url!r}")
    labels = tuple(host.split("."))
    if any(not label for label in labels):
        raise ValueError(f"empty label in hostname: {url!r}")
    if len(labels) > 1 and all(l.isdigit() for l in labels):
        raise ValueError(f"IP address, not a domain: {url!r}")
    ps_len = rules.public_suffix_length(labels)
    if ps_len >= len(labels):
        raise ValueError(f"host is a bare public suffix: {url!r}")
    return ".".join(labels[-(ps_len + 1):])


@dataclass
class ShortenerMap:
    """Shortener knowledge: platform redirect targets and an offline cache."""

    platform_map: dict[str, str] = field(default_factory=dict)
    general_hosts: set[str] = field(default_factory=set)
    resolved_cache: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        clash = set(self.platform_map) & self.general_hosts
        if clash:
            raise ValueError(f"hosts listed as both platform and general: {sorted(clash)}")

    @classmethod
    def load(cls, shorteners_csv: str | Path, cache_csv: str | Path | None = None) -> "ShortenerMap":
        """Load from CSV host,kind(platform|general),target_domain plus an
        optional short_url,full_url cache CSV."""
        platform: dict[str, str] = {}
        general: set[str] = set()
        with open(shorteners_csv, encoding="utf-8", newline="") as fh:
            for row in csv.DictReader(fh):
                host = row["host"].strip().lower()
                kind = row["kind"].strip().lower()
                if kind == "platform":
                    platform[host] = row["target_domain"].strip().lower()
                elif kind == "general":
                    general.add(host)
                else:
                    raise ValueError(f"unknown shortener kind {kind!r} for {host}")
        cache: dict[str, str] = {}
        if cache_csv is not None and Path(cache_csv).is_file():
            with open(cache_csv, encoding="utf-8", newline="") as fh:
                for row in csv.DictReader(fh):
                    cache[row["short_url"].strip()] = row["full_url"].strip()
        return cls(platform_map=platform, general_hosts=general, resolved_cache=cache)


@dataclass(frozen=True)
class Resolution:
    status: str  # direct | platform | resolved | unresolved
    url: str | None = None  # full URL for direct/resolved
    domain: str | None = None  # target domain for platform shorteners
    reason: str | None = None  # failure reason for unresolved


def _follow_redirects(url: str, timeout: float) -> str:
    import urllib.request

    req = urllib.request.Request(url, method="HEAD")
    with urllib.request.urlopen(req, timeout=timeout) as resp:  # nosec: explicit opt-in
        return resp.geturl()


def resolve_url(
    url: str,
    shortener_map: ShortenerMap,
    allow_network: bool = False,
    timeout: float = 5.0,
) -> Resolution:
    """Resolve one shared URL against the shortener map.

    Non-shortener URLs pass through untouched; platform shorteners map
    straight to their publisher domain; general shorteners consult the
    offline cache and only touch the network when ``allow_network`` is set.
    """
    host = urlsplit(url).hostname
    if host:
        host = host.lower()
        bare = host[4:] if host.startswith("www.") else host
    else:
        bare = None
    for candidate in (host, bare):
        if candidate is None:
            continue
        if candidate in shortener_map.platform_map:
            return Resolution(PLATFORM, domain=shortener_map.platform_map[candidate])
        if candidate in shortener_map.general_hosts:
            cached = shortener_map.resolved_cache.get(url)
            if cached is not None:
                return Resolution(RESOLVED, url=cached)
            if not allow_network:
                return Resolution(UNRESOLVED, reason="network disabled and no cache entry")
            try:
                return Resolution(RESOLVED, url=_follow_redirects(url, timeout))
            except Exception as exc:  # timeouts, dead shorteners, bad redirects
                return Resolution(UNRESOLVED, reason=str(exc))
    return Resolution(DIRECT, url=url)


def extract_user_urls(
    corpus: Iterable[TweetRecord], scored_users: set[str]
) -> Iterator[tuple[str, str]]:
    """(user_id, url) pairs for every URL shared by a scored user."""
    for rec in corpus:
        if rec.user_id in scored_users:
            for url in rec.urls:
                yield rec.user_id, url


@dataclass
class ResolutionStats:
    direct: int = 0
    platform: int = 0
    cache_hits: int = 0
    network_resolved: int = 0
    unresolved: int = 0
    parse_errors: int = 0

    @property
    def shortened(self) -> int:
        return self.platform + self.cache_hits + self.network_resolved + self.unresolved

    @property
    def shortener_success_rate(self) -> float | None:
        """Fraction of shortened URLs resolved to a domain; None if none seen."""
        if self.shortened == 0:
            return None
        return (self.platform + self.cache_hits + self.network_resolved) / self.shortened

    def as_dict(self) -> dict:
        return {
            "direct": self.direct,
            "platform": self.platform,
            "cache_hits": self.cache_hits,
            "network_resolved": self.network_resolved,
            "unresolved": self.unresolved,
            "parse_errors": self.parse_errors,
            "shortener_success_rate": self.shortener_success_rate,
        }


def collect_user_domains(
    pairs: Iterable[tuple[str, str]],
    shortener_map: ShortenerMap,
    rules: SuffixRules,
    allow_network: bool = False,
    stats: ResolutionStats | None = None,
) -> dict[str, set[str]]:
    """Fold (user, url) pairs into per-user sets of registrable domains."""
    user_domains: dict[str, set[str]] = {}
    for user, url in pairs:
        res = resolve_url(url, shortener_map, allow_network=allow_network)
        if res.status == UNRESOLVED:
            if stats is not None:
                stats.unresolved += 1
            continue
        if res.status == PLATFORM:
            if stats is not None:
                stats.platform += 1
            domain = res.domain
        else:
            if stats is not None:
                if res.status == DIRECT:
                    stats.direct += 1
                elif url in shortener_map.resolved_cache:
                    stats.cache_hits += 1
                else:
                    stats.network_resolved += 1
            try:
                domain = extract_domain(res.url, rules)
            except ValueError as exc:
                if stats is not None:
                    stats.parse_errors += 1
                logger.debug("dropped unparseable URL: %s", exc)
                continue
        user_domains.setdefault(user, set()).add(domain)
    return user_domains


@dataclass
class DomainProfile:
    """Audience of one domain: sharer leaning scores grouped by country."""

    domain: str
    scores_by_country: dict[str, list[float]] = field(default_factory=dict)

    def reach(self, country: str | None = None) -> int:
        if country is not None:
            return len(self.scores_by_country.get(country, ()))
        return sum(len(v) for v in self.scores_by_country.values())

    def scores(self, country: str | None = None) -> list[float]:
        if country is not None:
            return list(self.scores_by_country.get(country, ()))
        return [s for c in sorted(self.scores_by_country) for s in self.scores_by_country[c]]

    def countries(self) -> list[str]:
        return sorted(self.scores_by_country)


def build_domain_profiles(
    user_domains: Mapping[str, set[str]],
    scores: Mapping[str, LeaningScore],
) -> dict[str, DomainProfile]:
    """Aggregate per-user domain sets into per-domain audience profiles.

    Every sharer contributes at most one score per domain (set semantics),
    keyed by the country their leaning was estimated in.
    """
    profiles: dict[str, DomainProfile] = {}
    for user in sorted(user_domains):
        score = scores.get(user)
        if score is None:
            continue
        for domain in sorted(user_domains[user]):
            profile = profiles.setdefault(domain, DomainProfile(domain))
            profile.scores_by_country.setdefault(score.country, []).append(score.score)
    return profiles


def audience_reach(
    profiles: Mapping[str, DomainProfile], domain: str, country: str | None = None
) -> int:
    """Unique scored sharers of a domain, optionally within one country."""
    profile = profiles.get(domain)
    return 0 if profile is None else profile.reach(country)


def average_audience_leaning(
    profiles: Mapping[str, DomainProfile],
    domain: str,
    country: str | None = None,
    min_reach: int = 1,
) -> float | None:
    """Mean sharer leaning for a domain, or None below the reach floor."""
    profile = profiles.get(domain)
    if profile is None:
        return None
    values = profile.scores(country)
    if len(values) < min_reach or not values:
        return None
    return math.fsum(values) / len(values)
