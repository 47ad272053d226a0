"""User geolocation from tweet geotags and profile location strings.

Two sources are combined: the country tag of geotagged tweets (high
precision, low coverage) and exact gazetteer matches of the free-text
profile location (higher coverage, noisier). Geotags win all conflicts.

Location strings are canonicalized before any lookup: Unicode NFC,
lowercase, trimmed, runs of whitespace collapsed, commas treated as
separators and collapsed to ", ". Matching is exact on the canonical
form; no fuzzy matching is attempted, and strings whose gazetteer entry
is ambiguous across countries are rejected rather than guessed.
"""

from __future__ import annotations

import csv
import logging
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .ingest import TweetRecord

logger = logging.getLogger(__name__)

SOURCE_GEOTAG = "geotag"
SOURCE_PROFILE = "profile"
SOURCE_MERGED = "merged"


@dataclass(frozen=True)
class GeoUser:
    """A user resolved to exactly one country."""

    user_id: str
    country: str
    source: str  # geotag | profile | merged


def normalize_location(raw: str) -> str:
    """Canonical form used for all gazetteer keys and lookups."""
    text = unicodedata.normalize("NFC", raw).lower()
    parts = [" ".join(chunk.split()) for chunk in text.split(",")]
    return ", ".join(p for p in parts if p)


class Gazetteer:
    """Immutable mapping from canonical location strings to country codes.

    Built once from a city/state/country table and shared read-only across
    workers. Each key maps to the set of countries that could have produced
    it; lookups only succeed when that set is a singleton.
    """

    def __init__(self, entries: Mapping[str, frozenset[str]]):
        self._entries = dict(entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key: str) -> bool:
        return key in self._entries

    def countries_for(self, key: str) -> frozenset[str]:
        return self._entries.get(key, frozenset())

    def items(self):
        return self._entries.items()


def build_gazetteer(csv_path: str | Path) -> Gazetteer:
    """Build the lookup table from a CSV of cities, states, and countries.

    Expected header: city,state_name,state_abbrev,country_name,country_code.
    For every row the builder emits canonical keys for the city alone, the
    city qualified by state or country (full names and abbreviations), the
    bare state, and the bare country. Multi-part keys use the canonical
    ", " separator, so only comma-separated profile strings match them.
    Malformed rows are skipped with a warning.
    """
    entries: dict[str, set[str]] = {}

    def add(key_parts: Iterable[str], country: str) -> None:
        key = normalize_location(", ".join(p for p in key_parts if p))
        if key:
            entries.setdefault(key, set()).add(country)

    with open(csv_path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for lineno, row in enumerate(reader, start=2):
            try:
                city = (row["city"] or "").strip()
                state_name = (row["state_name"] or "").strip()
                state_abbrev = (row["state_abbrev"] or "").strip()
                country_name = (row["country_name"] or "").strip()
                country = (row["country_code"] or "").strip().upper()
            except (KeyError, TypeError):
                logger.warning("%s:%d skipped malformed gazetteer row", csv_path, lineno)
                continue
            if not country:
                logger.warning("%s:%d skipped row without country code", csv_path, lineno)
                continue
            if city:
                add([city], country)
                add([city, state_name], country)
                add([city, state_abbrev], country)
                add([city, country_name], country)
                add([city, country], country)
            if state_name:
                add([state_name], country)
            if state_abbrev:
                add([state_abbrev], country)
            if country_name:
                add([country_name], country)
            add([country], country)

    return Gazetteer({k: frozenset(v) for k, v in entries.items()})


def geotag_users(corpus: Iterable[TweetRecord]) -> dict[str, str]:
    """Map users to the single country of their geotagged tweets.

    Users whose geotags span two or more countries are excluded outright;
    the result is independent of tweet order.
    """
    countries: dict[str, set[str]] = {}
    for rec in corpus:
        if rec.place_country:
            countries.setdefault(rec.user_id, set()).add(rec.place_country)
    return {u: next(iter(cs)) for u, cs in countries.items() if len(cs) == 1}


def parse_profile_location(raw: str | None, gazetteer: Gazetteer) -> str | None:
    """Resolve a profile location string to a country, or None.

    Returns the country only when the canonical string is an exact
    gazetteer key mapping to exactly one country; ambiguous and unknown
    strings return None.
    """
    if not raw:
        return None
    countries = gazetteer.countries_for(normalize_location(raw))
    if len(countries) == 1:
        return next(iter(countries))
    return None


def geoparse_users(corpus: Iterable[TweetRecord], gazetteer: Gazetteer) -> dict[str, str]:
    """Map users to countries parsed from their profile location strings.

    Users whose parsed profile strings disagree across tweets are excluded,
    mirroring the multi-country geotag rule.
    """
    countries: dict[str, set[str]] = {}
    for rec in corpus:
        country = parse_profile_location(rec.profile_location, gazetteer)
        if country is not None:
            countries.setdefault(rec.user_id, set()).add(country)
    return {u: next(iter(cs)) for u, cs in countries.items() if len(cs) == 1}


def merge_locations(
    geotagged: Mapping[str, str], geoparsed: Mapping[str, str]
) -> dict[str, GeoUser]:
    """Merge both sources into one country per user, geotags winning.

    Users present in both maps are tagged ``merged`` regardless of whether
    the sources agreed; single-source users keep that source's tag.
    """
    merged: dict[str, GeoUser] = {}
    for user, country in geotagged.items():
        source = SOURCE_MERGED if user in geoparsed else SOURCE_GEOTAG
        merged[user] = GeoUser(user, country, source)
    for user, country in geoparsed.items():
        if user not in merged:
            merged[user] = GeoUser(user, country, SOURCE_PROFILE)
    return merged


def geoparse_precision(geotagged: Mapping[str, str], geoparsed: Mapping[str, str]) -> float:
    """Fraction of overlapping users whose two sources agree.

    Geotags are treated as ground truth, so this measures geoparsing
    precision on the overlap.
    """
    overlap = geotagged.keys() & geoparsed.keys()
    if not overlap:
        raise ValueError("no overlap between geotagged and geoparsed users")
    agree = sum(1 for u in overlap if geotagged[u] == geoparsed[u])
    return agree / len(overlap)


def write_geo_users(path: str | Path, users: Mapping[str, GeoUser]) -> None:
    """Write the merged user set as CSV (user_id,country,source)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["user_id", "country", "source"])
        for user_id in sorted(users):
            gu = users[user_id]
            writer.writerow([gu.user_id, gu.country, gu.source])


def read_geo_users(path: str | Path) -> dict[str, GeoUser]:
    """Read a CSV written by write_geo_users."""
    users: dict[str, GeoUser] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            users[row["user_id"]] = GeoUser(row["user_id"], row["country"], row["source"])
    return users
