"""Corpus ingestion: read tweet archives, filter by keyword, replay sub-stream
partitioning, estimate sampling rates, and union sub-streams into one corpus.

The corpus wire format is JSON-lines, one tweet per line, UTF-8:

    {"id": ..., "user_id": ..., "created_at": <epoch secs>, "lang": ...,
     "text": ..., "hashtags": [...], "urls": [...], "place_country": ...,
     "retweeted_user_id": ..., "is_quote": ..., "profile_location": ...}

Keyword matching is plain case-insensitive substring matching (multi-word
keywords match as contiguous substrings).  This is a deliberate superset of
tokenized matching; see README for the rationale.
"""

from __future__ import annotations

import heapq
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TweetRecord:
    """One normalized tweet."""

    tweet_id: str
    user_id: str
    timestamp: int
    lang: str
    text: str
    hashtags: tuple[str, ...]
    urls: tuple[str, ...]
    place_country: str | None = None
    retweeted_user_id: str | None = None
    is_quote: bool = False
    profile_location: str | None = None

    @property
    def is_simple_retweet(self) -> bool:
        """True for retweets without comment (quote tweets do not count)."""
        return self.retweeted_user_id is not None and not self.is_quote


@dataclass(frozen=True)
class SubstreamConfig:
    """One keyword/language sub-stream of the filtered tweet firehose."""

    stream_id: int
    keywords: tuple[str, ...]
    languages: tuple[str, ...] = ()  # empty = all languages

    def __post_init__(self):
        if not self.keywords:
            raise ValueError(f"sub-stream {self.stream_id} has no keywords")


@dataclass(frozen=True)
class RateLimitRecord:
    """Delivered/skipped tweet counts reported for one sub-stream."""

    stream_id: int
    delivered_count: int
    skipped_count: int

    def __post_init__(self):
        if self.delivered_count < 0 or self.skipped_count < 0:
            raise ValueError("rate-limit counts must be non-negative")


def parse_tweet(obj: dict) -> TweetRecord:
    """Build a TweetRecord from one decoded corpus line.

    Raises KeyError/TypeError/ValueError on malformed input; callers that
    tolerate bad lines should catch those and count the line as skipped.
    """
    hashtags = obj["hashtags"]
    urls = obj["urls"]
    if not isinstance(hashtags, list) or not isinstance(urls, list):
        raise TypeError("hashtags and urls must be arrays")
    place = obj["place_country"]
    rt_user = obj["retweeted_user_id"]
    profile = obj["profile_location"]
    return TweetRecord(
        tweet_id=str(obj["id"]),
        user_id=str(obj["user_id"]),
        timestamp=int(obj["created_at"]),
        lang=str(obj["lang"]),
        text=str(obj["text"]),
        hashtags=tuple(str(h).lower() for h in hashtags),
        urls=tuple(str(u) for u in urls),
        place_country=None if place is None else str(place),
        retweeted_user_id=None if rt_user is None else str(rt_user),
        is_quote=bool(obj["is_quote"]),
        profile_location=None if profile is None else str(profile),
    )


def tweet_to_json(rec: TweetRecord) -> str:
    """Inverse of parse_tweet, used when writing stage artifacts."""
    return json.dumps(
        {
            "id": rec.tweet_id,
            "user_id": rec.user_id,
            "created_at": rec.timestamp,
            "lang": rec.lang,
            "text": rec.text,
            "hashtags": list(rec.hashtags),
            "urls": list(rec.urls),
            "place_country": rec.place_country,
            "retweeted_user_id": rec.retweeted_user_id,
            "is_quote": rec.is_quote,
            "profile_location": rec.profile_location,
        },
        ensure_ascii=False,
        sort_keys=True,
    )


class CorpusReader:
    """Lazy reader over a JSON-lines tweet archive.

    Malformed lines are skipped and counted in ``skipped``; an unreadable
    file raises OSError immediately. Iterating twice restarts from the top.
    """

    def __init__(self, path: str | Path, limit: int | None = None):
        self.path = Path(path)
        self.limit = limit
        self.skipped = 0
        self.read = 0
        if not self.path.is_file():
            raise FileNotFoundError(f"corpus file not found: {self.path}")

    def __iter__(self) -> Iterator[TweetRecord]:
        self.skipped = 0
        self.read = 0
        with open(self.path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if self.limit is not None and self.read >= self.limit:
                    return
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = parse_tweet(json.loads(line))
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                    self.skipped += 1
                    logger.warning("%s:%d skipped malformed line (%s)", self.path, lineno, exc)
                    continue
                self.read += 1
                yield rec


def read_corpus(path: str | Path, limit: int | None = None) -> CorpusReader:
    """Open a corpus archive for lazy iteration."""
    return CorpusReader(path, limit=limit)


def match_keywords(text: str, keywords: Iterable[str]) -> bool:
    """Case-insensitive substring match of any keyword against the text.

    Keywords are expected lowercase; multi-word keywords match as contiguous
    substrings of the lowercased text.
    """
    if not text:
        return False
    lowered = text.lower()
    return any(kw in lowered for kw in keywords)


def assign_substreams(tweet: TweetRecord, config: Sequence[SubstreamConfig]) -> set[int]:
    """Sub-streams that would have delivered this tweet.

    A tweet belongs to every sub-stream whose keyword list matches its text
    and whose language list is empty or contains the tweet language.
    """
    assigned = set()
    for stream in config:
        if stream.languages and tweet.lang not in stream.languages:
            continue
        if match_keywords(tweet.text, stream.keywords):
            assigned.add(stream.stream_id)
    return assigned


def load_substreams(path: str | Path) -> list[SubstreamConfig]:
    """Load the sub-stream configuration (JSON array of stream objects)."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    streams = [
        SubstreamConfig(
            stream_id=int(entry["stream_id"]),
            keywords=tuple(str(k).lower() for k in entry["keywords"]),
            languages=tuple(str(l) for l in entry["languages"]),
        )
        for entry in raw
    ]
    ids = [s.stream_id for s in streams]
    if len(ids) != len(set(ids)):
        raise ValueError("duplicate stream_id in sub-stream config")
    return streams


def load_rate_limits(path: str | Path) -> list[RateLimitRecord]:
    """Load the rate-limit sidecar (JSON-lines)."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            records.append(
                RateLimitRecord(
                    stream_id=int(obj["stream_id"]),
                    delivered_count=int(obj["delivered_count"]),
                    skipped_count=int(obj["skipped_count"]),
                )
            )
    return records


def estimate_sampling_rate(records: Sequence[RateLimitRecord], stream_id: int) -> float:
    """Fraction of the stream's tweets that were delivered.

    Aggregates delivered/(delivered+skipped) over all records for the stream.
    A stream with zero recorded traffic reports 1.0 (no evidence of loss).
    """
    delivered = skipped = 0
    found = False
    for rec in records:
        if rec.stream_id == stream_id:
            delivered += rec.delivered_count
            skipped += rec.skipped_count
            found = True
    if not found:
        raise ValueError(f"unknown stream: {stream_id}")
    total = delivered + skipped
    if total == 0:
        return 1.0
    return delivered / total


@dataclass
class DedupStats:
    """Counters produced while merging sub-streams."""

    total_in: int = 0
    duplicates: int = 0
    per_stream: dict[int, int] = field(default_factory=dict)


def union_dedup(
    streams: Sequence[Iterable[TweetRecord]],
    stats: DedupStats | None = None,
) -> Iterator[TweetRecord]:
    """Union timestamp-ordered sub-streams, keeping each tweet_id once.

    Streams are k-way merged by (timestamp, stream index); the first
    occurrence of a tweet_id wins. The surviving id set is independent of
    the order in which streams are passed.
    """
    seen: set[str] = set()

    def _tag(idx: int, stream: Iterable[TweetRecord]) -> Iterator[tuple[tuple, TweetRecord]]:
        for seq, rec in enumerate(stream):
            yield (rec.timestamp, idx, seq), rec

    merged = heapq.merge(*(_tag(idx, s) for idx, s in enumerate(streams)))
    for (_, idx, _seq), rec in merged:
        if stats is not None:
            stats.total_in += 1
            stats.per_stream[idx] = stats.per_stream.get(idx, 0) + 1
        if rec.tweet_id in seen:
            if stats is not None:
                stats.duplicates += 1
            continue
        seen.add(rec.tweet_id)
        yield rec
