import json
from pathlib import Path

import pytest

from echomap.ingest import TweetRecord

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "fixtures"


def make_tweet(
    tweet_id="t1",
    user_id="u1",
    timestamp=1_585_000_000,
    lang="en",
    text="covid lockdown diary",
    hashtags=(),
    urls=(),
    place_country=None,
    retweeted_user_id=None,
    is_quote=False,
    profile_location=None,
) -> TweetRecord:
    return TweetRecord(
        tweet_id=tweet_id,
        user_id=user_id,
        timestamp=timestamp,
        lang=lang,
        text=text,
        hashtags=tuple(hashtags),
        urls=tuple(urls),
        place_country=place_country,
        retweeted_user_id=retweeted_user_id,
        is_quote=is_quote,
        profile_location=profile_location,
    )


def tweet_json(rec: TweetRecord) -> str:
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
        }
    )


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def manifest() -> dict:
    return json.loads((FIXTURES / "corpus_manifest.json").read_text())


@pytest.fixture(scope="session")
def pipeline_run(tmp_path_factory) -> Path:
    """One full pipeline run over the bundled fixtures, shared across tests."""
    from echomap.cli import main

    out = tmp_path_factory.mktemp("pipeline") / "out"
    rc = main(["all", "--config", str(FIXTURES / "config.json"), "--output-dir", str(out)])
    assert rc == 0
    return out
