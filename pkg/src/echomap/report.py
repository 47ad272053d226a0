"""Figure-equivalent analytics as plain data.

Everything here is pure over immutable inputs: leaning distributions with
histogram and KDE, language shares, domain rankings, country-centric and
media-centric audience profiles, the reach heatmap, and correlation
validation against external media-bias score files.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import stats as scipy_stats

from .domains import DomainProfile, average_audience_leaning
from .geolocate import GeoUser
from .ingest import TweetRecord
from .leaning import LeaningScore

KDE_GRID_POINTS = 401
HISTOGRAM_BINS = 50

# Ordinal media-bias labels, least to most right-leaning.
ORDINAL_LEVELS = {"L": 1, "CL": 2, "C": 3, "CR": 4, "R": 5, "ER": 6}


def kde_grid() -> np.ndarray:
    """Fixed evaluation grid on [-1, 1] shared by all densities."""
    return np.linspace(-1.0, 1.0, KDE_GRID_POINTS)


def kde_density(values: Sequence[float]) -> list[float] | None:
    """Gaussian KDE with Silverman bandwidth on the fixed grid.

    The curve is renormalized so it integrates to 1 over the grid
    (trapezoid rule), compensating for kernel mass falling outside [-1, 1].
    Returns None when the bandwidth degenerates (fewer than 2 distinct
    values).
    """
    arr = np.asarray(list(values), dtype=float)
    n = arr.size
    if n < 2:
        return None
    std = float(np.std(arr, ddof=1))
    q75, q25 = np.percentile(arr, [75, 25])
    iqr = float(q75 - q25)
    spread = min(std, iqr / 1.34) if iqr > 0 else std
    bandwidth = 0.9 * spread * n ** (-0.2)
    if bandwidth <= 0:
        return None
    grid = kde_grid()
    z = (grid[:, None] - arr[None, :]) / bandwidth
    density = np.exp(-0.5 * z * z).sum(axis=1) / (n * bandwidth * math.sqrt(2 * math.pi))
    total = float(np.trapezoid(density, grid))
    if total <= 0:
        return None
    return list(density / total)


@dataclass(frozen=True)
class DistributionSummary:
    """Per-country summary of the user leaning distribution."""

    country: str
    n_users: int
    n_left: int
    n_right: int
    n_unclassified: int
    histogram_counts: tuple[int, ...]
    histogram_edges: tuple[float, ...]
    kde: tuple[float, ...] | None

    @property
    def frac_left(self) -> float:
        return self.n_left / self.n_users

    @property
    def frac_right(self) -> float:
        return self.n_right / self.n_users

    @property
    def frac_unclassified(self) -> float:
        return self.n_unclassified / self.n_users

    def to_dict(self) -> dict:
        return {
            "country": self.country,
            "n_users": self.n_users,
            "counts": {
                "left": self.n_left,
                "right": self.n_right,
                "unclassified": self.n_unclassified,
            },
            "frac_left": self.frac_left,
            "frac_right": self.frac_right,
            "frac_unclassified": self.frac_unclassified,
            "histogram": {
                "edges": list(self.histogram_edges),
                "counts": list(self.histogram_counts),
            },
            "kde": None if self.kde is None else list(self.kde),
        }


def leaning_distribution(scores: Iterable[LeaningScore], country: str) -> DistributionSummary:
    """Distribution of rescaled leaning scores for one country.

    Users partition into left [-1,0), unclassified {0}, and right (0,1];
    the histogram uses 50 equal bins over [-1,1].
    """
    values = [s.score for s in scores if s.country == country]
    if not values:
        raise ValueError(f"no scored users for country {country}")
    arr = np.asarray(values)
    n_left = int(np.sum(arr < 0))
    n_right = int(np.sum(arr > 0))
    n_zero = int(np.sum(arr == 0))
    counts, edges = np.histogram(arr, bins=HISTOGRAM_BINS, range=(-1.0, 1.0))
    kde = kde_density(values)
    return DistributionSummary(
        country=country,
        n_users=len(values),
        n_left=n_left,
        n_right=n_right,
        n_unclassified=n_zero,
        histogram_counts=tuple(int(c) for c in counts),
        histogram_edges=tuple(float(e) for e in edges),
        kde=None if kde is None else tuple(kde),
    )


def language_shares(
    corpus: Iterable[TweetRecord],
    geo_users: Mapping[str, GeoUser],
    country: str,
    top_k: int = 2,
) -> list[tuple[str, float]]:
    """Most-used tweet languages of a country's geolocated users.

    Fractions are over all tweets by users located in the country; "und"
    counts as its own bucket. Ties break alphabetically.
    """
    counts: dict[str, int] = {}
    total = 0
    for rec in corpus:
        gu = geo_users.get(rec.user_id)
        if gu is not None and gu.country == country:
            counts[rec.lang] = counts.get(rec.lang, 0) + 1
            total += 1
    if total == 0:
        return []
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [(lang, cnt / total) for lang, cnt in ranked[:top_k]]


def top_domains(
    profiles: Mapping[str, DomainProfile],
    country: str | None = None,
    k: int = 50,
) -> list[tuple[str, int]]:
    """Domains ranked by audience reach, descending, ties by name."""
    reaches = [
        (domain, profile.reach(country))
        for domain, profile in profiles.items()
        if profile.reach(country) > 0
    ]
    reaches.sort(key=lambda dr: (-dr[1], dr[0]))
    return reaches[: max(k, 0)]


def country_profile(
    profiles: Mapping[str, DomainProfile],
    country: str,
    k: int = 15,
    min_reach: int = 1,
) -> list[dict]:
    """Ridge-plot data for a country's top media domains.

    The top ``k`` domains by within-country reach (at least ``min_reach``)
    are reordered ascending by mean audience leaning, ties by name. Each row
    carries the raw sharer scores plus the mean line and reach bar.
    """
    eligible = [
        (domain, profile.reach(country))
        for domain, profile in profiles.items()
        if profile.reach(country) >= max(min_reach, 1)
    ]
    eligible.sort(key=lambda dr: (-dr[1], dr[0]))
    rows = []
    for domain, reach in eligible[: max(k, 0)]:
        mean = average_audience_leaning(profiles, domain, country)
        rows.append(
            {
                "domain": domain,
                "reach": reach,
                "mean": mean,
                "scores": profiles[domain].scores(country),
            }
        )
    rows.sort(key=lambda row: (row["mean"], row["domain"]))
    return rows


def media_profile(
    profiles: Mapping[str, DomainProfile],
    domain: str,
    country_order: Sequence[str],
) -> list[dict]:
    """Audience distribution of one domain across countries.

    One row per country with any sharers, in the pipeline's fixed country
    order. Raises KeyError for a domain never shared.
    """
    profile = profiles.get(domain)
    if profile is None or profile.reach() == 0:
        raise KeyError(f"unknown domain: {domain}")
    rows = []
    for country in country_order:
        reach = profile.reach(country)
        if reach == 0:
            continue
        rows.append(
            {
                "country": country,
                "reach": reach,
                "mean": average_audience_leaning(profiles, domain, country),
                "scores": profile.scores(country),
            }
        )
    return rows


def reach_heatmap(
    profiles: Mapping[str, DomainProfile],
    domains: Sequence[str],
    countries: Sequence[str],
    scored_totals: Mapping[str, int],
) -> list[list[float]]:
    """Matrix of reach fractions: kappa(d,l) / scored users in l.

    Rows follow ``domains``, columns follow ``countries``; entries are in
    [0, 1] and a never-shared domain yields an all-zero row.
    """
    matrix = []
    for domain in domains:
        profile = profiles.get(domain)
        row = []
        for country in countries:
            total = scored_totals.get(country, 0)
            reach = 0 if profile is None else profile.reach(country)
            row.append(reach / total if total > 0 else 0.0)
        matrix.append(row)
    return matrix


def _check_pair(x: Sequence[float], y: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.shape != ya.shape or xa.ndim != 1:
        raise ValueError("inputs must be equal-length 1-d sequences")
    if xa.size < 3:
        raise ValueError(f"need at least 3 points, got {xa.size}")
    if np.all(xa == xa[0]) or np.all(ya == ya[0]):
        raise ValueError("degenerate input: zero variance")
    return xa, ya


def pearson(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Product-moment correlation with a two-sided t-test p-value."""
    xa, ya = _check_pair(x, y)
    xm = xa - xa.mean()
    ym = ya - ya.mean()
    sxx = float(np.dot(xm, xm))
    syy = float(np.dot(ym, ym))
    if sxx == 0.0 or syy == 0.0:
        raise ValueError("degenerate input: zero variance")
    r = float(np.dot(xm, ym) / math.sqrt(sxx * syy))
    r = max(-1.0, min(1.0, r))
    n = xa.size
    if abs(r) == 1.0:
        return r, 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    p = 2.0 * float(scipy_stats.t.sf(abs(t), n - 2))
    return r, p


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks; tied values share the mean of their rank range."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size, dtype=float)
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and values[order[j + 1]] == values[order[i]]:
            j += 1
        mean_rank = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = mean_rank
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Rank correlation: Pearson on average ranks (ties get mean rank)."""
    xa, ya = _check_pair(x, y)
    return pearson(_average_ranks(xa), _average_ranks(ya))


@dataclass(frozen=True)
class ExternalScoreFile:
    """A published media-bias score list used for validation."""

    source_name: str
    kind: str  # numeric | ordinal
    entries: dict[str, float] = field(default_factory=dict)


def load_external_scores(path: str | Path, suffix_rules=None) -> ExternalScoreFile:
    """Load a CSV of domain,score,kind,source_name.

    Ordinal rows may carry L/CL/C/CR/R/ER labels, mapped onto ranks 1..6;
    all rows in one file must share kind and source name. When suffix rules
    are given, domains are canonicalized to their registrable form so they
    intersect cleanly with pipeline-extracted domains.
    """
    from .domains import extract_domain

    def canonical(domain: str) -> str:
        domain = domain.strip().lower()
        if suffix_rules is None:
            return domain
        try:
            return extract_domain(f"https://{domain}", suffix_rules)
        except ValueError:
            return domain

    entries: dict[str, float] = {}
    kinds: set[str] = set()
    names: set[str] = set()
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            kind = row["kind"].strip().lower()
            kinds.add(kind)
            names.add(row["source_name"].strip())
            raw = row["score"].strip()
            if kind == "ordinal" and raw.upper() in ORDINAL_LEVELS:
                score = float(ORDINAL_LEVELS[raw.upper()])
            else:
                score = float(raw)
            entries[canonical(row["domain"])] = score
    if len(kinds) != 1 or len(names) != 1:
        raise ValueError(f"{path}: external score file must have one kind and one source")
    kind = kinds.pop()
    if kind not in ("numeric", "ordinal"):
        raise ValueError(f"{path}: unknown score kind {kind!r}")
    return ExternalScoreFile(source_name=names.pop(), kind=kind, entries=entries)


@dataclass(frozen=True)
class CorrelationReport:
    source_name: str
    kind: str  # pearson | spearman
    n_overlap: int
    coverage: float
    coefficient: float
    p_value: float
    pairs: tuple[tuple[str, float, float], ...]  # (domain, external, ours)

    def to_dict(self) -> dict:
        return {
            "source_name": self.source_name,
            "kind": self.kind,
            "n_overlap": self.n_overlap,
            "coverage": self.coverage,
            "coefficient": self.coefficient,
            "p_value": self.p_value,
            "points": [[d, e, o] for d, e, o in self.pairs],
        }


def validate_against(
    profiles: Mapping[str, DomainProfile],
    external: ExternalScoreFile,
    country: str,
    min_reach: int = 50,
) -> CorrelationReport:
    """Correlate our mean audience leanings against an external score list.

    Only domains reaching at least ``min_reach`` users in the country are
    eligible; Pearson is used for numeric external labels, Spearman for
    ordinal ones.
    """
    pairs = []
    for domain in sorted(external.entries):
        profile = profiles.get(domain)
        if profile is None or profile.reach(country) < min_reach:
            continue
        ours = average_audience_leaning(profiles, domain, country)
        if ours is None:
            continue
        pairs.append((domain, external.entries[domain], ours))
    if len(pairs) < 3:
        raise ValueError(
            f"only {len(pairs)} domains overlap {external.source_name} at reach>={min_reach}"
        )
    ext_vals = [p[1] for p in pairs]
    our_vals = [p[2] for p in pairs]
    if external.kind == "numeric":
        coeff, p_value = pearson(ext_vals, our_vals)
        kind = "pearson"
    else:
        coeff, p_value = spearman(ext_vals, our_vals)
        kind = "spearman"
    return CorrelationReport(
        source_name=external.source_name,
        kind=kind,
        n_overlap=len(pairs),
        coverage=len(pairs) / len(external.entries),
        coefficient=coeff,
        p_value=p_value,
        pairs=tuple(pairs),
    )


def render_report_json(report: dict) -> str:
    """Serialize the report bundle with fixed key order for byte-stable output."""
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
