"""Pipeline configuration: one JSON document driving every stage.

All relative paths are resolved against the directory containing the config
file, so a fixture bundle stays relocatable. Validation checks that every
referenced input exists before any stage runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .leaning import SpreadConfig


@dataclass
class PipelineConfig:
    corpus_path: Path
    substreams_path: Path
    gazetteer_path: Path
    hashtag_left_path: Path
    hashtag_right_path: Path
    shortener_map_path: Path
    suffix_rules_path: Path
    seeds_paths: dict[str, Path]
    countries: list[str]
    output_dir: Path
    rate_limits_path: Path | None = None
    resolved_cache_path: Path | None = None
    external_scores: dict[str, list[Path]] = field(default_factory=dict)
    spread: SpreadConfig = field(default_factory=SpreadConfig)
    cv_select_alpha: bool = False
    coverage_threshold: float = 0.40
    backbone_threshold: float = 0.05
    min_reach: int = 50
    top_k_domains: int = 50
    profile_k: int = 15
    profile_domains: list[str] = field(default_factory=list)
    rng_seed: int = 0

    def validate(self) -> None:
        if not self.countries:
            raise ConfigError("countries list is empty")
        required = {
            "corpus_path": self.corpus_path,
            "substreams_path": self.substreams_path,
            "gazetteer_path": self.gazetteer_path,
            "hashtag_left_path": self.hashtag_left_path,
            "hashtag_right_path": self.hashtag_right_path,
            "shortener_map_path": self.shortener_map_path,
            "suffix_rules_path": self.suffix_rules_path,
        }
        for name, path in required.items():
            if not path.is_file():
                raise ConfigError(f"{name} does not exist: {path}")
        for country in self.countries:
            if country not in self.seeds_paths:
                raise ConfigError(f"no seed file configured for country {country}")
            if not self.seeds_paths[country].is_file():
                raise ConfigError(f"seed file missing for {country}: {self.seeds_paths[country]}")
        for optional in (self.rate_limits_path, self.resolved_cache_path):
            if optional is not None and not optional.is_file():
                raise ConfigError(f"configured file does not exist: {optional}")
        for country, paths in self.external_scores.items():
            for path in paths:
                if not path.is_file():
                    raise ConfigError(f"external score file missing: {path}")
        if self.min_reach < 1:
            raise ConfigError("min_reach must be >= 1")
        if not 0.0 < self.backbone_threshold < 1.0:
            raise ConfigError("backbone_threshold must be in (0,1)")


def load_config(path: str | Path) -> PipelineConfig:
    """Parse and validate a pipeline config file (JSON)."""
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc

    base = path.resolve().parent

    def resolve(value: str | None) -> Path | None:
        if value is None:
            return None
        p = Path(value)
        return p if p.is_absolute() else base / p

    try:
        spread_raw = raw.get("spread", {})
        cfg = PipelineConfig(
            corpus_path=resolve(raw["corpus_path"]),
            substreams_path=resolve(raw["substreams_path"]),
            gazetteer_path=resolve(raw["gazetteer_path"]),
            hashtag_left_path=resolve(raw["hashtag_left_path"]),
            hashtag_right_path=resolve(raw["hashtag_right_path"]),
            shortener_map_path=resolve(raw["shortener_map_path"]),
            suffix_rules_path=resolve(raw["suffix_rules_path"]),
            seeds_paths={c: resolve(p) for c, p in raw["seeds_paths"].items()},
            countries=list(raw["countries"]),
            output_dir=resolve(raw.get("output_dir", "out")),
            rate_limits_path=resolve(raw.get("rate_limits_path")),
            resolved_cache_path=resolve(raw.get("resolved_cache_path")),
            external_scores={
                c: [resolve(p) for p in paths]
                for c, paths in raw.get("external_scores", {}).items()
            },
            spread=SpreadConfig(
                alpha=float(spread_raw.get("alpha", 0.85)),
                tolerance=float(spread_raw.get("tolerance", 1e-10)),
                max_iterations=int(spread_raw.get("max_iterations", 1000)),
            ),
            cv_select_alpha=bool(raw.get("cv_select_alpha", False)),
            coverage_threshold=float(raw.get("coverage_threshold", 0.40)),
            backbone_threshold=float(raw.get("backbone_threshold", 0.05)),
            min_reach=int(raw.get("min_reach", 50)),
            top_k_domains=int(raw.get("top_k_domains", 50)),
            profile_k=int(raw.get("profile_k", 15)),
            profile_domains=list(raw.get("profile_domains", [])),
            rng_seed=int(raw.get("rng_seed", 0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config {path}: {exc}") from exc
    cfg.validate()
    return cfg
