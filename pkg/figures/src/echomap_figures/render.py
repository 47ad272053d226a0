"""Build matplotlib figures from a report bundle.

Every figure kind consumes data the pipeline already computed: KDE curves
on the shared grid, histogram counts, reach rankings, correlation point
sets, and the reach matrix. Blue encodes left-leaning, red right-leaning.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.gridspec import GridSpec, GridSpecFromSubplotSpec  # noqa: E402

COLOR_LEFT = "#2f6fb4"
COLOR_RIGHT = "#c03a3a"
COLOR_NEUTRAL = "#8a8a8a"

KINDS = (
    "density_panel",
    "country_ridge",
    "media_ridge",
    "validation_scatter",
    "heatmap",
    "top_domains_bar",
)

REQUIRED_SECTIONS = ("schema_version", "kde_grid", "countries", "heatmap",
                     "media_profiles", "top_domains_global")


class ReportSchemaError(Exception):
    """The report file does not carry the sections a figure kind needs."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    report_path: Path
    out_path: Path
    country: str | None = None
    domain: str | None = None
    width: float | None = None
    height: float | None = None
    color_left: str = COLOR_LEFT
    color_right: str = COLOR_RIGHT

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ReportSchemaError(f"unknown figure kind: {self.kind}")


def load_report(path: str | Path) -> dict:
    with open(path, encoding="utf-8") as fh:
        report = json.load(fh)
    missing = [key for key in REQUIRED_SECTIONS if key not in report]
    if missing:
        raise ReportSchemaError(f"report is missing sections: {missing}")
    return report


def _placeholder(ax, label: str) -> None:
    warnings.warn(f"empty data series, rendered placeholder: {label}")
    ax.text(0.5, 0.5, f"no data\n{label}", ha="center", va="center",
            transform=ax.transAxes, fontsize=9, color=COLOR_NEUTRAL)
    ax.set_xticks([])
    ax.set_yticks([])


def _split_density(ax, grid, density, spec, baseline=0.0, scale=1.0):
    grid = np.asarray(grid)
    density = np.asarray(density, dtype=float)
    top = baseline + density * scale
    left = grid <= 0
    right = grid >= 0
    ax.fill_between(grid[left], baseline, top[left], color=spec.color_left, alpha=0.75, lw=0)
    ax.fill_between(grid[right], baseline, top[right], color=spec.color_right, alpha=0.75, lw=0)
    ax.plot(grid, top, color="black", lw=0.4)


def _density_panel(report: dict, spec: FigureSpec):
    countries = list(report["countries"])
    if not countries:
        raise ReportSchemaError("report carries no countries")
    grid = report["kde_grid"]
    ncols = min(4, len(countries))
    nrows = (len(countries) + ncols - 1) // ncols
    fig, axes = plt.subplots(
        nrows, ncols,
        figsize=(spec.width or 3.2 * ncols, spec.height or 2.6 * nrows),
        squeeze=False,
    )
    panels = 0
    for idx, country in enumerate(countries):
        ax = axes[idx // ncols][idx % ncols]
        dist = report["countries"][country]["distribution"]
        label = (
            f"{country}\nn={dist['n_users']}, "
            f"L={dist['frac_left']:.1%}, R={dist['frac_right']:.1%}"
        )
        if dist.get("kde"):
            _split_density(ax, grid, dist["kde"], spec)
            panels += 1
        elif sum(dist["histogram"]["counts"]) > 0:
            edges = np.asarray(dist["histogram"]["edges"])
            centers = (edges[:-1] + edges[1:]) / 2
            colors = [spec.color_left if c < 0 else spec.color_right for c in centers]
            ax.bar(centers, dist["histogram"]["counts"], width=edges[1] - edges[0],
                   color=colors)
            panels += 1
        else:
            _placeholder(ax, country)
            continue
        ax.set_title(label, fontsize=8)
        ax.set_xlim(-1, 1)
        ax.set_yticks([])
    for idx in range(len(countries), nrows * ncols):
        axes[idx // ncols][idx % ncols].axis("off")
    fig.suptitle("user leaning density by country", fontsize=10)
    fig.tight_layout()
    return fig, {"panels": panels}


def _ridge(rows, labels, grid, spec, reach_log=False, title=""):
    n = len(rows)
    fig = plt.figure(figsize=(spec.width or 7.5, spec.height or max(2.5, 0.55 * n + 1)))
    gs = GridSpec(1, 2, width_ratios=[3, 1], figure=fig, wspace=0.05)
    ax = fig.add_subplot(gs[0])
    ax_reach = fig.add_subplot(gs[1], sharey=ax)
    drawn = 0
    for idx, row in enumerate(rows):
        baseline = n - 1 - idx
        kde = row.get("kde")
        hist = row.get("histogram")
        if kde:
            peak = max(kde)
            scale = 0.85 / peak if peak > 0 else 0.0
            _split_density(ax, grid, kde, spec, baseline=baseline, scale=scale)
        elif hist and sum(hist["counts"]) > 0:
            edges = np.asarray(hist["edges"])
            centers = (edges[:-1] + edges[1:]) / 2
            counts = np.asarray(hist["counts"], dtype=float)
            heights = counts / counts.max() * 0.85
            colors = [spec.color_left if c < 0 else spec.color_right for c in centers]
            ax.bar(centers, heights, bottom=baseline, width=edges[1] - edges[0],
                   color=colors, alpha=0.75)
        else:
            _placeholder_row(ax, baseline, labels[idx])
        mean = row.get("mean")
        if mean is not None:
            ax.plot([mean, mean], [baseline, baseline + 0.85], color="black", lw=1.2)
        ax_reach.barh(baseline + 0.4, row["reach"], height=0.7, color=COLOR_NEUTRAL)
        drawn += 1
    ax.set_yticks([n - 1 - i + 0.4 for i in range(n)])
    ax.set_yticklabels(labels, fontsize=8)
    ax.set_xlim(-1.05, 1.05)
    ax.set_xlabel("audience leaning")
    ax.set_title(title, fontsize=10)
    if reach_log:
        ax_reach.set_xscale("log")
    ax_reach.set_xlabel("audience reach")
    ax_reach.tick_params(labelleft=False)
    fig.tight_layout()
    return fig, {"rows": drawn}


def _placeholder_row(ax, baseline, label):
    warnings.warn(f"empty data series, rendered placeholder: {label}")
    ax.plot([-1, 1], [baseline, baseline], color=COLOR_NEUTRAL, lw=0.8, ls=":")


def _country_ridge(report: dict, spec: FigureSpec):
    if spec.country is None:
        raise ReportSchemaError("country_ridge requires a country")
    country = report["countries"].get(spec.country)
    if country is None:
        raise ReportSchemaError(f"report has no country section: {spec.country}")
    rows = country["profile"]
    if not rows:
        raise ReportSchemaError(f"empty media profile for {spec.country}")
    labels = [f"{r['domain']} ({r['reach']})" for r in rows]
    return _ridge(
        rows, labels, report["kde_grid"], spec,
        title=f"top media audiences in {spec.country}",
    )


def _media_ridge(report: dict, spec: FigureSpec):
    if spec.domain is None:
        raise ReportSchemaError("media_ridge requires a domain")
    rows = report["media_profiles"].get(spec.domain)
    if rows is None:
        raise ReportSchemaError(f"report has no media profile for: {spec.domain}")
    labels = [f"{r['country']} ({r['reach']})" for r in rows]
    return _ridge(
        rows, labels, report["kde_grid"], spec, reach_log=True,
        title=f"{spec.domain} audience by country",
    )


def _validation_scatter(report: dict, spec: FigureSpec):
    if spec.country is None:
        raise ReportSchemaError("validation_scatter requires a country")
    country = report["countries"].get(spec.country)
    if country is None:
        raise ReportSchemaError(f"report has no country section: {spec.country}")
    entries = [v for v in country["validations"] if "points" in v]
    fig = plt.figure(figsize=(spec.width or 4.2 * max(len(entries), 1),
                              spec.height or 4.4))
    meta = {"points": []}
    if not entries:
        ax = fig.add_subplot(111)
        _placeholder(ax, f"no validations for {spec.country}")
        return fig, meta
    outer = GridSpec(1, len(entries), figure=fig, wspace=0.3)
    for idx, entry in enumerate(entries):
        inner = GridSpecFromSubplotSpec(
            2, 2, subplot_spec=outer[idx],
            width_ratios=[4, 1], height_ratios=[1, 4], hspace=0.04, wspace=0.04,
        )
        ax = fig.add_subplot(inner[1, 0])
        ax_top = fig.add_subplot(inner[0, 0], sharex=ax)
        ax_right = fig.add_subplot(inner[1, 1], sharey=ax)
        xs = [p[1] for p in entry["points"]]
        ys = [p[2] for p in entry["points"]]
        colors = [spec.color_left if y < 0 else spec.color_right for y in ys]
        ax.scatter(xs, ys, s=18, c=colors, edgecolors="black", linewidths=0.3)
        ax.set_xlabel(f"{entry['source_name']} score", fontsize=8)
        ax.set_ylabel("average audience leaning", fontsize=8)
        for hist_ax, key, orient in ((ax_top, "external", "v"), (ax_right, "ours", "h")):
            marg = entry.get("marginals", {}).get(key)
            if marg:
                edges = np.asarray(marg["edges"])
                centers = (edges[:-1] + edges[1:]) / 2
                size = edges[1] - edges[0]
                if orient == "v":
                    hist_ax.bar(centers, marg["counts"], width=size, color=COLOR_NEUTRAL)
                else:
                    hist_ax.barh(centers, marg["counts"], height=size, color=COLOR_NEUTRAL)
            hist_ax.axis("off")
        coeff = entry["coefficient"]
        symbol = "r" if entry["kind"] == "pearson" else "rho"
        ax_top.set_title(
            f"{entry['source_name']}: n={entry['n_overlap']} "
            f"({entry['coverage']:.0%}), {symbol}={coeff:.2f}",
            fontsize=8,
        )
        meta["points"].append(len(entry["points"]))
    return fig, meta


def _heatmap(report: dict, spec: FigureSpec):
    heat = report["heatmap"]
    domains = heat["domains"]
    countries = heat["countries"]
    if not domains:
        fig = plt.figure(figsize=(4, 2))
        _placeholder(fig.add_subplot(111), "heatmap has no domains")
        return fig, {"cells": 0}
    matrix = np.asarray(heat["matrix"], dtype=float).T  # rows countries, cols domains
    fig, ax = plt.subplots(
        figsize=(spec.width or max(6.0, 0.45 * len(domains)),
                 spec.height or 0.5 * len(countries) + 2.2)
    )
    image = ax.imshow(matrix, aspect="auto", cmap="viridis", vmin=0.0)
    ax.set_xticks(range(len(domains)))
    ax.set_xticklabels(domains, rotation=90, fontsize=7)
    ax.set_yticks(range(len(countries)))
    ax.set_yticklabels(countries, fontsize=8)
    fig.colorbar(image, ax=ax, label="fraction of scored users reached")
    ax.set_title("within-country audience reach", fontsize=10)
    fig.tight_layout()
    return fig, {"cells": matrix.size}


def _top_domains_bar(report: dict, spec: FigureSpec):
    if spec.country is not None:
        country = report["countries"].get(spec.country)
        if country is None:
            raise ReportSchemaError(f"report has no country section: {spec.country}")
        entries = [{"domain": d, "reach": r, "mean": None} for d, r in country["top_domains"]]
        title = f"top domains by reach in {spec.country}"
    else:
        entries = report["top_domains_global"]
        title = "top domains by global reach"
    fig, ax = plt.subplots(
        figsize=(spec.width or 7.0, spec.height or max(2.5, 0.4 * len(entries) + 1))
    )
    if not entries:
        _placeholder(ax, "no ranked domains")
        return fig, {"bars": 0}
    entries = list(entries)
    positions = range(len(entries), 0, -1)
    colors = []
    for e in entries:
        mean = e.get("mean")
        if mean is None:
            colors.append(COLOR_NEUTRAL)
        else:
            colors.append(spec.color_left if mean < 0 else spec.color_right)
    ax.barh(list(positions), [e["reach"] for e in entries], color=colors, height=0.75)
    ax.set_yticks(list(positions))
    ax.set_yticklabels([e["domain"] for e in entries], fontsize=8)
    ax.set_xlabel("audience reach (unique scored sharers)")
    ax.set_title(title, fontsize=10)
    fig.tight_layout()
    return fig, {"bars": len(entries)}


_BUILDERS = {
    "density_panel": _density_panel,
    "country_ridge": _country_ridge,
    "media_ridge": _media_ridge,
    "validation_scatter": _validation_scatter,
    "heatmap": _heatmap,
    "top_domains_bar": _top_domains_bar,
}


def build_figure(spec: FigureSpec, report: dict | None = None):
    """Build (figure, meta) without saving; meta carries drawn-element counts."""
    if report is None:
        report = load_report(spec.report_path)
    return _BUILDERS[spec.kind](report, spec)


def render(spec: FigureSpec) -> Path:
    """Render one figure kind from the report to spec.out_path."""
    fig, _meta = build_figure(spec)
    out = Path(spec.out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    try:
        fig.savefig(out, dpi=150)
    finally:
        plt.close(fig)
    return out
