"""Command-line entry point: render one figure from a report bundle.

    echomap-figures render --report out/report/report.json \
        --kind country_ridge --out us_ridge.png --country US

Exit codes: 0 success, 2 schema mismatch or unreadable report.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from .render import KINDS, FigureSpec, ReportSchemaError, render


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="echomap-figures")
    sub = parser.add_subparsers(dest="command", required=True)
    rend = sub.add_parser("render", help="render one figure kind")
    rend.add_argument("--report", required=True, help="report JSON produced by `echomap report`")
    rend.add_argument("--kind", required=True, choices=KINDS)
    rend.add_argument("--out", required=True, help="output image path (png/svg/pdf)")
    rend.add_argument("--country", help="country code (country_ridge, validation_scatter, top_domains_bar)")
    rend.add_argument("--domain", help="domain name (media_ridge)")
    rend.add_argument("--width", type=float)
    rend.add_argument("--height", type=float)
    args = parser.parse_args(argv)

    spec_kwargs = dict(
        kind=args.kind,
        report_path=Path(args.report),
        out_path=Path(args.out),
        country=args.country,
        domain=args.domain,
        width=args.width,
        height=args.height,
    )
    try:
        out = render(FigureSpec(**spec_kwargs))
    except (ReportSchemaError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
