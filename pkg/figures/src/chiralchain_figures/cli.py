"""figures <kind> --in <dir> --out <path>

Kinds: heatmap, snapshot, correlation-series, crossing-summary.
Exit codes: 0 success, 1 bad arguments or missing/invalid inputs.
"""

from __future__ import annotations

import argparse
import sys

from .loading import FigureInputError, load_directory, select_run
from .render import (
    render_correlation_series,
    render_crossing_summary,
    render_heatmap,
    render_snapshot,
)

KINDS = ("heatmap", "snapshot", "correlation-series", "crossing-summary")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Render publication-style figures from a chiralchain output directory",
    )
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--in", dest="in_dir", required=True, help="run or sweep directory")
    parser.add_argument("--out", dest="out_path", required=True, help="image file (.png or .svg)")
    parser.add_argument("--time", type=float, default=80.0, help="snapshot time (gamma*t)")
    parser.add_argument("--run", default=None, help="sweep run label for correlation-series")
    parser.add_argument("--dpi", type=int, default=150)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        runs = load_directory(args.in_dir)
        if args.kind == "heatmap":
            render_heatmap(runs, args.out_path, dpi=args.dpi)
        elif args.kind == "snapshot":
            render_snapshot(runs, args.out_path, time=args.time, dpi=args.dpi)
        elif args.kind == "correlation-series":
            render_correlation_series(select_run(runs, args.run), args.out_path, dpi=args.dpi)
        else:
            render_crossing_summary(runs, args.out_path, dpi=args.dpi)
    except (FigureInputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
