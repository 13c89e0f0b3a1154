"""Command-line entry points for the figure scripts.

Usage:
    etpasens-figs methods --sweep sweep.csv [--markers table.csv]
                          [--target 9.9] --output fig_methods.svg
    etpasens-figs ladder --input ladder.csv --output fig_ladder.svg
"""

from __future__ import annotations

import argparse
import sys

from .csvdata import FigureDataError
from .render import render_ladder, render_method_comparison


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="etpasens-figs", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("methods", help="scheme-comparison curves from a sweep CSV")
    p.add_argument("--sweep", required=True, help="CSV from 'etpasens sweep'")
    p.add_argument("--markers", help="CSV from 'etpasens table' for experiment markers")
    p.add_argument("--target", type=float, help="detection target [GM] to shade")
    p.add_argument("--output", required=True, help="output image path (.svg, .pdf, .png)")
    p.set_defaults(kind="methods")

    p = sub.add_parser("ladder", help="improvement-ladder markers from a ladder CSV")
    p.add_argument("--input", required=True, help="CSV from 'etpasens ladder'")
    p.add_argument("--output", required=True, help="output image path (.svg, .pdf, .png)")
    p.set_defaults(kind="ladder")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.kind == "methods":
            summary = render_method_comparison(
                args.sweep, args.output, markers_csv=args.markers, target_gm=args.target
            )
        else:
            summary = render_ladder(args.input, args.output)
    except (FigureDataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(
        f"wrote {summary.output}: {summary.curves} curve groups, "
        f"{summary.markers} markers from {summary.rows_used} rows"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
