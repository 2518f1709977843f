"""Command line front end: ``mimosec-figures render --csv ... --kind ... --out ...``"""

import argparse
import sys

from .render import FIGURE_KINDS, FigureSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mimosec-figures",
        description="Render sweep result CSVs into figures")
    subs = parser.add_subparsers(dest="command", required=True)
    sub = subs.add_parser("render", help="render one figure from a results CSV")
    sub.add_argument("--csv", required=True, help="input results CSV")
    sub.add_argument("--kind", required=True, choices=FIGURE_KINDS)
    sub.add_argument("--out", required=True, help="output image path")
    sub.add_argument("--series", nargs="*", default=[],
                     help="algorithm names to include (default: all)")
    sub.add_argument("--no-timestamp", action="store_true",
                     help="strip volatile metadata for reproducible images")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(input_csv=args.csv, figure_kind=args.kind,
                      output_image=args.out, series_filter=args.series,
                      timestamp=not args.no_timestamp)
    try:
        render(spec)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
