"""cprplots render --input sweep.csv --kind basin-r --out fig.png

Exit codes: 0 ok, 1 bad input (schema/dimension/arguments), 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, DimensionError, SchemaError, render


def build_parser():
    parser = argparse.ArgumentParser(prog="cprplots", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)
    r = subs.add_parser("render", help="render a figure from a CSV file")
    r.add_argument("--input", required=True, help="source CSV")
    r.add_argument("--kind", required=True, choices=KINDS)
    r.add_argument("--out", required=True, help="output image (.png or .svg)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = render(args.kind, args.input, args.out)
    except (SchemaError, DimensionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {result.out_path}")
    return 0


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
