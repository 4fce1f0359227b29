"""Command line: ``timoplot plot --kind <k> --series <csv> [--fit <json>] --out <png|svg>``.

The leading ``plot`` subcommand word is optional.  Exit codes: 0 success,
2 bad input (format/validation), 4 I/O.
"""

from __future__ import annotations

import argparse
import sys

from .io import FormatError
from .render import KINDS, PlotJob, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="timoplot",
                                     description="Render figures from simulator outputs")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--series", help="run CSV (t,E,E2,...)")
    parser.add_argument("--fit", help="fit report or sweep aggregate JSON")
    parser.add_argument("--out", required=True, help="output image (.png or .svg)")
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] == "plot":
        argv = argv[1:]
    args = build_parser().parse_args(argv)
    try:
        render(PlotJob(kind=args.kind, series=args.series, fit=args.fit, out=args.out))
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
