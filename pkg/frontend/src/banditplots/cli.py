"""``plot <kind> <input> -o <output> [options]`` command-line entry point.

Exit codes: 0 success, 2 schema/validation error (offending column named),
3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .io import SchemaError
from .render import RENDERERS
from .spec import BAND_KINDS, PLOT_KINDS, PlotSpec


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot", description="Render banditlab CSV/JSON outputs as figures."
    )
    parser.add_argument("kind", choices=PLOT_KINDS)
    parser.add_argument("input", help="aggregate CSV, heatmap CSV, or bounds JSON")
    parser.add_argument("-o", "--output", required=True, help="image path (.svg default, .png supported)")
    parser.add_argument("--band", choices=BAND_KINDS, default="stderr")
    parser.add_argument("--logx", action="store_true")
    parser.add_argument("--title")
    parser.add_argument("--xlabel")
    parser.add_argument("--ylabel")
    parser.add_argument("--truth", help="ground-truth means JSON for bounds plots")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if not Path(args.input).is_file():
            raise OSError(f"input file not found: {args.input}")
        if args.truth and not Path(args.truth).is_file():
            raise OSError(f"truth file not found: {args.truth}")
        spec = PlotSpec(
            kind=args.kind,
            output=args.output,
            band=args.band,
            logx=args.logx,
            title=args.title,
            xlabel=args.xlabel,
            ylabel=args.ylabel,
            truth=args.truth,
        )
        out = RENDERERS[args.kind](args.input, spec)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
