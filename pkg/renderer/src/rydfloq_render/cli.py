"""Command line: render rydfloq CSV outputs into PNG or SVG panels.

Exit codes: 0 success, 2 schema/binding/usage error (with a column diff on
stderr for schema mismatches), 4 I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import PlotSpec, RenderError, SchemaError, render
from .schema import FIGURE_SCHEMAS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rydfloq-render", description=__doc__)
    parser.add_argument("figure_id", choices=sorted(FIGURE_SCHEMAS), metavar="figure_id",
                        help=f"one of: {', '.join(sorted(FIGURE_SCHEMAS))}")
    parser.add_argument("inputs", nargs="+", type=Path, metavar="csv",
                        help="input CSV file(s) written by the rydfloq CLI")
    parser.add_argument("--output", "-o", type=Path, default=None,
                        help="image path; default: first input with .png suffix")
    parser.add_argument("--format", choices=("png", "svg"), default=None,
                        help="image format (default from the output suffix, else png)")
    parser.add_argument("--cmap", default="viridis", help="colormap name")
    parser.add_argument("--dpi", type=int, default=150, help="raster resolution")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = args.output
    if out is None:
        suffix = f".{args.format or 'png'}"
        out = args.inputs[0].with_suffix(suffix)
    elif args.format and out.suffix.lstrip(".").lower() != args.format:
        out = out.with_suffix(f".{args.format}")
    spec = PlotSpec(
        figure_id=args.figure_id,
        inputs=tuple(args.inputs),
        output=out,
        colormap=args.cmap,
        dpi=args.dpi,
    )
    try:
        written = render(spec)
    except SchemaError as exc:
        print(f"schema mismatch: {exc}", file=sys.stderr)
        return 2
    except RenderError as exc:
        print(f"cannot render: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return 4
    print(written)
    return 0


if __name__ == "__main__":
    sys.exit(main())
