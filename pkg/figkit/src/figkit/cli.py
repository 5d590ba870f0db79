"""Figure tool: render simulator CSVs to images.

Subcommands: ``heatmap`` (sweep records) and ``causality`` (trace CSVs).
"""

from __future__ import annotations

import argparse
import sys

from .render import FigureSpec, render_causality, render_heatmap


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="figkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_measure in (("heatmap", True), ("causality", False)):
        p = sub.add_parser(name)
        p.add_argument("--in", dest="input", required=True, help="input CSV path")
        p.add_argument("--out", dest="output", required=True, help="output image path")
        if needs_measure:
            p.add_argument("--measure", default="e_n", help="record column to plot")
        p.add_argument("--xlabel")
        p.add_argument("--ylabel")
        p.add_argument("--title")
        p.add_argument("--vmin", type=float)
        p.add_argument("--vmax", type=float)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    bounds = None
    if args.vmin is not None or args.vmax is not None:
        if args.vmin is None or args.vmax is None:
            print("figkit: --vmin and --vmax must be given together", file=sys.stderr)
            return 1
        bounds = (args.vmin, args.vmax)
    spec = FigureSpec(
        input_csv=args.input,
        output_image=args.output,
        measure=getattr(args, "measure", "e_n"),
        xlabel=args.xlabel,
        ylabel=args.ylabel,
        title=args.title,
        bounds=bounds,
    )
    try:
        if args.command == "heatmap":
            render_heatmap(spec)
        else:
            render_causality(spec)
    except (ValueError, FileNotFoundError) as exc:
        print(f"figkit: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
