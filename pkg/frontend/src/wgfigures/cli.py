"""Command line: render figures from recipe files or from flags.

Two invocation styles::

    wgfigures figs/map.json figs/resolution.json     # recipe files
    wgfigures --kind heatmap --input runs/map_single_qubit.csv \\
              --output figs/map.png --column pg --qubit 0

Exit codes: 0 success, 2 recipe or data error (unknown kind, missing
or malformed columns, empty CSV, unit mismatch), 4 I/O error while
writing the image.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .recipes import KINDS, FigureRecipe, RecipeError, load_recipe
from .render import render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wgfigures",
        description="Render figures from wgfocus CSV/JSON products.",
    )
    parser.add_argument("--version", action="version", version=f"wgfigures {__version__}")
    parser.add_argument(
        "recipes",
        nargs="*",
        metavar="RECIPE.json",
        help="recipe files to render (alternative to --kind/--input/--output)",
    )
    flags = parser.add_argument_group("single-figure flags")
    flags.add_argument("--kind", choices=KINDS, help="figure kind")
    flags.add_argument(
        "--input",
        action="append",
        default=[],
        metavar="FILE",
        help="input product; repeat for overlays or an optima JSON",
    )
    flags.add_argument("--output", metavar="IMAGE", help="image file to write")
    flags.add_argument("--xlabel", default="", help="x axis label (unit in parentheses)")
    flags.add_argument("--ylabel", default="", help="y axis label (unit in parentheses)")
    flags.add_argument("--title", default="", help="figure title")
    flags.add_argument("--column", help="population column (pg, pe, pf, leak)")
    flags.add_argument("--qubit", type=int, help="qubit index to draw")
    flags.add_argument(
        "--amplitude-ghz", type=float, help="linecut amplitude, cyclic GHz"
    )
    flags.add_argument("--dpi", type=float, help="raster resolution (default 150)")
    return parser


def _recipe_from_flags(args: argparse.Namespace) -> FigureRecipe:
    if not args.input or not args.output:
        raise RecipeError("--kind needs at least one --input and an --output")
    options = {}
    for key, value in (
        ("column", args.column),
        ("qubit", args.qubit),
        ("amplitude_ghz", args.amplitude_ghz),
        ("dpi", args.dpi),
    ):
        if value is not None:
            options[key] = value
    return FigureRecipe(
        kind=args.kind,
        inputs=tuple(args.input),
        output=args.output,
        xlabel=args.xlabel,
        ylabel=args.ylabel,
        title=args.title,
        options=options,
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.kind is not None:
            if args.recipes:
                raise RecipeError("pass recipe files or --kind flags, not both")
            recipes = [_recipe_from_flags(args)]
        elif args.recipes:
            recipes = [load_recipe(path) for path in args.recipes]
        else:
            parser.error("nothing to render: pass recipe files or --kind")
        for recipe in recipes:
            result = render(recipe)
            print(f"wrote {result.path} ({result.width}x{result.height})")
    except RecipeError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
