"""Command line: figures <kind> --in <files> --out <image>."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .io import SchemaError
from .render import KINDS, FigureSpec, render


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Render figures from ringmotion CSV/JSON artifacts")
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        help="input artifact files (order matters for histograms: "
                             "histogram CSV first, then MC samples CSV)")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--no-wrap", action="store_true",
                        help="plot raw unwrapped positions")
    parser.add_argument("--highlight-agent", type=int, default=1)
    parser.add_argument("--ring-length", type=float, default=None,
                        help="override the ring length metadata")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    spec = FigureSpec(
        kind=args.kind,
        inputs=tuple(Path(p) for p in args.inputs),
        out=Path(args.out),
        wrap=not args.no_wrap,
        highlight_agent=args.highlight_agent,
        ring_length=args.ring_length,
    )
    try:
        out = render(spec)
    except (SchemaError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
