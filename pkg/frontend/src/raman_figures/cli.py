"""Command line entry point: ``raman-plot --kind <k> --in <csv> --out <png>``."""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, FigureJob, render


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="raman-plot",
        description="Render scan/trace CSV artifacts into figures",
    )
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--in", dest="input_path", required=True,
                        help="input CSV path")
    parser.add_argument("--out", dest="output_path", required=True,
                        help="output image path")
    parser.add_argument("--log-x", action="store_true",
                        help="logarithmic x axis")
    parser.add_argument("--reference-x", type=float, default=None,
                        help="vertical guide line position")
    parser.add_argument("--title", default=None)
    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    job = FigureJob(kind=args.kind, input_path=args.input_path,
                    output_path=args.output_path, x_log=args.log_x,
                    reference_x=args.reference_x, title=args.title)
    try:
        info = render(job)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {info['output']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
