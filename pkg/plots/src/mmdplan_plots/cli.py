"""Command-line entry point: render one figure from a log file."""

from __future__ import annotations

import argparse
import sys

from .errors import ParseError, RequestError
from .figures import FIGURE_KINDS, FigureRequest, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mmdplan-plot",
        description="Render figures from mmdplan run logs and sweep tables",
    )
    parser.add_argument("--kind", required=True, choices=FIGURE_KINDS)
    parser.add_argument("--log", required=True, help="run JSON, metrics CSV or surface table")
    parser.add_argument("--step", type=int, default=None, help="step index for snapshot/distribution")
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv if argv is not None else sys.argv[1:])
    try:
        out = render(FigureRequest(log=args.log, kind=args.kind, step=args.step, out=args.out))
    except (ParseError, RequestError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"figure written to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
