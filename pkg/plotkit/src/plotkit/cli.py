"""Command line: plotkit <kind> --in DIR --out FILE [--stride INT]."""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURE_KINDS, render
from .io import PlotkitError


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render figures from curvature-flow run output files.")
    parser.add_argument("kind", choices=sorted(FIGURE_KINDS),
                        help="figure kind to render")
    parser.add_argument("--in", dest="run_dir", required=True,
                        help="run directory (snapshots.csv, frames/, report.json)")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--stride", type=int, default=1,
                        help="keep every stride-th frame (frames/normalized)")
    args = parser.parse_args(argv)
    try:
        render(args.kind, args.run_dir, args.out, stride=args.stride)
    except PlotkitError as exc:
        print(f"plotkit error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
