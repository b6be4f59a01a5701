"""plotkit command line: render one figure kind from benchmark CSV or
estimate-report JSON files.

    plotkit <kind> --in FILE [FILE ...] --out IMAGE [--log-x]
                   [--marks W1,W2,...]

Exit codes: 0 success, 2 usage error, 3 input/schema error.
"""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, FigureSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="plotkit",
                                 description=__doc__.splitlines()[0])
    ap.add_argument("kind", choices=KINDS, help="figure kind")
    ap.add_argument("--in", dest="inputs", nargs="+", required=True,
                    help="input CSV/JSON file(s)")
    ap.add_argument("--out", required=True, help="output image path")
    ap.add_argument("--log-x", action="store_true",
                    help="logarithmic sweep axis")
    ap.add_argument("--marks", default="",
                    help="comma-separated frequencies to mark (freq_scatter)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    marks = [float(v) for v in args.marks.split(",") if v.strip()]
    try:
        spec = FigureSpec(kind=args.kind, inputs=args.inputs, out=args.out,
                          log_x=args.log_x, marks=marks)
        render(spec)
    except (SchemaError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
