"""Command-line entry: render figures from pipeline data files.

  carekg-report sankey FLOWS_CSV [--out PATH.svg]
  carekg-report metrics SUMMARY_JSON [--out-dir DIR]

Exit codes: 0 success, 1 runtime failure, 2 missing/malformed input or
bad usage.
"""

import argparse
import sys

from . import __version__
from .barchart import render_metrics
from .errors import ReportDataError, ReportError
from .sankey import render_sankey


def _parser():
    parser = argparse.ArgumentParser(
        prog="carekg-report",
        description="Render pipeline data files to SVG figures.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sankey", help="transition Sankey from a flows CSV")
    p.add_argument("flows_csv")
    p.add_argument("--out", default="sankey.svg", help="output SVG path")

    p = sub.add_parser("metrics", help="grouped bar charts from a summary JSON")
    p.add_argument("summary_json")
    p.add_argument("--out-dir", default=".", help="output directory")

    return parser


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        if args.command == "sankey":
            path = render_sankey(args.flows_csv, args.out)
            print(f"wrote {path}")
        else:
            for path in render_metrics(args.summary_json, args.out_dir):
                print(f"wrote {path}")
        return 0
    except ReportDataError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ReportError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
