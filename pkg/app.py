"""
Command line for the trip-graph engine.

    python app.py ingest   --input trips.csv --out graph/ --digits 4
    python app.py hotspots --graph graph/ --digits 3 --window month --k 5 --out hot.csv
    python app.py routes   --graph graph/ --digits 3 --month 2016-03 --out routes.csv
    python app.py stats    --graph graph/ --digits 2 --window month

The RunReport goes to stdout (or --report FILE); diagnostics go to stderr.
"""

import argparse
import sys

from dotenv import load_dotenv

from pipeline import pipeline
from services.errors import StorageIOError, TgaError
from services.log import configure_logging, get_logger
from services.settings import settings

# Load environment variables
load_dotenv()

logger = get_logger("app")

EXIT_OK = 0
EXIT_USAGE = 2


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {value}")
    return value


def _non_negative_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected an integer >= 0, got {value}")
    return value


def _add_common(parser):
    parser.add_argument("--threads", type=_positive_int, default=None,
                        help="worker threads for partition scans (TGA_THREADS)")
    parser.add_argument("--report", default=None, help="write the RunReport here instead of stdout")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR (TGA_LOG_LEVEL)")


def build_parser():
    parser = argparse.ArgumentParser(prog="tga", description="Temporal graph analytics over taxi trips")
    commands = parser.add_subparsers(dest="command", required=True)

    ingest = commands.add_parser("ingest", help="parse, clean and store trips as an evolving graph")
    ingest.add_argument("--input", dest="inputs", nargs="+", required=True, help="trip CSV file(s)")
    ingest.add_argument("--out", required=True, help="graph directory")
    ingest.add_argument("--digits", type=int, choices=(4, 3, 2), default=None)
    ingest.add_argument("--column-map", default=None, help="JSON file mapping fields to columns")
    ingest.add_argument("--no-header", action="store_true")
    ingest.add_argument("--delimiter", default=None)
    ingest.add_argument("--partitions", type=_positive_int, default=None)
    ingest.add_argument("--compress", action="store_true", default=None, help="gzip the graph files")
    _add_common(ingest)

    hotspots = commands.add_parser("hotspots", help="top-k locations by degree per window")
    hotspots.add_argument("--graph", required=True)
    hotspots.add_argument("--digits", type=int, choices=(4, 3, 2), required=True)
    hotspots.add_argument("--window", default="span", help="month, span or a number of seconds")
    hotspots.add_argument("--window-origin", default=None, help='"YYYY-MM-DD HH:MM:SS" for fixed windows')
    hotspots.add_argument("--k", type=_positive_int, default=5)
    hotspots.add_argument("--direction", choices=("in", "out", "both"), default="both")
    hotspots.add_argument("--out", required=True, help="hotspot CSV")
    _add_common(hotspots)

    routes = commands.add_parser("routes", help="simultaneous trips per route and window")
    routes.add_argument("--graph", required=True)
    routes.add_argument("--digits", type=int, choices=(3, 2), required=True)
    routes.add_argument("--window-seconds", type=_positive_int, default=None)
    routes.add_argument("--window-origin", default=None, help='"YYYY-MM-DD HH:MM:SS" for fixed windows')
    routes.add_argument("--month", default=None, help="YYYY-MM; default is the whole graph span")
    routes.add_argument("--top", type=_non_negative_int, default=None, help="route pairs for GeoJSON and report")
    routes.add_argument("--out", required=True, help="route aggregate CSV")
    routes.add_argument("--stats", default=None, help="route statistics JSON")
    routes.add_argument("--geojson", default=None, help="top route pairs as GeoJSON")
    _add_common(routes)

    stats = commands.add_parser("stats", help="location and trip counts per window")
    stats.add_argument("--graph", required=True)
    stats.add_argument("--digits", type=int, choices=(4, 3, 2), default=None)
    stats.add_argument("--window", default="month", help="month, span or a number of seconds")
    stats.add_argument("--window-origin", default=None)
    stats.add_argument("--out", default=None, help="per-window counts CSV")
    stats.add_argument("--top-degrees", type=_positive_int, default=None)
    stats.add_argument("--direction", choices=("in", "out", "both"), default="both",
                       help="degree direction for --top-degrees")
    _add_common(stats)

    return parser


def _params(args, run_settings):
    """Flags as a params dict, settings filled in where a flag was left out"""
    params = {k: v for k, v in vars(args).items() if k not in ("command", "report", "log_level")}
    params["threads"] = run_settings.threads
    if args.command == "ingest":
        params["digits"] = run_settings.digits
        params["partitions"] = run_settings.partitions
        params["compress"] = run_settings.compress
        params["chunk_rows"] = run_settings.chunk_rows
    elif args.command == "routes":
        params["window_seconds"] = run_settings.window_seconds
        params["top"] = run_settings.top_routes
    return params


def _emit(report, path):
    text = report.dumps()
    if not path:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w") as f:
            f.write(text)
    except OSError as e:
        raise StorageIOError(f"Cannot write report {path}: {e}")


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    try:
        run_settings = settings.override(
            threads=args.threads,
            log_level=args.log_level.upper() if args.log_level else None,
            digits=getattr(args, "digits", None) if args.command == "ingest" else None,
            partitions=getattr(args, "partitions", None),
            compress=getattr(args, "compress", None),
            window_seconds=getattr(args, "window_seconds", None),
            top_routes=getattr(args, "top", None),
        )
        try:
            configure_logging(run_settings.log_level)
        except ValueError:
            print(f"❌ Unknown log level {run_settings.log_level!r}", file=sys.stderr)
            return EXIT_USAGE

        handlers = {
            "ingest": pipeline.process_ingest,
            "hotspots": pipeline.process_hotspots,
            "routes": pipeline.process_routes,
            "stats": pipeline.process_stats,
        }
        report = handlers[args.command](_params(args, run_settings))
        _emit(report, args.report)
    except TgaError as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        return e.exit_code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
