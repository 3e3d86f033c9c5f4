"""geoatlas command line: validate data files, convert coordinates, run
ad-hoc queries, emit fixture vectors, render reports, and launch the server.

Exit codes: 0 success, 1 expected failure (validation errors, bad query
parameters), 2 unusable input or environment (unreadable file, malformed
XML, bind failure).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import signal
import sys
from pathlib import Path

from . import geo, kml, server, viewsync

log = logging.getLogger("geoatlas.cli")


def _add_dataset_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", help="KML-subset data file (falls back to $GEOATLAS_DATA, "
                                  "then the bundled sample dataset)")
    p.add_argument("--axis-order", choices=[kml.AXIS_LON_LAT, kml.AXIS_LAT_LON],
                   default=kml.AXIS_LON_LAT,
                   help="coordinate tuple order of the data file (default lon-lat)")
    p.add_argument("--strict", action="store_true", help="abort on parse rule violations")


def _dataset(args) -> tuple[Path, kml.ParseOptions]:
    mode = kml.MODE_STRICT if args.strict else kml.MODE_LENIENT
    explicit = args.data or os.environ.get("GEOATLAS_DATA")
    if explicit:
        return Path(explicit), kml.ParseOptions(axis_order=args.axis_order, mode=mode)
    # The bundled sample is written in lat,lon order; ignore --axis-order for it.
    return server.BUNDLED_DATA_PATH, kml.ParseOptions(axis_order=kml.AXIS_LAT_LON, mode=mode)


def _load(args):
    path, opts = _dataset(args)
    try:
        state = server.load_state(path, opts)
    except server.DataLoadError as e:
        print(f"error: {e}", file=sys.stderr)
        return None
    return state


def _issue_line(issue: kml.ValidationIssue) -> str:
    pm = issue.placemark_id if issue.placemark_id is not None else "-"
    line = issue.line if issue.line is not None else "-"
    return f"{issue.severity.upper()} {issue.code} placemark={pm} line={line} {issue.message}"


def run_validate(args) -> int:
    opts = kml.ParseOptions(
        axis_order=args.axis_order,
        mode=kml.MODE_STRICT if args.strict else kml.MODE_LENIENT,
    )
    try:
        _document, issues = kml.load_document(args.file, opts)
    except OSError as e:
        print(f"error: cannot read {args.file}: {e}", file=sys.stderr)
        return 2
    except kml.MalformedXmlError as e:
        print(f"error: malformed XML: {e}", file=sys.stderr)
        return 2
    except kml.StrictParseError as e:
        issue = kml.ValidationIssue(kml.SEVERITY_ERROR, e.code, str(e),
                                    placemark_id=e.placemark_id, line=e.line)
        print(_issue_line(issue))
        return 1
    for issue in issues:
        print(_issue_line(issue))
    has_errors = any(i.severity == kml.SEVERITY_ERROR for i in issues)
    return 1 if has_errors else 0


def run_convert(args) -> int:
    if args.kind == "dms":
        try:
            angle = geo.parse_dms(args.value)
        except geo.InvalidDmsError as e:
            print(f"error: {e}", file=sys.stderr)
            return 2
        print(f"{geo.dms_to_decimal(angle):.7f}")
        return 0
    if not args.axis:
        print("error: decimal conversion needs --axis lat|lng", file=sys.stderr)
        return 2
    try:
        value = float(args.value)
        angle = geo.decimal_to_dms(value, args.axis)
    except (ValueError, geo.InvalidCoordinateError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(geo.format_dms(angle))
    return 0


def run_query(args) -> int:
    state = _load(args)
    if state is None:
        return 2
    if args.what == "nearest":
        try:
            results = server.search_nearest(state, args.lat, args.lng, args.k)
        except server.BadRequestError as e:
            print(f"error: {e}", file=sys.stderr)
            return 1
        for row in results:
            print(f"{row['id']}\t{row['distance_m']:.1f}")
        return 0
    try:
        box = server.parse_bbox_param(args.bbox)
        ids = state.index.query_bbox(box)
    except server.BadRequestError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    for placemark_id in ids:
        print(placemark_id)
    return 0


def run_fixtures(args) -> int:
    state = _load(args)
    if state is None:
        return 2
    payload = server.fixtures_json(state)
    text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        try:
            Path(args.out).write_text(text, encoding="utf-8")
        except OSError as e:
            print(f"error: cannot write {args.out}: {e}", file=sys.stderr)
            return 2
        print(args.out)
    else:
        sys.stdout.write(text)
    return 0


def run_report(args) -> int:
    from . import report  # matplotlib import deferred to the one command using it

    state = _load(args)
    if state is None:
        return 2
    try:
        outputs = report.write_report(state.document, state.index, args.out_dir)
    except OSError as e:
        print(f"error: cannot write report: {e}", file=sys.stderr)
        return 2
    for path in outputs:
        print(path)
    return 0


def run_serve(args) -> int:
    path, opts = _dataset(args)
    try:
        app = server.Application(path, opts, static_dir=args.static_dir)
    except server.DataLoadError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    try:
        srv = server.create_server(app, host=args.host, port=args.port)
    except OSError as e:
        print(f"error: cannot bind {args.host}:{args.port}: {e}", file=sys.stderr)
        return 2

    if hasattr(signal, "SIGHUP"):
        def _reload(_signum, _frame):
            try:
                app.reload()
            except server.DataLoadError as e:
                log.error("reload failed, keeping previous state: %s", e)

        signal.signal(signal.SIGHUP, _reload)

    log.info("serving %s on http://%s:%d/", app.data_path, args.host, args.port)
    try:
        srv.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        srv.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geoatlas",
        description="Self-hosted web GIS for a city's historical sites.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a data file and report issues")
    p.add_argument("file")
    p.add_argument("--axis-order", choices=[kml.AXIS_LON_LAT, kml.AXIS_LAT_LON],
                   default=kml.AXIS_LON_LAT)
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=run_validate)

    p = sub.add_parser("convert", help="convert between DMS and decimal degrees")
    p.add_argument("kind", choices=["dms", "decimal"])
    p.add_argument("value")
    p.add_argument("--axis", choices=["lat", "lng"],
                   help="axis for decimal input (sets the hemisphere letters)")
    p.set_defaults(func=run_convert)

    p = sub.add_parser("query", help="run a spatial query against a data file")
    _add_dataset_args(p)
    what = p.add_subparsers(dest="what", required=True)
    nearest = what.add_parser("nearest", help="k nearest placemarks to a point")
    nearest.add_argument("--lat", required=True)
    nearest.add_argument("--lng", required=True)
    nearest.add_argument("--k", default="1")
    nearest.set_defaults(func=run_query, what="nearest")
    bbox = what.add_parser("bbox", help="placemarks inside a bounding box")
    bbox.add_argument("--bbox", required=True, metavar="minLng,minLat,maxLng,maxLat")
    bbox.set_defaults(func=run_query, what="bbox")

    p = sub.add_parser("fixtures", help="emit the view-sync fixture vectors")
    _add_dataset_args(p)
    p.add_argument("--out", help="output path (stdout when omitted)")
    p.set_defaults(func=run_fixtures)

    p = sub.add_parser("report", help="render a dataset overview (TSV + figures)")
    _add_dataset_args(p)
    p.add_argument("--out-dir", default="report")
    p.set_defaults(func=run_report)

    p = sub.add_parser("serve", help="serve the REST API and the viewer")
    _add_dataset_args(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--static-dir", help="viewer assets directory (defaults to the "
                                        "packaged landing page)")
    p.set_defaults(func=run_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    if getattr(args, "command", None) == "serve" and not 1 <= args.port <= 65535:
        print(f"error: port out of range: {args.port}", file=sys.stderr)
        return 2
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
