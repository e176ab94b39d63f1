"""Command line interface: static SVG rendering and the HTTP service."""

from __future__ import annotations

import argparse
import os
import sys

from . import scene as sc
from .ingest import IngestError, dataset_extent, parse_csv, parse_spec
from .timeline import TimelineError


def cli_render(args) -> int:
    """Render a figure spec against a CSV to a standalone SVG file."""
    try:
        with open(args.spec, "r", encoding="utf-8") as f:
            spec_text = f.read()
        with open(args.data, "rb") as f:
            data = f.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        spec = parse_spec(spec_text)
        dataset, diagnostics = parse_csv(data, spec)
        for d in diagnostics:
            print(f"warning: {d}", file=sys.stderr)
        layout = spec.initial_layout(dataset_extent(dataset))
        figure = sc.compose(dataset, spec, layout, args.width, args.height)
    except (IngestError, TimelineError, sc.TooSmallError, sc.UnknownSeriesError) as exc:
        code = getattr(exc, "code", type(exc).__name__)
        print(f"error: {code}: {exc}", file=sys.stderr)
        for d in getattr(exc, "diagnostics", []):
            print(f"  {d}", file=sys.stderr)
        return 2
    try:
        with open(args.out, "w", encoding="utf-8", newline="\n") as f:
            f.write(sc.to_svg(figure))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def cli_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def cli_sample(args) -> int:
    from .sampledata import write_sample

    os.makedirs(args.out_dir, exist_ok=True)
    csv_path = os.path.join(args.out_dir, "weather.csv")
    spec_path = os.path.join(args.out_dir, "weather_spec.json")
    write_sample(csv_path, spec_path, n_days=args.days)
    print(f"wrote {csv_path} and {spec_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pplot",
        description="Periphery plots: focus+context temporal figures",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    render = sub.add_parser("render", help="render a CSV + figure spec to SVG")
    render.add_argument("--data", required=True, help="CSV dataset path")
    render.add_argument("--spec", required=True, help="figure spec JSON path")
    render.add_argument("--out", required=True, help="output SVG path")
    render.add_argument("--width", type=float, default=1200.0)
    render.add_argument("--height", type=float, default=600.0)
    render.set_defaults(func=cli_render)

    serve = sub.add_parser("serve", help="run the interactive session service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=int(os.environ.get("PPLOT_PORT", "8080")))
    serve.set_defaults(func=cli_serve)

    sample = sub.add_parser("sample", help="write the synthetic weather sample dataset")
    sample.add_argument("--out-dir", default="sample_data")
    sample.add_argument("--days", type=int, default=25_000)
    sample.set_defaults(func=cli_sample)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
