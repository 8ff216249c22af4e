"""Command line: export embeddings to a file, or serve them over HTTP."""

from __future__ import annotations

import argparse
import sys

from .encoder import DEFAULT_MODEL, SentenceEncoder
from .export import ExporterConfig, export
from .server import serve


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embed-exporter",
        description="Mean-pooled transformer sentence embeddings: batch export or HTTP service.",
    )
    parser.add_argument("--model", default=DEFAULT_MODEL, help="pretrained encoder name or path")
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--batch-size", type=int, default=32)
    sub = parser.add_subparsers(dest="command", required=True)

    exp = sub.add_parser("export", help="embed sentence-record JSON lines into a binary file")
    exp.add_argument("--input", required=True, help="sentence-record JSONL path")
    exp.add_argument("--output", required=True, help="embedding file to write")

    srv = sub.add_parser("serve", help="serve the POST /embed protocol")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, required=True)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "export":
        cfg = ExporterConfig(
            model_name=args.model,
            input_path=args.input,
            output_path=args.output,
            batch_size=args.batch_size,
            device=args.device,
        )
        summary = export(cfg)
        print(
            f"wrote {summary.rows} rows at dim {summary.dim} -> {summary.output_path}"
            + (f" ({summary.truncated} truncated)" if summary.truncated else "")
        )
        return 0
    encoder = SentenceEncoder(args.model, device=args.device, batch_size=args.batch_size)
    serve(encoder, args.host, args.port)
    return 0


if __name__ == "__main__":
    sys.exit(main())
