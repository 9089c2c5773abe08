"""Command line interface.

    spanqa index --corpus corpus.jsonl --out index.bin [--k1 K] [--b B]
    spanqa serve [--config config.yaml] [--host H] [--port P]
    spanqa eval  [--config config.yaml] --dataset data.jsonl --report out.csv

Exit code 0 on success; named errors print to stderr and exit nonzero.
`serve --port 0` binds an OS-assigned port and prints it on startup.
"""

from __future__ import annotations

import argparse
import socket
import sys
from pathlib import Path

import uvicorn

from .config import load_or_create_config
from .errors import SpanqaError
from .evaluation import (
    default_configurations,
    emit_report,
    format_table,
    load_dataset,
    run_eval,
)
from .index import Index, ingest, read_corpus
from .service import create_app


def _cmd_index(args: argparse.Namespace) -> int:
    index = ingest(read_corpus(args.corpus), k1=args.k1, b=args.b)
    index.save(args.out)
    stats = index.stats
    print(
        f"indexed {stats.doc_count} documents "
        f"(avg length {stats.avg_doc_len:.1f} tokens) -> {args.out}"
    )
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    config, config_path = load_or_create_config(args.config)
    index = None
    index_path = Path(config.retriever.index_path)
    if index_path.is_file():
        index = Index.load(
            index_path, k1=config.retriever.k1, b=config.retriever.b
        )
        print(f"loaded index {index_path} ({len(index)} documents)")
    else:
        print(
            f"warning: index {index_path} not found; "
            "serving closed-domain requests only",
            file=sys.stderr,
        )
    app = create_app(config, index=index, probe=True)
    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    sock.bind((args.host, args.port))
    host, port = sock.getsockname()[:2]
    print(f"serving on http://{host}:{port} (config: {config_path})", flush=True)
    server = uvicorn.Server(uvicorn.Config(app, log_level="warning"))
    server.run(sockets=[sock])
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    config, _ = load_or_create_config(args.config)
    index = Index.load(
        config.retriever.index_path, k1=config.retriever.k1, b=config.retriever.b
    )
    dataset = load_dataset(args.dataset)
    report = run_eval(
        index,
        dataset,
        configurations=default_configurations(include_remote=args.include_remote),
        base_config=config,
    )
    emit_report(report, args.report)
    print(format_table(report))
    print(f"report written to {args.report}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spanqa",
        description="Extractive question answering over a document corpus.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_index = sub.add_parser("index", help="build a persisted index from JSONL")
    p_index.add_argument("--corpus", required=True, help="JSONL corpus file")
    p_index.add_argument("--out", required=True, help="output index path")
    p_index.add_argument("--k1", type=float, default=1.2)
    p_index.add_argument("--b", type=float, default=0.75)
    p_index.set_defaults(func=_cmd_index)

    p_serve = sub.add_parser("serve", help="run the REST service")
    p_serve.add_argument("--config", help="config YAML path")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.set_defaults(func=_cmd_serve)

    p_eval = sub.add_parser("eval", help="evaluate configurations on a dataset")
    p_eval.add_argument("--config", help="config YAML path")
    p_eval.add_argument("--dataset", required=True, help="JSONL eval dataset")
    p_eval.add_argument("--report", required=True, help="output CSV path")
    p_eval.add_argument(
        "--include-remote",
        action="store_true",
        help="also evaluate the remote expansion strategy",
    )
    p_eval.set_defaults(func=_cmd_eval)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SpanqaError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
