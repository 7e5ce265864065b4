"""Command line front end.

The CLI is a thin client: every subcommand posts a request to the service
and prints a one-line summary from the response. By default the service runs
in-process; --server points the same requests at a remote instance instead.

Exit codes: 0 success, 1 usage, 2 bad input data or file format, 3 internal
invariant violation (a bug or an unreachable server).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any

import httpx
from pydantic import ValidationError

from . import __version__
from .config import PipelineConfig
from .errors import DataError

_USAGE_EXIT = 1
_DATA_EXIT = 2
_INTERNAL_EXIT = 3


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; the contract here says 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(_USAGE_EXIT, f"{self.prog}: error: {message}\n")


# maps CLI override flags (dest) to config keys
_CONFIG_FLAGS = (
    "train_corpus",
    "dev_corpus",
    "test_corpus",
    "corpus_format",
    "static_vectors",
    "contextual_store",
    "work_dir",
    "alpha",
    "threshold",
    "brown_k",
    "brown_min_count",
    "brown_window",
    "preorder_iterations",
    "preorder_beam",
    "smoothing_k",
    "seed",
    "jobs",
)


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="pipeline config JSON file")
    common.add_argument(
        "--server",
        metavar="URL",
        help="send requests to a running service instead of in-process",
    )
    g = common.add_argument_group("config overrides")
    g.add_argument("--train-corpus", dest="train_corpus")
    g.add_argument("--dev-corpus", dest="dev_corpus")
    g.add_argument("--test-corpus", dest="test_corpus")
    g.add_argument("--corpus-format", dest="corpus_format", choices=("jsonl", "tsv"))
    g.add_argument("--static-vectors", dest="static_vectors")
    g.add_argument("--contextual-store", dest="contextual_store")
    g.add_argument("--work-dir", dest="work_dir")
    g.add_argument("--alpha", dest="alpha", type=float)
    g.add_argument("--threshold", dest="threshold", type=float)
    g.add_argument("--brown-k", dest="brown_k", type=int)
    g.add_argument("--brown-min-count", dest="brown_min_count", type=int)
    g.add_argument("--brown-window", dest="brown_window", type=int)
    g.add_argument("--iterations", dest="preorder_iterations", type=int)
    g.add_argument("--beam", dest="preorder_beam", type=int)
    g.add_argument("--smoothing-k", dest="smoothing_k", type=float)
    g.add_argument("--seed", dest="seed", type=int)
    g.add_argument("--jobs", dest="jobs", type=int)
    return common


def _build_parser() -> _Parser:
    parser = _Parser(prog="text2gloss", description=__doc__)
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    common = _common_parser()
    sub = parser.add_subparsers(dest="command", metavar="subcommand")
    sub.required = True

    def split_flag(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--split", choices=("train", "dev", "test"), default="train"
        )

    p = sub.add_parser("ingest", parents=[common], help="normalize and filter a corpus split")
    split_flag(p)
    p = sub.add_parser("align", parents=[common], help="build pseudo word-gloss alignments")
    split_flag(p)
    sub.add_parser("train-select", parents=[common], help="fit the gloss selection table")
    sub.add_parser("train-classes", parents=[common], help="cluster the text vocabulary")
    sub.add_parser(
        "train-preorder", parents=[common], help="fit the reordering models"
    )
    p = sub.add_parser("translate", parents=[common], help="run the full pipeline on a split")
    split_flag(p)
    p.add_argument(
        "--reorder", choices=("statistical", "constrained"), default="statistical"
    )
    p = sub.add_parser("evaluate", parents=[common], help="translate a split and score it")
    split_flag(p)
    p.add_argument(
        "--reorder", choices=("statistical", "constrained"), default="statistical"
    )
    p = sub.add_parser("bench", parents=[common], help="time pipeline stages on a split")
    split_flag(p)
    p.add_argument("--repeats", type=int, default=3)
    p = sub.add_parser("serve", parents=[common], help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8017)
    return parser


def _build_config(args: argparse.Namespace) -> PipelineConfig:
    base: dict[str, Any] = {}
    if args.config:
        from .config import load_config

        base = load_config(args.config).model_dump()
    overrides = {
        key: getattr(args, key)
        for key in _CONFIG_FLAGS
        if getattr(args, key, None) is not None
    }
    base.update(overrides)
    return PipelineConfig.model_validate(base)


def _make_client(args: argparse.Namespace) -> httpx.Client:
    if args.server:
        return httpx.Client(base_url=args.server, timeout=600.0)
    import warnings

    with warnings.catch_warnings():
        # the in-process client is an implementation detail; its deprecation
        # chatter must not leak into every command's stderr
        warnings.filterwarnings("ignore", message=r"Using `httpx`")
        from fastapi.testclient import TestClient

    from .service import create_app

    return TestClient(create_app(), raise_server_exceptions=False)


def _post(client: httpx.Client, path: str, payload: dict) -> dict:
    response = client.post(path, json=payload)
    if response.status_code < 400:
        return response.json()
    try:
        body = response.json()
    except ValueError:
        body = {}
    if response.status_code == 422:
        raise _RemoteError("data", json.dumps(body.get("detail", body)))
    error = body.get("error", {})
    raise _RemoteError(
        error.get("kind", "invariant"), error.get("message", response.text)
    )


class _RemoteError(Exception):
    def __init__(self, kind: str, message: str):
        self.kind = kind
        super().__init__(message)

    @property
    def exit_code(self) -> int:
        return _DATA_EXIT if self.kind == "data" else _INTERNAL_EXIT


def _dispatch(args: argparse.Namespace, config: PipelineConfig) -> str:
    payload: dict[str, Any] = {"config": config.model_dump(mode="json")}
    with _make_client(args) as client:
        if args.command == "ingest":
            payload["split"] = args.split
            out = _post(client, "/ingest", payload)
            return (
                f"{out['split']}: ingested {out['examples']} examples "
                f"({out['dropped']} dropped) -> {out['path']}"
            )
        if args.command == "align":
            payload["split"] = args.split
            out = _post(client, "/align", payload)
            return f"{out['split']}: {out['examples']} examples aligned -> {out['path']}"
        if args.command == "train-select":
            out = _post(client, "/train/select", payload)
            return f"select model: {out['entries']} entries -> {out['path']}"
        if args.command == "train-classes":
            out = _post(client, "/train/classes", payload)
            return (
                f"classes: K={out['k']} over {out['words']} words "
                f"({out['merges']} merges) -> {out['path']}"
            )
        if args.command == "train-preorder":
            out = _post(client, "/train/preorder", payload)
            return (
                f"preorder model: {out['features']} features from "
                f"{out['examples']} examples -> {out['path']}; "
                f"transitions -> {out['transition_path']}"
            )
        if args.command == "translate":
            payload["split"] = args.split
            payload["reorder"] = args.reorder
            out = _post(client, "/translate", payload)
            return (
                f"{out['split']}: translated {out['examples']} sentences "
                f"({out['reorder']}) -> {out['path']}"
            )
        if args.command == "evaluate":
            payload["split"] = args.split
            payload["reorder"] = args.reorder
            out = _post(client, "/evaluate", payload)
            r = out["report"]
            return (
                f"{out['split']} ({out['reorder']}): BLEU-1 {r['bleu1']:.2f} "
                f"BLEU-4 {r['bleu4']:.2f} ROUGE {r['rouge']:.2f} "
                f"n={r['n_examples']} -> {out['path']}"
            )
        if args.command == "bench":
            payload["split"] = args.split
            payload["repeats"] = args.repeats
            out = _post(client, "/bench", payload)
            base = out["stages"][out["baseline"]]
            return (
                f"{out['split']}: {len(out['stages'])} stages, baseline "
                f"{out['baseline']} {base['ms']:.1f} ms -> {out['path']}"
            )
    raise AssertionError(f"unhandled subcommand {args.command!r}")


def run_command(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if args.command == "serve":
        try:
            config = _build_config(args)
        except (DataError, ValidationError) as exc:
            print(f"error (data): {exc}", file=sys.stderr)
            return _DATA_EXIT
        import uvicorn

        from .service import create_app

        del config  # serve holds no state; requests carry their own config
        uvicorn.run(create_app(), host=args.host, port=args.port)
        return 0

    try:
        config = _build_config(args)
    except (DataError, ValidationError) as exc:
        print(f"error (data): {exc}", file=sys.stderr)
        return _DATA_EXIT

    try:
        summary = _dispatch(args, config)
    except _RemoteError as exc:
        print(f"error ({exc.kind}): {exc}", file=sys.stderr)
        return exc.exit_code
    except httpx.HTTPError as exc:
        print(f"error (connection): {exc}", file=sys.stderr)
        return _INTERNAL_EXIT
    print(summary)
    return 0


def main() -> None:
    raise SystemExit(run_command())
