"""Command line front end for the two export jobs.

Exit codes match the toolkit convention: 0 success, 1 usage error, 2 for
anything wrong with the corpus, the model, or the alignment between them.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .backend import POOLINGS
from .errors import ExporterError

_USAGE_EXIT = 1
_DATA_EXIT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(_USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="embed-exporter", description=__doc__)
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--corpus", required=True, metavar="PATH")
    common.add_argument("--model", required=True, metavar="ID_OR_DIR")
    common.add_argument("--side", choices=("text", "gloss"), default="text")
    common.add_argument("--out", required=True, metavar="PATH")
    common.add_argument("--pooling", choices=POOLINGS, default="mean")

    sub = parser.add_subparsers(dest="command", metavar="subcommand")
    sub.required = True
    sub.add_parser(
        "export-static",
        parents=[common],
        help="write one vector per corpus word from the input embedding matrix",
    )
    p = sub.add_parser(
        "export-contextual",
        parents=[common],
        help="write one pooled vector per corpus token from a hidden layer",
    )
    p.add_argument(
        "--layer",
        type=int,
        default=-1,
        help="hidden-states index: 0 embeddings, -1 final layer (default)",
    )
    return parser


def run_command(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        if args.command == "export-static":
            from .static import export_static, vocabulary_from_corpus

            vocab = vocabulary_from_corpus(args.corpus, args.side)
            summary = export_static(vocab, args.model, args.out, args.pooling)
            print(
                f"wrote {summary.written} vectors (dim {summary.dim}) -> "
                f"{summary.path}; {summary.omitted} words omitted"
            )
        else:
            from .contextual import export_contextual

            summary = export_contextual(
                args.corpus, args.model, args.side, args.out, args.layer, args.pooling
            )
            print(
                f"wrote {summary.records} records ({summary.rows} rows, "
                f"dim {summary.dim}) -> {summary.path}"
            )
    except ExporterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _DATA_EXIT
    return 0


def main() -> None:
    raise SystemExit(run_command())
