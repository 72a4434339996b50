from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from interlace import __version__
from interlace.commands import (
    embedding_commands,
    gluing_commands,
    indices_commands,
    interlacing_commands,
    schreier_commands,
)
from interlace.commands.common import exit_code_for, render
from interlace.config import configure_settings
from interlace.errors import DomainError

logger = logging.getLogger("interlace")

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="interlace",
        description="Interlacing-graph metrics, finite embeddings, Schreier families and gluing checks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--log-level",
        default=None,
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help="Logging level for stderr diagnostics.",
    )
    parser.add_argument("--pretty", action="store_true", help="Print tables instead of JSON.")

    subparsers = parser.add_subparsers(dest="command", required=True)
    interlacing_commands.register(subparsers)
    embedding_commands.register(subparsers)
    schreier_commands.register(subparsers)
    indices_commands.register(subparsers)
    gluing_commands.register(subparsers)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format=LOG_FORMAT, stream=sys.stderr)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

    settings = configure_settings(jobs=getattr(args, "jobs", None), log_level=args.log_level)
    logging.getLogger().setLevel(settings.log_level)
    logger.debug("Running %s with %s", args.command, settings.model_dump())

    try:
        result = args.handler(args)
    except DomainError as exc:
        logger.info("Command %s failed: %s", args.command, exc)
        print(json.dumps(exc.to_dict(), default=str), file=sys.stderr)
        return 1
    except AssertionError as exc:
        logger.exception("Command %s failed an internal check", args.command)
        print(json.dumps({"error": "INTERNAL_CHECK_FAILED", "detail": str(exc)}), file=sys.stderr)
        return 1

    print(render(result, pretty=args.pretty))
    return exit_code_for(result)
