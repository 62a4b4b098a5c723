"""Argument parser and entry point of the ``zero-coref`` command."""

import argparse
from collections.abc import Sequence

from zero_coref import __version__
from zero_coref.cli.commands import merge, resolve, score, stats, validate
from zero_coref.cli.runner import run_command
from zero_coref.core.logging import setup_logging

COMMANDS = {
    "merge": merge,
    "stats": stats,
    "score": score,
    "resolve": resolve,
    "validate": validate,
}


def create_parser() -> argparse.ArgumentParser:
    """Build the parser with one sub-command per workflow."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="JSON output and JSON log lines")
    common.add_argument("--log-level", default=None, help="log level (default from settings)")
    common.add_argument("--log-file", default=None, help="also write a detailed log here")
    common.add_argument("--seed", type=int, default=None, help="random seed (default 0)")
    common.add_argument("--jobs", type=int, default=None, help="documents processed in parallel")

    parser = argparse.ArgumentParser(
        prog="zero-coref",
        description="Build, resolve and score AZP-extended CoNLL-2012 coreference data.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in COMMANDS.values():
        module.register(subparsers, common)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, set up logging and run the chosen command."""
    parser = create_parser()
    args = parser.parse_args(argv)
    if args.jobs is not None and args.jobs < 1:
        parser.error("--jobs must be at least 1")
    setup_logging(level=args.log_level, json_output=args.json or None, log_file=args.log_file)
    return run_command(args.command, COMMANDS[args.command].handle, args)


if __name__ == "__main__":
    raise SystemExit(main())
