"""``stats``: document, sentence, word and AZP counts of a split."""

import argparse

from zero_coref.cli.runner import build_config, emit, emit_json
from zero_coref.core.conll import conll_files, read_conll_file
from zero_coref.core.logging import get_logger
from zero_coref.services.merge import MergeService
from zero_coref.services.reports import ReportService

logger = get_logger(__name__)


def register(subparsers: argparse._SubParsersAction, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("stats", parents=[common], help="corpus statistics")
    parser.add_argument("--conll", required=True, help="CoNLL file or directory")
    parser.add_argument("--format", choices=("json", "text"), default="json")


def handle(args: argparse.Namespace) -> int:
    build_config(args, "stats", {"conll": args.conll})
    paths = conll_files(args.conll)
    if not paths:
        logger.warning(f"No CoNLL files under {args.conll}")
    stats = MergeService.corpus_stats(
        document for path in paths for document in read_conll_file(path)
    )
    if args.json or args.format == "json":
        emit_json(stats.model_dump())
    else:
        emit(ReportService.stats_text(stats))
    return 0
