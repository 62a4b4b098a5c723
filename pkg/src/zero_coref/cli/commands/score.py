"""``score``: coreference and AZP scores of a response against a key."""

import argparse

from zero_coref.cli.runner import build_config, emit, emit_json, write_json
from zero_coref.core.conll import conll_files, read_conll_file
from zero_coref.core.exceptions import CliError, UnmatchedDocuments
from zero_coref.models.documents import Document
from zero_coref.services.reports import ReportService
from zero_coref.services.scoring import ScoringService


def add_scoring_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--azp-hit", choices=("position", "entity"), default=None, help="AZP hit counting"
    )
    parser.add_argument(
        "--include-pro-in-coref",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="let *pro* mentions take part in MUC, B3 and CEAF",
    )


def register(subparsers: argparse._SubParsersAction, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("score", parents=[common], help="score a response")
    parser.add_argument("--key", required=True, help="key CoNLL file or directory")
    parser.add_argument("--response", required=True, help="response CoNLL file or directory")
    parser.add_argument("--out", default=None, help="also write the JSON report here")
    parser.add_argument("--format", choices=("json", "text"), default="json")
    add_scoring_flags(parser)


def read_documents(root: str) -> list[Document]:
    return [document for path in conll_files(root) for document in read_conll_file(path)]


def handle(args: argparse.Namespace) -> int:
    config = build_config(args, "score", {"key": args.key, "response": args.response})
    try:
        report = ScoringService.score_documents(
            read_documents(args.key),
            read_documents(args.response),
            include_pro=config.include_pro_in_coref,
            mode=config.azp_hit_mode,
            config=config.echo(),
        )
    except UnmatchedDocuments as e:
        raise CliError(str(e)) from e

    payload = ReportService.score_json(report)
    if args.out:
        write_json(args.out, payload)
    if args.json or args.format == "json":
        emit_json(payload)
    else:
        emit(ReportService.score_text(report))
    return 0
