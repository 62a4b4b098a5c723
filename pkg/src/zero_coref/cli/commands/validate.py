"""``validate``: list invariant violations without modifying files."""

import argparse

from zero_coref.cli.runner import build_config, emit, emit_json
from zero_coref.services.reports import ReportService
from zero_coref.services.validation import ValidationService


def register(subparsers: argparse._SubParsersAction, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("validate", parents=[common], help="check CoNLL files")
    parser.add_argument("paths", nargs="+", help="CoNLL files or directories")


def handle(args: argparse.Namespace) -> int:
    build_config(args, "validate", {f"path{i}": path for i, path in enumerate(args.paths)})
    findings = [
        finding for path in args.paths for finding in ValidationService.validate_path(path)
    ]
    if args.json:
        emit_json([finding.model_dump(mode="json") for finding in findings])
    else:
        emit(ReportService.findings_text(findings))
    return 1 if ValidationService.has_errors(findings) else 0
