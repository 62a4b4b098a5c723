"""Diagnostics for CoNLL files, extended ones included."""

from collections import Counter
from pathlib import Path

from zero_coref.core.conll import (
    azp_positions,
    conll_files,
    extract_mentions,
    iter_spans,
    parse_conll,
)
from zero_coref.core.exceptions import (
    ColumnCountMismatch,
    ConllFormatError,
    InvariantViolation,
    MalformedCorefTag,
    MalformedHeader,
    MalformedParseBit,
    NonUtf8Input,
    UnbalancedCorefBrackets,
)
from zero_coref.core.logging import get_logger
from zero_coref.models.documents import Document
from zero_coref.models.schemas import Finding

logger = get_logger(__name__)

FORMAT_CODES: dict[type[ConllFormatError], str] = {
    NonUtf8Input: "non_utf8",
    MalformedHeader: "malformed_header",
    ColumnCountMismatch: "column_count",
    MalformedCorefTag: "malformed_coref_tag",
    UnbalancedCorefBrackets: "unbalanced_coref",
    MalformedParseBit: "parse_bit",
}


class ValidationService:
    """Service for checking CoNLL files without modifying them."""

    @staticmethod
    def validate_bytes(data: bytes | str, path: str = "<input>") -> list[Finding]:
        """Check one file's contents.

        Format errors stop the check at the first one, as parsing cannot continue.
        """
        try:
            documents = parse_conll(data)
        except ConllFormatError as e:
            code = next(
                (code for cls, code in FORMAT_CODES.items() if isinstance(e, cls)), "format"
            )
            message = e.args[0].split(": ", 1)[-1] if e.line is not None else e.args[0]
            return [
                Finding(path=path, severity="error", code=code, message=message, line=e.line)
            ]
        findings: list[Finding] = []
        for document in documents:
            findings.extend(ValidationService.validate_document(document, path))
        return findings

    @staticmethod
    def validate_document(document: Document, path: str = "<input>") -> list[Finding]:
        """Chain-level checks on a parsed document."""
        findings: list[Finding] = []

        def add(severity: str, code: str, message: str) -> None:
            findings.append(
                Finding(
                    path=path,
                    severity=severity,  # type: ignore[arg-type]
                    code=code,
                    message=message,
                    doc_id=document.doc_id,
                )
            )

        spans = Counter(iter_spans(document))
        for (chain_id, part, sentence, first, last), count in sorted(spans.items()):
            if count > 1:
                add(
                    "error",
                    "duplicate_chain_id",
                    f"chain {chain_id} tags rows {first}-{last} of part {part} "
                    f"sentence {sentence} {count} times",
                )
        if findings:
            return findings

        try:
            clusters = extract_mentions(document)
        except InvariantViolation as e:
            add("error", "shared_mention", str(e))
            return findings

        for cluster in clusters:
            if not cluster.mentions:
                add("error", "azp_only_chain", f"chain {cluster.id} contains only AZPs")
            elif len(cluster.members) == 1:
                add("warning", "singleton_chain", f"chain {cluster.id} has a single mention")

        tagged = set(clusters.azps)
        for azp in azp_positions(document):
            if azp not in tagged:
                add("warning", "untagged_pro", f"{azp} belongs to no chain")
        return findings

    @staticmethod
    def validate_path(path: str | Path) -> list[Finding]:
        """Check every CoNLL file under a path, in lexicographic order."""
        findings: list[Finding] = []
        for file_path in conll_files(path):
            file_findings = ValidationService.validate_bytes(file_path.read_bytes(), str(file_path))
            logger.debug(f"{file_path}: {len(file_findings)} finding(s)")
            findings.extend(file_findings)
        return findings

    @staticmethod
    def has_errors(findings: list[Finding]) -> bool:
        return any(finding.severity == "error" for finding in findings)
