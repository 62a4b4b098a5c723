"""``merge``: build extended CoNLL files from CoNLL + ONF pairs."""

import argparse
from pathlib import Path, PurePosixPath

from zero_coref.cli.runner import build_config, emit, emit_json, write_json
from zero_coref.core.conll import conll_files, decode, parse_conll, write_conll
from zero_coref.core.exceptions import CliError
from zero_coref.core.logging import get_logger
from zero_coref.core.onf import read_onf_file
from zero_coref.models.documents import Document
from zero_coref.models.schemas import MergePlan, RejectRecord
from zero_coref.services.harness import HarnessService
from zero_coref.services.merge import MergeService

logger = get_logger(__name__)


def register(subparsers: argparse._SubParsersAction, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser(
        "merge", parents=[common], help="inject ONF AZPs into CoNLL files as *pro* rows"
    )
    parser.add_argument("--conll", required=True, help="CoNLL file or directory")
    parser.add_argument("--onf", required=True, help="directory of .onf files")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument(
        "--reject-log", default=None, help="reject log path (default OUT/rejects.json)"
    )


def _onf_index(root: Path) -> dict[str, Path]:
    files = [root] if root.is_file() else sorted(root.rglob("*.onf"))
    return {path.stem: path for path in files}


def _merge_file(
    data: bytes, documents: list[Document], onf_paths: dict[str, Path]
) -> tuple[str, list[MergePlan]]:
    plans = [
        MergeService.plan_merge(
            read_onf_file(onf_paths[PurePosixPath(document.doc_id).name]), document, strict=False
        )
        for document in documents
    ]
    if all(plan.is_empty for plan in plans):
        return decode(data), plans
    merged = [
        MergeService.apply_merge(plan, document)
        for plan, document in zip(plans, documents, strict=True)
    ]
    return write_conll(merged), plans


def handle(args: argparse.Namespace) -> int:
    config = build_config(args, "merge", {"conll": args.conll, "onf": args.onf})
    conll_root, out_dir = Path(args.conll), Path(args.out)
    paths = conll_files(conll_root)
    onf_paths = _onf_index(Path(args.onf))

    parsed = [(data, parse_conll(data)) for data in (path.read_bytes() for path in paths)]
    doc_ids = [document.doc_id for _, documents in parsed for document in documents]
    unmatched = sorted(
        doc_id for doc_id in doc_ids if PurePosixPath(doc_id).name not in onf_paths
    )
    if unmatched:
        raise CliError(f"no ONF file for document(s): {', '.join(unmatched)}")

    results = HarnessService.run_many(
        parsed, lambda item: _merge_file(*item, onf_paths), jobs=config.jobs
    )

    rejects: list[RejectRecord] = []
    insertions = new_chains = 0
    for path, (text, plans) in zip(paths, results, strict=True):
        relative = path.name if conll_root.is_file() else path.relative_to(conll_root)
        target = out_dir / relative
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
        for plan in plans:
            rejects.extend(plan.rejects)
            insertions += len(plan.insertions)
            new_chains += len(plan.new_mentions)

    reject_log = Path(args.reject_log) if args.reject_log else out_dir / "rejects.json"
    write_json(reject_log, [record.model_dump(mode="json") for record in rejects])

    summary = {
        "files": len(paths),
        "documents": len(doc_ids),
        "insertions": insertions,
        "new_chains": new_chains,
        "rejected": len(rejects),
        "config": config.echo(),
    }
    if args.json:
        emit_json(summary)
    else:
        emit(
            f"merged {summary['documents']} document(s) in {summary['files']} file(s): "
            f"{insertions} AZP(s) inserted, {new_chains} new chain(s), {len(rejects)} rejected"
        )
    return 0
