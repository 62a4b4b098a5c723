"""``resolve``: run the pipeline or joint flow and write extended CoNLL output."""

import argparse
from pathlib import Path

from zero_coref.cli.commands.score import add_scoring_flags, read_documents
from zero_coref.cli.runner import buckets_arg, build_config, emit, emit_json, write_json
from zero_coref.core.config import settings
from zero_coref.core.conll import conll_files, read_conll_file, write_conll
from zero_coref.core.exceptions import CliError
from zero_coref.core.logging import get_logger
from zero_coref.models.documents import Document
from zero_coref.models.schemas import ResolutionResult, RunConfig
from zero_coref.services.features import HashEmbedder
from zero_coref.services.harness import HarnessService
from zero_coref.services.plugins import SubprocessAzpIdentifier, SubprocessCorefResolver
from zero_coref.services.reports import ReportService
from zero_coref.services.resolvers import (
    ColumnCorefResolver,
    GoldAzpIdentifier,
    GoldAzpResolver,
    GoldCorefResolver,
    NearestClusterAzpResolver,
    NearestClusterJointResolver,
    VerbGapIdentifier,
    serialized,
)
from zero_coref.services.scoring import ScoringService

logger = get_logger(__name__)


def register(subparsers: argparse._SubParsersAction, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser(
        "resolve", parents=[common], help="resolve AZPs with the pipeline or joint flow"
    )
    parser.add_argument("--conll", required=True, help="CoNLL file or directory")
    parser.add_argument("--mode", choices=("pipeline", "joint"), required=True)
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--gold", default=None, help="gold CoNLL for oracles and scoring")
    parser.add_argument("--coref", choices=("column", "gold"), default="column")
    parser.add_argument("--coref-cmd", default=None, help="external coreference resolver")
    parser.add_argument("--identifier", choices=("verb", "gold"), default="verb")
    parser.add_argument("--identifier-cmd", default=None, help="external AZP identifier")
    parser.add_argument("--azp-resolver", choices=("nearest", "gold"), default="nearest")
    parser.add_argument("--cluster-rep", choices=("first", "last"), default=None)
    parser.add_argument("--buckets", type=buckets_arg, default=None, help="e.g. 0,1,2,4,8")
    parser.add_argument(
        "--compare", action="store_true", help="also run the other mode and write diff.json"
    )
    add_scoring_flags(parser)


class _Resolvers:
    """Resolvers selected by the command-line flags."""

    def __init__(self, args: argparse.Namespace, config: RunConfig, gold: list[Document]):
        if "gold" in (args.coref, args.identifier, args.azp_resolver) and not gold:
            raise CliError("--gold is required for gold oracles")
        timeout = settings.plugin_timeout

        if args.coref_cmd:
            self.pipeline_coref = self.joint_coref = SubprocessCorefResolver(
                args.coref_cmd, timeout, config.seed
            )
        elif args.coref == "gold":
            self.pipeline_coref = self.joint_coref = GoldCorefResolver(gold)
        else:
            self.pipeline_coref = ColumnCorefResolver()
            self.joint_coref = NearestClusterJointResolver()

        if args.identifier_cmd:
            self.identifier = SubprocessAzpIdentifier(args.identifier_cmd, timeout, config.seed)
        elif args.identifier == "gold":
            self.identifier = GoldAzpIdentifier(gold)
        else:
            self.identifier = VerbGapIdentifier()

        # One gold AZP resolver per document.
        self.gold_azp_resolvers = (
            {document.doc_id: GoldAzpResolver([document]) for document in gold}
            if args.azp_resolver == "gold"
            else {}
        )
        self.azp_resolver = NearestClusterAzpResolver()

        if config.jobs > 1:
            self.pipeline_coref = serialized(self.pipeline_coref)
            self.joint_coref = serialized(self.joint_coref)
            self.identifier = serialized(self.identifier)
            self.azp_resolver = serialized(self.azp_resolver)

        self.embed = HashEmbedder(seed=config.seed)
        self.config = config

    def azp_resolver_for(self, document: Document) -> object:
        if not self.gold_azp_resolvers:
            return self.azp_resolver
        if document.doc_id not in self.gold_azp_resolvers:
            raise CliError(f"no gold document for: {document.doc_id}")
        return self.gold_azp_resolvers[document.doc_id]

    def run(self, document: Document, mode: str) -> ResolutionResult:
        if mode == "joint":
            return HarnessService.run_joint_test(document, self.identifier, self.joint_coref)
        return HarnessService.run_pipeline(
            document,
            self.pipeline_coref,
            self.identifier,
            self.azp_resolver_for(document),  # type: ignore[arg-type]
            strategy=self.config.cluster_representation,
            buckets=self.config.buckets,
            embed=self.embed,
        )


def handle(args: argparse.Namespace) -> int:
    config = build_config(args, "resolve", {"conll": args.conll, "gold": args.gold})
    gold = read_documents(args.gold) if args.gold else []
    resolvers = _Resolvers(args, config, gold)

    conll_root, out_dir = Path(args.conll), Path(args.out)
    paths = conll_files(conll_root)
    inputs = [(path, document) for path in paths for document in read_conll_file(path)]
    other = "joint" if args.mode == "pipeline" else "pipeline"

    def work(item: tuple[Path, Document]) -> tuple[ResolutionResult, ResolutionResult | None]:
        _, document = item
        result = resolvers.run(document, args.mode)
        return result, resolvers.run(document, other) if args.compare else None

    results = HarnessService.run_many(inputs, work, jobs=config.jobs)

    by_file: dict[Path, list[Document]] = {path: [] for path in paths}
    for (path, _), (result, _) in zip(inputs, results, strict=True):
        by_file[path].append(result.document)
    for path, documents in by_file.items():
        relative = path.name if conll_root.is_file() else path.relative_to(conll_root)
        target = out_dir / relative
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(write_conll(documents), encoding="utf-8")
    logger.info(f"Resolved {len(inputs)} document(s) in {args.mode} mode")

    abstained = sum(len(result.abstained) for result, _ in results)
    payload: dict[str, object] = {
        "documents": len(inputs),
        "attached_azps": sum(len(result.attached_azps) for result, _ in results),
        "abstained_azps": abstained,
        "config": config.echo(),
    }

    if gold:
        responses = [result.document for result, _ in results]
        wanted = {document.doc_id for document in responses}
        key = [document for document in gold if document.doc_id in wanted]
        missing = wanted - {document.doc_id for document in key}
        if missing:
            raise CliError(f"no gold document for: {', '.join(sorted(missing))}")
        report = ScoringService.score_documents(
            key,
            responses,
            include_pro=config.include_pro_in_coref,
            mode=config.azp_hit_mode,
            config=config.echo(),
        )
        score = ReportService.score_json(report)
        write_json(out_dir / "score.json", score)
        payload["score"] = score
        if not args.json:
            emit(ReportService.score_text(report))

    if args.compare:
        diffs = [
            HarnessService.compare(
                *((result, paired) if args.mode == "pipeline" else (paired, result))
            )
            for result, paired in results
            if paired is not None
        ]
        write_json(out_dir / "diff.json", ReportService.diff_json(diffs))
        payload["differing_documents"] = sum(not diff.is_empty for diff in diffs)
        if not args.json:
            emit(ReportService.diff_text(diffs))

    if args.json:
        emit_json(payload)
    elif not gold and not args.compare:
        emit(
            f"resolved {len(inputs)} document(s) in {args.mode} mode: "
            f"{payload['attached_azps']} AZP(s) attached, {abstained} abstained"
        )
    return 0
