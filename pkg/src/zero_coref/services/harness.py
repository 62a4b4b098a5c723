"""Pipeline and joint resolution flows over pluggable resolvers."""

from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

from zero_coref.core.config import settings
from zero_coref.core.conll import azp_positions, encode_mentions, mask_azps
from zero_coref.core.exceptions import ResolverContractViolation
from zero_coref.core.logging import get_logger
from zero_coref.models.coref import Azp, ClusterSet, Mention
from zero_coref.models.documents import Document
from zero_coref.models.schemas import Candidate, ResolutionDiff, ResolutionResult
from zero_coref.services.features import Embedder, FeatureService, HashEmbedder, Strategy
from zero_coref.services.merge import MergeService
from zero_coref.services.resolvers import AzpIdentifier, AzpResolver, CorefResolver

logger = get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def _masked(document: Document, flow: str) -> Document:
    if document.has_pro_rows:
        logger.warning(f"{flow}: masking *pro* rows of {document.doc_id} before resolution")
        return mask_azps(document)
    return document


def _check_mentions(document: Document, clusters: ClusterSet, resolver: object) -> None:
    """Mentions must lie inside their sentences; AZPs must sit on ``*pro*`` rows."""
    present = set(azp_positions(document))
    for member in clusters.members:
        try:
            sentence = document.sentence(member.part, member.sentence)
        except IndexError as e:
            raise ResolverContractViolation(
                f"{type(resolver).__name__} returned {member} outside {document.doc_id}"
            ) from e
        if isinstance(member, Mention):
            if member.end >= len(sentence.words):
                raise ResolverContractViolation(
                    f"{type(resolver).__name__} returned {member} beyond its sentence"
                )
        elif member not in present:
            raise ResolverContractViolation(
                f"{type(resolver).__name__} returned {member} with no *pro* row"
            )


def _check_gaps(document: Document, azps: Sequence[Azp], identifier: object) -> list[Azp]:
    name = type(identifier).__name__
    if len(set(azps)) != len(azps):
        raise ResolverContractViolation(f"{name} returned duplicate gaps")
    for azp in azps:
        try:
            sentence = document.sentence(azp.part, azp.sentence)
        except IndexError as e:
            raise ResolverContractViolation(f"{name} returned {azp} outside the document") from e
        if azp.gap_index > len(sentence.words):
            raise ResolverContractViolation(f"{name} returned {azp} beyond its sentence")
    return sorted(azps, key=lambda azp: azp.sort_key)


def _renumber_slots(azps: Sequence[Azp]) -> list[Azp]:
    """Slots as they will be after insertion: the rank within each gap."""
    seen: dict[tuple[int, int, int], int] = {}
    result = []
    for azp in sorted(azps, key=lambda azp: azp.sort_key):
        key = (azp.part, azp.sentence, azp.gap_index)
        result.append(azp.model_copy(update={"slot": seen.get(key, 0)}))
        seen[key] = seen.get(key, 0) + 1
    return result


class HarnessService:
    """Service orchestrating pipeline and joint resolution."""

    @staticmethod
    def candidates(
        document: Document,
        azp: Azp,
        clusters: ClusterSet,
        strategy: Strategy,
        embed: Embedder,
        buckets: Sequence[int],
    ) -> list[Candidate]:
        """Every cluster with an overt mention, with its representative and features."""
        result = []
        for cluster in clusters:
            if not cluster.mentions:
                continue
            rep = FeatureService.represent_cluster(cluster, strategy, azp)
            features = FeatureService.assemble_azp_features(document, azp, rep, embed, buckets)
            pair = FeatureService.concat_pair(
                FeatureService.embed_mention(document, rep, embed), features, buckets
            )
            result.append(
                Candidate(
                    cluster_id=cluster.id,
                    representative=rep,
                    features=features,
                    pair=pair,
                    nearest_preceding=FeatureService.nearest_preceding(cluster, azp),
                )
            )
        return result

    @staticmethod
    def run_pipeline(
        document: Document,
        coref: CorefResolver,
        identifier: AzpIdentifier,
        azp_resolver: AzpResolver,
        strategy: Strategy | None = None,
        buckets: Sequence[int] | None = None,
        embed: Embedder | None = None,
    ) -> ResolutionResult:
        """Resolve coreference, identify AZPs, then attach each AZP to a cluster.

        AZPs the resolver abstains on are left out of the output. Overt mentions
        never move between clusters.

        Raises:
            ResolverContractViolation: If a resolver answers outside its universe
        """
        strategy = strategy or settings.cluster_representation  # type: ignore[assignment]
        thresholds = tuple(buckets) if buckets is not None else settings.distance_buckets
        embed = embed or HashEmbedder()
        masked = _masked(document, "pipeline")

        clusters = coref.resolve(masked)
        _check_mentions(masked, clusters, coref)
        azps = _renumber_slots(_check_gaps(masked, identifier.identify(masked), identifier))

        groups: dict[int, list[Mention | Azp]] = {
            cluster.id: list(cluster.members) for cluster in clusters
        }
        attached: list[tuple[Azp, int | None]] = []
        abstained: list[Azp] = []
        for azp in azps:
            offered = HarnessService.candidates(
                masked, azp, clusters, strategy, embed, thresholds  # type: ignore[arg-type]
            )
            chosen = azp_resolver.resolve_azp(azp, offered)
            if chosen is None:
                abstained.append(azp)
                continue
            if chosen not in {candidate.cluster_id for candidate in offered}:
                raise ResolverContractViolation(
                    f"{type(azp_resolver).__name__} chose unknown cluster {chosen} for {azp}"
                )
            attached.append((azp, chosen))

        # Slots of kept AZPs are re-ranked once abstained ones are dropped.
        kept = _renumber_slots([azp for azp, _ in attached])
        for (_, chosen), azp in zip(
            sorted(attached, key=lambda item: item[0].sort_key), kept, strict=True
        ):
            groups[chosen].append(azp)
        if abstained:
            logger.warning(f"Pipeline abstained on {len(abstained)} AZP(s) in {document.doc_id}")

        result = ClusterSet.from_groups(groups)
        extended, index_map = MergeService.insert_azps(masked, [(azp, None) for azp in kept])
        return ResolutionResult(
            doc_id=document.doc_id,
            mode="pipeline",
            clusters=result,
            document=encode_mentions(result, extended),
            index_map=index_map,
            abstained=tuple(abstained),
        )

    @staticmethod
    def run_joint_train_view(document: Document) -> Document:
        """Training view for joint learning: ``*pro*`` rows stay as ordinary mentions."""
        if not document.has_pro_rows:
            logger.warning(f"Joint training view of {document.doc_id} contains no AZPs")
        return document

    @staticmethod
    def run_joint_test(
        document: Document, identifier: AzpIdentifier, coref: CorefResolver
    ) -> ResolutionResult:
        """Tag identified gaps with ``*pro*`` rows, then cluster the tagged document.

        Tagged AZPs the resolver leaves unclustered are reported as abstained and
        removed from the output document.

        Raises:
            ResolverContractViolation: If a resolver answers outside its universe
        """
        masked = _masked(document, "joint")
        azps = _renumber_slots(_check_gaps(masked, identifier.identify(masked), identifier))
        tagged, _ = MergeService.insert_azps(masked, [(azp, None) for azp in azps])

        clusters = coref.resolve(tagged)
        _check_mentions(tagged, clusters, coref)

        used = set(clusters.azps)
        abstained = [azp for azp in azps if azp not in used]
        if abstained:
            logger.warning(
                f"Joint run left {len(abstained)} AZP(s) unclustered in {document.doc_id}"
            )
            kept = [azp for azp in azps if azp in used]
            renamed = dict(zip(kept, _renumber_slots(kept), strict=True))
            clusters = ClusterSet.from_groups(
                {
                    cluster.id: [
                        renamed[member] if isinstance(member, Azp) else member
                        for member in cluster.members
                    ]
                    for cluster in clusters
                }
            )
            tagged, index_map = MergeService.insert_azps(
                masked, [(azp, None) for azp in renamed.values()]
            )
        else:
            _, index_map = MergeService.insert_azps(masked, [(azp, None) for azp in azps])

        return ResolutionResult(
            doc_id=document.doc_id,
            mode="joint",
            clusters=clusters,
            document=encode_mentions(clusters, tagged),
            index_map=index_map,
            abstained=tuple(abstained),
        )

    @staticmethod
    def compare(pipeline: ResolutionResult, joint: ResolutionResult) -> ResolutionDiff:
        """Where pipeline and joint output disagree on one document."""
        pipeline_index = pipeline.clusters.member_index()
        joint_index = joint.clusters.member_index()

        def overt(
            clusters: ClusterSet, index: dict[Mention | Azp, int], azp: Azp
        ) -> frozenset[Mention]:
            cluster = clusters.get(index[azp]) if azp in index else None
            return frozenset(cluster.mentions) if cluster else frozenset()

        moved = []
        for azp in sorted(
            set(pipeline.clusters.azps) | set(joint.clusters.azps), key=lambda azp: azp.sort_key
        ):
            if overt(pipeline.clusters, pipeline_index, azp) != overt(
                joint.clusters, joint_index, azp
            ):
                moved.append((azp, pipeline_index.get(azp), joint_index.get(azp)))

        def described(clusters: ClusterSet) -> set[tuple[str, ...]]:
            return {
                tuple(str(member) for member in cluster.members) for cluster in clusters
            }

        pipeline_clusters = described(pipeline.clusters)
        joint_clusters = described(joint.clusters)
        return ResolutionDiff(
            doc_id=pipeline.doc_id,
            moved_azps=tuple(moved),
            pipeline_only=tuple(sorted(pipeline_clusters - joint_clusters)),
            joint_only=tuple(sorted(joint_clusters - pipeline_clusters)),
        )

    @staticmethod
    def run_many(items: Sequence[T], worker: Callable[[T], R], jobs: int | None = None) -> list[R]:
        """Apply ``worker`` to every item, in parallel threads when ``jobs > 1``.

        Results keep the order of ``items``.
        """
        workers = jobs or settings.jobs
        if workers <= 1 or len(items) <= 1:
            return [worker(item) for item in items]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(worker, items))
