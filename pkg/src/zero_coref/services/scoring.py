"""Coreference metrics (MUC, B-cubed, CEAF-phi4, CoNLL average) and AZP scores.

Metrics work on counts so that scores over a corpus are ratios of summed
numerators and denominators, never averages of per-document ratios.
"""

from collections import defaultdict
from collections.abc import Hashable, Iterable, Sequence
from typing import Any, Literal

import numpy as np
from scipy.optimize import linear_sum_assignment

from zero_coref.core.config import settings
from zero_coref.core.conll import extract_mentions
from zero_coref.core.exceptions import UnmatchedDocuments
from zero_coref.core.logging import get_logger
from zero_coref.models.coref import Azp, ClusterSet
from zero_coref.models.documents import Document
from zero_coref.models.schemas import AzpResolutionRecord, ScoreReport, ScoreTriple

logger = get_logger(__name__)

HitMode = Literal["position", "entity"]
Counts = tuple[float, float, float, float]
Entities = Sequence[frozenset[Hashable]]


def _index(entities: Entities) -> dict[Hashable, int]:
    return {member: i for i, entity in enumerate(entities) for member in entity}


def muc_counts(key: Entities, response: Entities) -> Counts:
    """Link-based counts ``(recall_num, recall_den, precision_num, precision_den)``."""

    def links(entities: Entities, other: Entities) -> tuple[float, float]:
        mapping = _index(other)
        num = den = 0
        for entity in entities:
            partitions = {mapping[m] for m in entity if m in mapping}
            unmapped = sum(1 for m in entity if m not in mapping)
            num += len(entity) - len(partitions) - unmapped
            den += len(entity) - 1
        return num, den

    recall_num, recall_den = links(key, response)
    precision_num, precision_den = links(response, key)
    return recall_num, recall_den, precision_num, precision_den


def b_cubed_counts(key: Entities, response: Entities) -> Counts:
    """Mention-based counts; twinless mentions score zero overlap."""

    def overlap(entities: Entities, other: Entities) -> tuple[float, float]:
        num = 0.0
        den = 0
        mapping = _index(other)
        for entity in entities:
            shared: dict[int, int] = defaultdict(int)
            for m in entity:
                if m in mapping:
                    shared[mapping[m]] += 1
            num += sum(count * count for count in shared.values()) / len(entity)
            den += len(entity)
        return num, den

    recall_num, recall_den = overlap(key, response)
    precision_num, precision_den = overlap(response, key)
    return recall_num, recall_den, precision_num, precision_den


def phi4(key: frozenset[Hashable], response: frozenset[Hashable]) -> float:
    return 2 * len(key & response) / (len(key) + len(response))


def ceaf_phi4_counts(key: Entities, response: Entities) -> Counts:
    """Entity-based counts under the optimal one-to-one alignment."""
    if not key or not response:
        return 0.0, len(key), 0.0, len(response)
    scores = np.zeros((len(key), len(response)))
    for i, key_entity in enumerate(key):
        for j, response_entity in enumerate(response):
            scores[i, j] = phi4(key_entity, response_entity)
    rows, cols = linear_sum_assignment(scores, maximize=True)
    similarity = float(scores[rows, cols].sum())
    return similarity, len(key), similarity, len(response)


def _entities(clusters: ClusterSet, include_pro: bool) -> list[frozenset[Hashable]]:
    source = clusters if include_pro else clusters.without_azps()
    return [frozenset(cluster.members) for cluster in source]


def azp_records(clusters: ClusterSet) -> list[AzpResolutionRecord]:
    """Every AZP of a cluster set with the cluster it belongs to."""
    return [
        AzpResolutionRecord(position=azp, resolved_cluster=cluster.id)
        for cluster in clusters
        for azp in cluster.azps
    ]


def azp_hit_count(
    key: Sequence[tuple[Azp, int]],
    response: Sequence[AzpResolutionRecord],
    key_clusters: ClusterSet,
    response_clusters: ClusterSet,
    mode: HitMode,
) -> int:
    """Number of response AZPs matched one-to-one with key AZPs.

    AZPs match when they sit in the same gap; in ``entity`` mode their clusters
    must also share an overt mention.
    """

    def gap(azp: Azp) -> tuple[int, int, int]:
        return (azp.part, azp.sentence, azp.gap_index)

    key_by_gap: dict[tuple[int, int, int], list[int]] = defaultdict(list)
    for azp, cluster_id in key:
        key_by_gap[gap(azp)].append(cluster_id)
    response_by_gap: dict[tuple[int, int, int], list[int]] = defaultdict(list)
    for record in response:
        response_by_gap[gap(record.position)].append(record.resolved_cluster)

    hits = 0
    for position, responses in response_by_gap.items():
        keys = key_by_gap.get(position, [])
        if not keys:
            continue
        if mode == "position":
            hits += min(len(keys), len(responses))
            continue
        matrix = np.zeros((len(keys), len(responses)))
        for i, key_id in enumerate(keys):
            key_cluster = key_clusters.get(key_id)
            for j, response_id in enumerate(responses):
                response_cluster = response_clusters.get(response_id)
                if response_cluster is None:
                    logger.warning(f"AZP resolved to unknown response cluster {response_id}")
                    continue
                if key_cluster is not None and set(key_cluster.mentions) & set(
                    response_cluster.mentions
                ):
                    matrix[i, j] = 1.0
        rows, cols = linear_sum_assignment(matrix, maximize=True)
        hits += int(matrix[rows, cols].sum())
    return hits


class ScoringService:
    """Service for coreference and AZP resolution scores."""

    @staticmethod
    def score_muc(key: ClusterSet, response: ClusterSet) -> ScoreTriple:
        return ScoreTriple.from_counts(*muc_counts(key.as_sets(), response.as_sets()))

    @staticmethod
    def score_b_cubed(key: ClusterSet, response: ClusterSet) -> ScoreTriple:
        return ScoreTriple.from_counts(*b_cubed_counts(key.as_sets(), response.as_sets()))

    @staticmethod
    def score_ceaf_phi4(key: ClusterSet, response: ClusterSet) -> ScoreTriple:
        return ScoreTriple.from_counts(*ceaf_phi4_counts(key.as_sets(), response.as_sets()))

    @staticmethod
    def conll_average(muc: ScoreTriple, b_cubed: ScoreTriple, ceaf: ScoreTriple) -> float:
        """Mean of the three F1 values."""
        return (muc.f1 + b_cubed.f1 + ceaf.f1) / 3

    @staticmethod
    def score_azp(
        key: Sequence[tuple[Azp, int]],
        response: Sequence[AzpResolutionRecord],
        key_clusters: ClusterSet,
        response_clusters: ClusterSet,
        mode: HitMode | None = None,
    ) -> ScoreTriple:
        """AZP resolution recall (hits / key AZPs) and precision (hits / response AZPs).

        Args:
            key: Gold AZPs with their gold cluster ids
            response: Resolved AZPs of the system
            key_clusters: Gold clusters
            response_clusters: System clusters
            mode: ``position`` or ``entity`` (defaults to settings)

        Returns:
            Score triple
        """
        hit_mode: HitMode = mode or settings.azp_hit_mode  # type: ignore[assignment]
        hits = azp_hit_count(key, response, key_clusters, response_clusters, hit_mode)
        return ScoreTriple.from_counts(hits, len(key), hits, len(response))

    @staticmethod
    def score_documents(
        key_documents: Iterable[Document],
        response_documents: Iterable[Document],
        include_pro: bool | None = None,
        mode: HitMode | None = None,
        config: dict[str, Any] | None = None,
    ) -> ScoreReport:
        """Score response documents against key documents matched by id.

        Raises:
            UnmatchedDocuments: If the two sides hold different document ids
        """
        keys = {document.doc_id: document for document in key_documents}
        responses = {document.doc_id: document for document in response_documents}
        if set(keys) != set(responses):
            missing = sorted(set(keys) ^ set(responses))
            raise UnmatchedDocuments(f"documents present on one side only: {', '.join(missing)}")
        evaluator = CorefEvaluator(include_pro=include_pro, mode=mode)
        for doc_id in sorted(keys):
            evaluator.update(extract_mentions(keys[doc_id]), extract_mentions(responses[doc_id]))
        return evaluator.report(config)


class CorefEvaluator:
    """Accumulates metric counts over documents."""

    METRICS = ("muc", "b_cubed", "ceaf_phi4")

    def __init__(self, include_pro: bool | None = None, mode: HitMode | None = None):
        self.include_pro = settings.include_pro_in_coref if include_pro is None else include_pro
        self.mode: HitMode = mode or settings.azp_hit_mode  # type: ignore[assignment]
        self.counts = {metric: np.zeros(4) for metric in self.METRICS}
        self.azp_counts = np.zeros(3)  # hits, key, response
        self.documents = 0

    def update(self, key: ClusterSet, response: ClusterSet) -> None:
        """Add one document's key and response clusters."""
        key_entities = _entities(key, self.include_pro)
        response_entities = _entities(response, self.include_pro)
        self.counts["muc"] += muc_counts(key_entities, response_entities)
        self.counts["b_cubed"] += b_cubed_counts(key_entities, response_entities)
        self.counts["ceaf_phi4"] += ceaf_phi4_counts(key_entities, response_entities)

        key_azps = [(record.position, record.resolved_cluster) for record in azp_records(key)]
        response_azps = azp_records(response)
        hits = azp_hit_count(key_azps, response_azps, key, response, self.mode)
        self.azp_counts += (hits, len(key_azps), len(response_azps))
        self.documents += 1

    def triple(self, metric: str) -> ScoreTriple:
        return ScoreTriple.from_counts(*self.counts[metric].tolist())

    def report(self, config: dict[str, Any] | None = None) -> ScoreReport:
        """Scores over every document added so far."""
        muc, b_cubed, ceaf = (self.triple(metric) for metric in self.METRICS)
        hits, key_total, response_total = self.azp_counts.tolist()
        return ScoreReport(
            muc=muc,
            b_cubed=b_cubed,
            ceaf_phi4=ceaf,
            conll_avg_f1=ScoringService.conll_average(muc, b_cubed, ceaf),
            azp=ScoreTriple.from_counts(hits, key_total, hits, response_total),
            documents=self.documents,
            config=config or {},
        )
