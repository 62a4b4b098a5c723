"""Resolver interfaces plus the baseline and gold-oracle implementations."""

import threading
from collections.abc import Callable, Iterable, Sequence
from typing import Protocol, runtime_checkable

from zero_coref.core.config import settings
from zero_coref.core.conll import azp_positions, extract_mentions
from zero_coref.core.exceptions import ResolutionError
from zero_coref.core.logging import get_logger
from zero_coref.models.coref import Azp, ClusterSet, Mention
from zero_coref.models.documents import Document
from zero_coref.models.schemas import Candidate
from zero_coref.services.features import FeatureService, precedes

logger = get_logger(__name__)

GapClassifier = Callable[[Document, Azp], bool]


@runtime_checkable
class CorefResolver(Protocol):
    """Clusters the mentions (and tagged ``*pro*`` rows) of a document."""

    concurrent_safe: bool

    def resolve(self, document: Document) -> ClusterSet:
        """Return a cluster partition of the document's mentions."""
        ...


@runtime_checkable
class AzpIdentifier(Protocol):
    """Finds the gaps of a document that hold an AZP."""

    concurrent_safe: bool

    def identify(self, document: Document) -> list[Azp]:
        """Return distinct, valid gap positions."""
        ...


@runtime_checkable
class AzpResolver(Protocol):
    """Chooses the cluster an AZP refers to."""

    concurrent_safe: bool

    def resolve_azp(self, azp: Azp, candidates: Sequence[Candidate]) -> int | None:
        """Return a candidate cluster id, or None to abstain."""
        ...


class SerializedResolver:
    """Wraps a resolver that is not safe to call concurrently behind a lock."""

    concurrent_safe = True

    def __init__(self, inner: object):
        self.inner = inner
        self._lock = threading.Lock()

    def resolve(self, document: Document) -> ClusterSet:
        with self._lock:
            return self.inner.resolve(document)  # type: ignore[attr-defined]

    def identify(self, document: Document) -> list[Azp]:
        with self._lock:
            return self.inner.identify(document)  # type: ignore[attr-defined]

    def resolve_azp(self, azp: Azp, candidates: Sequence[Candidate]) -> int | None:
        with self._lock:
            return self.inner.resolve_azp(azp, candidates)  # type: ignore[attr-defined]


def serialized(resolver: object) -> object:
    """Return the resolver itself if it tolerates concurrency, else a locked wrapper."""
    if getattr(resolver, "concurrent_safe", False):
        return resolver
    logger.debug(f"Serializing calls to {type(resolver).__name__}")
    return SerializedResolver(resolver)


def baseline_resolve_nearest(azp: Azp, candidates: Iterable[tuple[int, Mention]]) -> int | None:
    """Cluster whose representative ends nearest before the AZP.

    Ties go to the smaller cluster id; returns None when no representative
    precedes the AZP.
    """
    best: tuple[tuple[int, int, int], int] | None = None
    for cluster_id, rep in candidates:
        if not precedes(rep, azp):
            continue
        position = (rep.part, rep.sentence, rep.end)
        if best is None or position > best[0] or (position == best[0] and cluster_id < best[1]):
            best = (position, cluster_id)
    return None if best is None else best[1]


class ColumnCorefResolver:
    """Reads clusters straight from the document's coreference column."""

    concurrent_safe = True

    def resolve(self, document: Document) -> ClusterSet:
        return extract_mentions(document)


class NearestClusterJointResolver:
    """Joint baseline over a tagged document.

    Overt mentions keep their column clusters; each untagged ``*pro*`` row joins
    the cluster whose last mention ends nearest before it.
    """

    concurrent_safe = True

    def resolve(self, document: Document) -> ClusterSet:
        clusters = extract_mentions(document)
        tagged = set(clusters.azps)
        groups = {cluster.id: list(cluster.members) for cluster in clusters}
        for azp in azp_positions(document):
            if azp in tagged:
                continue
            nearest = (
                (cluster.id, FeatureService.nearest_preceding(cluster, azp)) for cluster in clusters
            )
            chosen = baseline_resolve_nearest(
                azp,
                ((cluster_id, mention) for cluster_id, mention in nearest if mention is not None),
            )
            if chosen is not None:
                groups[chosen].append(azp)
        return ClusterSet.from_groups(groups)


class VerbGapIdentifier:
    """Proposes the gap after every verb, optionally filtered by a classifier."""

    concurrent_safe = True

    def __init__(
        self, prefixes: Sequence[str] | None = None, classifier: GapClassifier | None = None
    ):
        self.prefixes = tuple(prefixes or settings.verb_pos_prefixes)
        self.classifier = classifier

    def identify(self, document: Document) -> list[Azp]:
        return baseline_identify_verb_gaps(document, self.classifier, self.prefixes)


def baseline_identify_verb_gaps(
    document: Document,
    classifier: GapClassifier | None = None,
    prefixes: Sequence[str] | None = None,
) -> list[Azp]:
    """Gaps immediately after verb-tagged overt tokens that the classifier accepts."""
    verb_prefixes = tuple(prefixes or settings.verb_pos_prefixes)
    gaps = []
    for part, index, sentence in document.iter_sentences():
        for ordinal, row in enumerate(sentence.overt_rows):
            if row.pos.startswith(verb_prefixes):
                azp = Azp(part=part, sentence=index, gap_index=ordinal + 1)
                if classifier is None or classifier(document, azp):
                    gaps.append(azp)
    return gaps


class NearestClusterAzpResolver:
    """Attaches an AZP to the cluster with a mention ending nearest before it.

    The choice ignores the cluster representation used for features.
    """

    concurrent_safe = True

    def resolve_azp(self, azp: Azp, candidates: Sequence[Candidate]) -> int | None:
        return baseline_resolve_nearest(
            azp,
            (
                (candidate.cluster_id, candidate.nearest_preceding)
                for candidate in candidates
                if candidate.nearest_preceding is not None
            ),
        )


class _GoldLookup:
    concurrent_safe = True

    def __init__(self, gold_documents: Iterable[Document]):
        self.documents = {document.doc_id: document for document in gold_documents}
        self._clusters = {
            doc_id: extract_mentions(document) for doc_id, document in self.documents.items()
        }

    def clusters(self, doc_id: str) -> ClusterSet:
        if doc_id not in self._clusters:
            raise ResolutionError(f"no gold document {doc_id!r}")
        return self._clusters[doc_id]


class GoldCorefResolver(_GoldLookup):
    """Returns gold clusters restricted to what the input document contains.

    AZP members are kept only where the input has a ``*pro*`` row in that gap.
    """

    def resolve(self, document: Document) -> ClusterSet:
        gold = self.clusters(document.doc_id)
        present = set(azp_positions(document))
        return ClusterSet.from_groups(
            {
                cluster.id: [
                    member
                    for member in cluster.members
                    if isinstance(member, Mention) or member in present
                ]
                for cluster in gold
            }
        )


class GoldAzpIdentifier(_GoldLookup):
    """Returns the gold ``*pro*`` positions."""

    def identify(self, document: Document) -> list[Azp]:
        if document.doc_id not in self.documents:
            raise ResolutionError(f"no gold document {document.doc_id!r}")
        return azp_positions(self.documents[document.doc_id])


class GoldAzpResolver(_GoldLookup):
    """Picks the candidate whose representative is in the AZP's gold cluster.

    AZPs are looked up by position alone; give it the gold of one document.
    """

    def __init__(self, gold_documents: Iterable[Document]):
        super().__init__(gold_documents)
        self._gold_mentions: dict[Azp, list[frozenset[Mention]]] = {}
        for clusters in self._clusters.values():
            for cluster in clusters:
                for azp in cluster.azps:
                    self._gold_mentions.setdefault(azp, []).append(frozenset(cluster.mentions))

    def resolve_azp(self, azp: Azp, candidates: Sequence[Candidate]) -> int | None:
        for mentions in self._gold_mentions.get(azp, []):
            for candidate in candidates:
                if candidate.representative in mentions:
                    return candidate.cluster_id
        return None
