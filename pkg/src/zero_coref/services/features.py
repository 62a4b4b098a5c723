"""AZP and cluster features: representation, same-sentence, distance, pairing."""

import hashlib
import threading
from bisect import bisect_right
from collections.abc import Callable, Sequence
from typing import Literal

import numpy as np

from zero_coref.core.config import settings
from zero_coref.core.exceptions import DimensionMismatch, FeatureError, NoOvertMention
from zero_coref.models.coref import Azp, AzpFeatures, Cluster, Embedding, Mention
from zero_coref.models.documents import Document

# Layout of concat_pair output; bump when the order or encoding changes.
PAIR_LAYOUT_VERSION = 1

SENTENCE_START = "<s>"
SENTENCE_END = "</s>"

Strategy = Literal["first", "last"]
Embedder = Callable[[str], Embedding]


class HashEmbedder:
    """Deterministic word embeddings seeded from a hash of the word."""

    def __init__(self, dim: int | None = None, seed: int | None = None):
        self.dim = dim or settings.embedding_dim
        self.seed = settings.seed if seed is None else seed
        if self.dim <= 0:
            raise DimensionMismatch(f"embedding dimension must be positive, got {self.dim}")
        self._cache: dict[str, Embedding] = {}
        self._lock = threading.Lock()

    def __call__(self, word: str) -> Embedding:
        with self._lock:
            cached = self._cache.get(word)
        if cached is not None:
            return cached
        digest = hashlib.sha256(f"{self.seed}\x00{word}".encode()).digest()
        rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
        embedding = Embedding(values=tuple(rng.standard_normal(self.dim).tolist()))
        with self._lock:
            return self._cache.setdefault(word, embedding)


def precedes(mention: Mention, azp: Azp) -> bool:
    """Whether a mention ends before the AZP's gap."""
    return (mention.part, mention.sentence, mention.end) < (azp.part, azp.sentence, azp.gap_index)


class FeatureService:
    """Feature computations pairing an AZP with a candidate cluster."""

    @staticmethod
    def represent_cluster(cluster: Cluster, strategy: Strategy, anchor: Azp) -> Mention:
        """Pick the mention that stands for a cluster.

        ``first`` takes the earliest overt mention. ``last`` takes the latest overt
        mention preceding the anchor, or the latest overall if none precedes it.

        Raises:
            NoOvertMention: If the cluster holds only AZPs
        """
        mentions = cluster.mentions
        if not mentions:
            raise NoOvertMention(f"cluster {cluster.id} has no overt mention")
        if strategy == "first":
            return mentions[0]
        if strategy != "last":
            raise FeatureError(f"unknown cluster representation {strategy!r}")
        return FeatureService.nearest_preceding(cluster, anchor) or mentions[-1]

    @staticmethod
    def nearest_preceding(cluster: Cluster, anchor: Azp) -> Mention | None:
        """Overt mention of the cluster ending nearest before the anchor's gap."""
        preceding = [mention for mention in cluster.mentions if precedes(mention, anchor)]
        return max(
            preceding,
            key=lambda mention: (mention.part, mention.sentence, mention.end),
            default=None,
        )

    @staticmethod
    def same_sentence(azp: Azp, rep: Mention) -> bool:
        return (azp.part, azp.sentence) == (rep.part, rep.sentence)

    @staticmethod
    def cluster_distance(azp: Azp, rep: Mention, buckets: Sequence[int] | None = None) -> int:
        """Bucket index of the sentence distance between an AZP and a mention.

        Mentions in another part fall into the last bucket.
        """
        thresholds = tuple(buckets) if buckets is not None else settings.distance_buckets
        if azp.part != rep.part:
            return len(thresholds) - 1
        distance = abs(azp.sentence - rep.sentence)
        return bisect_right(thresholds, distance) - 1

    @staticmethod
    def embed_mention(document: Document, mention: Mention, embed: Embedder) -> Embedding:
        """Mean of the word embeddings of a mention's tokens."""
        words = document.sentence(mention.part, mention.sentence).words[
            mention.start : mention.end + 1
        ]
        if not words:
            raise FeatureError(f"{mention} lies outside its sentence")
        vectors = np.array([embed(word).values for word in words], dtype=np.float64)
        return Embedding(values=tuple(vectors.mean(axis=0).tolist()))

    @staticmethod
    def assemble_azp_features(
        document: Document,
        azp: Azp,
        rep: Mention,
        embed: Embedder,
        buckets: Sequence[int] | None = None,
    ) -> AzpFeatures:
        """Previous word, next word, same-sentence flag and distance bucket.

        Sentence-initial and sentence-final gaps use the ``<s>`` and ``</s>``
        boundary embeddings.
        """
        words = document.sentence(azp.part, azp.sentence).words
        previous = words[azp.gap_index - 1] if azp.gap_index > 0 else SENTENCE_START
        following = words[azp.gap_index] if azp.gap_index < len(words) else SENTENCE_END
        return AzpFeatures(
            prev_word=embed(previous),
            next_word=embed(following),
            same_sentence=FeatureService.same_sentence(azp, rep),
            cluster_distance=FeatureService.cluster_distance(azp, rep, buckets),
        )

    @staticmethod
    def concat_pair(
        cluster_rep: Embedding,
        features: AzpFeatures,
        buckets: Sequence[int] | None = None,
        cluster_dim: int | None = None,
    ) -> Embedding:
        """Concatenate a cluster representation with AZP features.

        Layout: cluster representation, previous word, next word, same-sentence
        flag as 0/1, distance bucket one-hot.

        Raises:
            DimensionMismatch: If component sizes disagree with each other or the layout
        """
        thresholds = tuple(buckets) if buckets is not None else settings.distance_buckets
        if cluster_dim is not None and cluster_rep.dim != cluster_dim:
            raise DimensionMismatch(
                f"cluster representation has {cluster_rep.dim} dims, expected {cluster_dim}"
            )
        if features.prev_word.dim != features.next_word.dim:
            raise DimensionMismatch("previous and next word embeddings differ in size")
        if features.cluster_distance >= len(thresholds):
            raise DimensionMismatch(
                f"distance bucket {features.cluster_distance} outside {len(thresholds)} buckets"
            )
        one_hot = np.zeros(len(thresholds))
        one_hot[features.cluster_distance] = 1.0
        vector = np.concatenate(
            [
                np.asarray(cluster_rep.values, dtype=np.float64),
                np.asarray(features.prev_word.values, dtype=np.float64),
                np.asarray(features.next_word.values, dtype=np.float64),
                [1.0 if features.same_sentence else 0.0],
                one_hot,
            ]
        )
        return Embedding(values=tuple(vector.tolist()))
