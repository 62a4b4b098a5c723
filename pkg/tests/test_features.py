"""Tests for AZP and cluster features."""

from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zero_coref.core.exceptions import DimensionMismatch, NoOvertMention
from zero_coref.models.coref import Azp, AzpFeatures, Cluster, Embedding, Mention
from zero_coref.services.features import (
    PAIR_LAYOUT_VERSION,
    SENTENCE_END,
    SENTENCE_START,
    FeatureService,
    HashEmbedder,
)

BUCKETS = (0, 1, 2, 4, 8)


@pytest.fixture
def spread_cluster():
    """Mentions in sentences 0, 3 and 7."""
    return Cluster(
        id=4,
        members=(
            Mention(sentence=7, start=1, end=1),
            Mention(sentence=0, start=0, end=0),
            Mention(sentence=3, start=2, end=3),
        ),
    )


@pytest.fixture
def embed():
    return HashEmbedder(dim=4, seed=0)


@pytest.mark.unit
class TestRepresentCluster:
    """Test represent_cluster."""

    def test_last_mention_before_anchor(self, spread_cluster):
        """Test 'last' picks the latest mention preceding the AZP."""
        rep = FeatureService.represent_cluster(
            spread_cluster, "last", Azp(sentence=5, gap_index=0)
        )
        assert rep == Mention(sentence=3, start=2, end=3)

    def test_first_mention(self, spread_cluster):
        """Test 'first' picks the earliest mention."""
        rep = FeatureService.represent_cluster(
            spread_cluster, "first", Azp(sentence=5, gap_index=0)
        )
        assert rep == Mention(sentence=0, start=0, end=0)

    def test_last_falls_back_when_nothing_precedes(self, spread_cluster):
        """Test 'last' uses the latest mention if none precedes the anchor."""
        rep = FeatureService.represent_cluster(
            spread_cluster, "last", Azp(sentence=0, gap_index=0)
        )
        assert rep == Mention(sentence=7, start=1, end=1)

    def test_nearest_preceding(self, spread_cluster):
        """Test the nearest preceding mention, and None when nothing precedes."""
        assert FeatureService.nearest_preceding(
            spread_cluster, Azp(sentence=5, gap_index=0)
        ) == Mention(sentence=3, start=2, end=3)
        before_all = Azp(sentence=0, gap_index=0)
        assert FeatureService.nearest_preceding(spread_cluster, before_all) is None

    def test_nearest_preceding_uses_end_position(self):
        """Test a long mention ending later beats a nested one starting later."""
        outer = Mention(sentence=0, start=0, end=3)
        inner = Mention(sentence=0, start=1, end=1)
        cluster = Cluster(id=0, members=(outer, inner))
        assert FeatureService.nearest_preceding(cluster, Azp(sentence=0, gap_index=5)) == outer

    @pytest.mark.parametrize("strategy", ["first", "last"])
    def test_singleton(self, strategy):
        """Test a one-mention cluster is represented by that mention."""
        mention = Mention(sentence=2, start=0, end=1)
        cluster = Cluster(id=0, members=(mention,))
        anchor = Azp(sentence=0, gap_index=0)
        assert FeatureService.represent_cluster(cluster, strategy, anchor) == mention

    def test_azp_only_cluster(self):
        """Test a cluster of AZPs has no representative."""
        cluster = Cluster(id=0, members=(Azp(sentence=1, gap_index=0),))
        with pytest.raises(NoOvertMention):
            FeatureService.represent_cluster(cluster, "last", Azp(sentence=2, gap_index=0))

    def test_mention_ending_at_gap_does_not_precede(self):
        """Test a mention ending on the token after the gap is not before it."""
        cluster = Cluster(
            id=0,
            members=(Mention(sentence=0, start=0, end=0), Mention(sentence=0, start=2, end=2)),
        )
        rep = FeatureService.represent_cluster(cluster, "last", Azp(sentence=0, gap_index=2))
        assert rep == Mention(sentence=0, start=0, end=0)


@pytest.mark.unit
class TestSentenceFeatures:
    """Test same_sentence and cluster_distance."""

    def test_same_sentence(self):
        """Test part and sentence must both match."""
        azp = Azp(sentence=2, gap_index=0)
        assert FeatureService.same_sentence(azp, Mention(sentence=2, start=0, end=0))
        assert not FeatureService.same_sentence(azp, Mention(sentence=1, start=0, end=0))
        assert not FeatureService.same_sentence(azp, Mention(part=1, sentence=2, start=0, end=0))

    @pytest.mark.parametrize(
        "azp_sentence,rep_sentence,bucket",
        [(4, 4, 0), (4, 3, 1), (4, 2, 2), (4, 1, 2), (5, 1, 3), (9, 1, 4), (20, 0, 4)],
    )
    def test_buckets(self, azp_sentence, rep_sentence, bucket):
        """Test sentence distances fall into their threshold buckets."""
        azp = Azp(sentence=azp_sentence, gap_index=0)
        rep = Mention(sentence=rep_sentence, start=0, end=0)
        assert FeatureService.cluster_distance(azp, rep, BUCKETS) == bucket

    def test_cross_part_overflow(self):
        """Test mentions in another part take the last bucket."""
        azp = Azp(part=1, sentence=0, gap_index=0)
        rep = Mention(part=0, sentence=0, start=0, end=0)
        assert FeatureService.cluster_distance(azp, rep, BUCKETS) == len(BUCKETS) - 1

    def test_default_buckets(self):
        """Test the configured thresholds are used by default."""
        azp = Azp(sentence=3, gap_index=0)
        assert FeatureService.cluster_distance(azp, Mention(sentence=0, start=0, end=0)) == 2

    @given(a=st.integers(0, 30), b=st.integers(0, 30), c=st.integers(0, 30))
    def test_symmetric_and_monotone(self, a, b, c):
        """Test distance buckets ignore order and never shrink with distance."""
        forward = FeatureService.cluster_distance(
            Azp(sentence=a, gap_index=0), Mention(sentence=b, start=0, end=0), BUCKETS
        )
        backward = FeatureService.cluster_distance(
            Azp(sentence=b, gap_index=0), Mention(sentence=a, start=0, end=0), BUCKETS
        )
        assert forward == backward
        near, far = sorted((abs(a - b), abs(a - c)))
        near_bucket = FeatureService.cluster_distance(
            Azp(sentence=near, gap_index=0), Mention(sentence=0, start=0, end=0), BUCKETS
        )
        far_bucket = FeatureService.cluster_distance(
            Azp(sentence=far, gap_index=0), Mention(sentence=0, start=0, end=0), BUCKETS
        )
        assert near_bucket <= far_bucket


@pytest.mark.unit
class TestEmbeddings:
    """Test the hash embedder and mention embeddings."""

    def test_deterministic(self):
        """Test equal seeds give equal vectors."""
        assert HashEmbedder(dim=4, seed=3)("word") == HashEmbedder(dim=4, seed=3)("word")

    def test_seed_and_word_matter(self):
        """Test vectors differ across seeds and words."""
        assert HashEmbedder(dim=4, seed=1)("word") != HashEmbedder(dim=4, seed=2)("word")
        assert HashEmbedder(dim=4)("word") != HashEmbedder(dim=4)("other")

    def test_dimension(self):
        """Test vectors have the configured size."""
        assert HashEmbedder(dim=6)("x").dim == 6
        with pytest.raises(DimensionMismatch):
            HashEmbedder(dim=-1)

    def test_shared_across_threads(self):
        """Test concurrent lookups of one word all get the cached vector."""
        embedder = HashEmbedder(dim=4, seed=5)
        words = [f"w{index % 7}" for index in range(200)]
        with ThreadPoolExecutor(max_workers=8) as pool:
            vectors = list(pool.map(embedder, words))
        for word, vector in zip(words, vectors, strict=True):
            assert vector is embedder(word)
        assert vectors[0] == HashEmbedder(dim=4, seed=5)("w0")

    def test_embed_mention_is_mean(self, simple_document, embed):
        """Test a span embedding is the mean of its word embeddings."""
        vector = FeatureService.embed_mention(
            simple_document, Mention(sentence=0, start=0, end=1), embed
        )
        expected = (np.array(embed("the").values) + np.array(embed("ministry").values)) / 2
        assert np.allclose(vector.values, expected)

    def test_non_finite_rejected(self):
        """Test embeddings must be finite."""
        with pytest.raises(ValueError):
            Embedding(values=(1.0, float("nan")))


@pytest.mark.unit
class TestAssembleFeatures:
    """Test assemble_azp_features."""

    def test_neighbouring_words(self, simple_document, embed):
        """Test previous and next words surround the gap."""
        features = FeatureService.assemble_azp_features(
            simple_document,
            Azp(sentence=0, gap_index=1),
            Mention(sentence=0, start=3, end=3),
            embed,
            BUCKETS,
        )
        assert features.prev_word == embed("the")
        assert features.next_word == embed("ministry")
        assert features.same_sentence is True
        assert features.cluster_distance == 0

    def test_sentence_boundaries(self, simple_document, embed):
        """Test boundary embeddings at sentence start and end."""
        rep = Mention(sentence=0, start=0, end=0)
        initial = FeatureService.assemble_azp_features(
            simple_document, Azp(sentence=1, gap_index=0), rep, embed, BUCKETS
        )
        final = FeatureService.assemble_azp_features(
            simple_document, Azp(sentence=1, gap_index=3), rep, embed, BUCKETS
        )
        assert initial.prev_word == embed(SENTENCE_START)
        assert initial.next_word == embed("talks")
        assert final.next_word == embed(SENTENCE_END)
        assert final.prev_word == embed(".")

    def test_consistent_with_components(self, bush_masked, embed):
        """Test ss and cd agree with same_sentence and cluster_distance."""
        azp = Azp(sentence=2, gap_index=1)
        rep = Mention(sentence=1, start=2, end=2)
        features = FeatureService.assemble_azp_features(bush_masked, azp, rep, embed, BUCKETS)
        assert features.same_sentence == FeatureService.same_sentence(azp, rep)
        assert features.cluster_distance == FeatureService.cluster_distance(azp, rep, BUCKETS)
        assert features.prev_word == embed("praised")


@pytest.mark.unit
class TestConcatPair:
    """Test concat_pair."""

    @pytest.fixture
    def features(self, embed):
        return AzpFeatures(
            prev_word=embed("a"), next_word=embed("b"), same_sentence=True, cluster_distance=2
        )

    def test_layout(self, embed, features):
        """Test the output is rep, prev, next, ss, one-hot distance."""
        rep = embed("rep")
        vector = np.array(FeatureService.concat_pair(rep, features, BUCKETS).values)
        assert vector.shape == (4 + 4 + 4 + 1 + 5,)
        assert np.allclose(vector[:4], rep.values)
        assert np.allclose(vector[4:8], embed("a").values)
        assert np.allclose(vector[8:12], embed("b").values)
        assert vector[12] == 1.0
        assert list(vector[13:]) == [0.0, 0.0, 1.0, 0.0, 0.0]
        assert PAIR_LAYOUT_VERSION == 1

    def test_deterministic(self, embed, features):
        """Test identical inputs give identical vectors."""
        rep = embed("rep")
        assert FeatureService.concat_pair(rep, features, BUCKETS) == FeatureService.concat_pair(
            rep, features, BUCKETS
        )

    def test_field_order_matters(self, embed, features):
        """Test swapping previous and next words changes the vector."""
        swapped = features.model_copy(
            update={"prev_word": features.next_word, "next_word": features.prev_word}
        )
        rep = embed("rep")
        assert FeatureService.concat_pair(rep, features, BUCKETS) != FeatureService.concat_pair(
            rep, swapped, BUCKETS
        )

    def test_cluster_dimension_checked(self, embed, features):
        """Test a representation of the wrong size is rejected."""
        with pytest.raises(DimensionMismatch):
            FeatureService.concat_pair(embed("rep"), features, BUCKETS, cluster_dim=8)

    def test_word_dimensions_checked(self, embed, features):
        """Test previous and next embeddings must agree in size."""
        uneven = features.model_copy(update={"next_word": HashEmbedder(dim=3)("b")})
        with pytest.raises(DimensionMismatch):
            FeatureService.concat_pair(embed("rep"), uneven, BUCKETS)

    def test_bucket_outside_layout(self, embed, features):
        """Test a distance bucket beyond the thresholds is rejected."""
        with pytest.raises(DimensionMismatch):
            FeatureService.concat_pair(embed("rep"), features, (0, 1))
