"""Document, coreference and report models."""

from zero_coref.models.coref import Azp, AzpFeatures, Cluster, ClusterSet, Embedding, Mention
from zero_coref.models.documents import (
    CorefTag,
    Document,
    OnfChain,
    OnfChainMember,
    OnfCoordinate,
    OnfDocument,
    Sentence,
    TokenRow,
)

__all__ = [
    "Mention",
    "Azp",
    "Cluster",
    "ClusterSet",
    "Embedding",
    "AzpFeatures",
    "CorefTag",
    "TokenRow",
    "Sentence",
    "Document",
    "OnfCoordinate",
    "OnfChainMember",
    "OnfChain",
    "OnfDocument",
]
