"""Mention, AZP and cluster models.

Positions count overt tokens only: ``*pro*`` rows are invisible to mention spans
and gap indices, so the masked, extended and tagged renderings of one text share
a coordinate system.
"""

import math
from collections.abc import Iterable, Iterator
from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Mention(BaseModel):
    """A realized span, inclusive on both ends."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["mention"] = "mention"
    part: int = Field(default=0, ge=0)
    sentence: int = Field(..., ge=0)
    start: int = Field(..., ge=0)
    end: int = Field(..., ge=0)

    @model_validator(mode="after")
    def validate_span(self) -> "Mention":
        if self.start > self.end:
            raise ValueError(f"Mention start {self.start} exceeds end {self.end}")
        return self

    @property
    def sort_key(self) -> tuple[int, int, int, int, int]:
        return (self.part, self.sentence, self.start, 1, self.end)

    def __str__(self) -> str:
        return f"m({self.part}:{self.sentence}:{self.start}-{self.end})"


class Azp(BaseModel):
    """An anaphoric zero pronoun: the gap before overt token ``gap_index``.

    ``slot`` tells apart several AZPs recorded in the same gap.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["azp"] = "azp"
    part: int = Field(default=0, ge=0)
    sentence: int = Field(..., ge=0)
    gap_index: int = Field(..., ge=0)
    slot: int = Field(default=0, ge=0)

    @property
    def sort_key(self) -> tuple[int, int, int, int, int]:
        return (self.part, self.sentence, self.gap_index, 0, self.slot)

    @property
    def position(self) -> tuple[int, int, int, int]:
        return (self.part, self.sentence, self.gap_index, self.slot)

    def __str__(self) -> str:
        return f"azp({self.part}:{self.sentence}:{self.gap_index}.{self.slot})"


Member = Annotated[Mention | Azp, Field(discriminator="kind")]


class Cluster(BaseModel):
    """A coreference entity; members are kept in document order."""

    model_config = ConfigDict(frozen=True)

    id: int
    members: tuple[Member, ...]

    @field_validator("members")
    @classmethod
    def sort_members(cls, members: tuple[Mention | Azp, ...]) -> tuple[Mention | Azp, ...]:
        if not members:
            raise ValueError("Cluster must have at least one member")
        if len(set(members)) != len(members):
            raise ValueError("Cluster members must be distinct")
        return tuple(sorted(members, key=lambda member: member.sort_key))

    @property
    def mentions(self) -> tuple[Mention, ...]:
        return tuple(member for member in self.members if isinstance(member, Mention))

    @property
    def azps(self) -> tuple[Azp, ...]:
        return tuple(member for member in self.members if isinstance(member, Azp))

    def with_members(self, extra: Iterable[Mention | Azp]) -> "Cluster":
        return Cluster(id=self.id, members=(*self.members, *extra))


class ClusterSet(BaseModel):
    """Document-level partition of mentions and AZPs."""

    model_config = ConfigDict(frozen=True)

    clusters: tuple[Cluster, ...] = ()

    @field_validator("clusters")
    @classmethod
    def validate_partition(cls, clusters: tuple[Cluster, ...]) -> tuple[Cluster, ...]:
        ids: set[int] = set()
        seen: set[Mention | Azp] = set()
        for cluster in clusters:
            if cluster.id in ids:
                raise ValueError(f"Duplicate cluster id {cluster.id}")
            ids.add(cluster.id)
            for member in cluster.members:
                if member in seen:
                    raise ValueError(f"{member} occurs in more than one cluster")
                seen.add(member)
        return tuple(sorted(clusters, key=lambda cluster: cluster.id))

    @classmethod
    def from_groups(cls, groups: dict[int, Iterable[Mention | Azp]]) -> "ClusterSet":
        """Build a cluster set from ``{id: members}``, dropping empty groups."""
        return cls(
            clusters=tuple(
                Cluster(id=cluster_id, members=tuple(members))
                for cluster_id, members in groups.items()
                if members
            )
        )

    def __iter__(self) -> Iterator[Cluster]:  # type: ignore[override]
        return iter(self.clusters)

    def __len__(self) -> int:
        return len(self.clusters)

    def get(self, cluster_id: int) -> Cluster | None:
        for cluster in self.clusters:
            if cluster.id == cluster_id:
                return cluster
        return None

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(cluster.id for cluster in self.clusters)

    @property
    def members(self) -> tuple[Mention | Azp, ...]:
        return tuple(member for cluster in self.clusters for member in cluster.members)

    @property
    def azps(self) -> tuple[Azp, ...]:
        return tuple(azp for cluster in self.clusters for azp in cluster.azps)

    def member_index(self) -> dict[Mention | Azp, int]:
        """Map every member to its cluster id."""
        return {member: cluster.id for cluster in self.clusters for member in cluster.members}

    def without_azps(self) -> "ClusterSet":
        """Drop AZP members and clusters left empty."""
        return ClusterSet.from_groups({cluster.id: cluster.mentions for cluster in self.clusters})

    def as_sets(self) -> list[frozenset[Mention | Azp]]:
        return [frozenset(cluster.members) for cluster in self.clusters]


class Embedding(BaseModel):
    """A fixed-length real vector."""

    model_config = ConfigDict(frozen=True)

    values: tuple[float, ...]

    @field_validator("values")
    @classmethod
    def validate_finite(cls, values: tuple[float, ...]) -> tuple[float, ...]:
        if not all(math.isfinite(value) for value in values):
            raise ValueError("Embedding entries must be finite")
        return values

    @property
    def dim(self) -> int:
        return len(self.values)


class AzpFeatures(BaseModel):
    """The four-feature AZP record: previous word, next word, ss and cd."""

    model_config = ConfigDict(frozen=True)

    prev_word: Embedding
    next_word: Embedding
    same_sentence: bool
    cluster_distance: int = Field(..., ge=0)
