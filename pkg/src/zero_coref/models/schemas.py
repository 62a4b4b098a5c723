"""Pydantic schemas for merge plans, statistics, scores and run records."""

from pathlib import Path
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from zero_coref.models.coref import Azp, AzpFeatures, ClusterSet, Embedding, Mention
from zero_coref.models.documents import Document

Provenance = Literal["existing_chain", "new_chain"]
RejectReason = Literal[
    "unaligned_member", "azp_only_chain", "ambiguous_chain", "unmatched_chain", "unaligned_gap"
]
AlignMethod = Literal["exact", "surface", "position", "unaligned"]


# Alignment and merge schemas
class AlignedMember(BaseModel):
    """Where one ONF chain member landed in the CoNLL document."""

    model_config = ConfigDict(frozen=True)

    chain_id: int
    member_index: int
    coordinate: str
    part: int
    is_azp: bool
    method: AlignMethod
    mention: Mention | None = None
    azp: Azp | None = None

    @property
    def aligned(self) -> bool:
        return self.method != "unaligned"


class AlignmentTable(BaseModel):
    """Alignment of every IDENT chain member of an ONF document."""

    model_config = ConfigDict(frozen=True)

    doc_id: str
    members: tuple[AlignedMember, ...] = ()

    @property
    def unaligned(self) -> tuple[AlignedMember, ...]:
        return tuple(member for member in self.members if not member.aligned)

    def for_chain(self, chain_id: int) -> tuple[AlignedMember, ...]:
        return tuple(member for member in self.members if member.chain_id == chain_id)


class Insertion(BaseModel):
    """One ``*pro*`` row to insert."""

    model_config = ConfigDict(frozen=True)

    part: int = Field(..., ge=0)
    sentence: int = Field(..., ge=0)
    gap_index: int = Field(..., ge=0)
    slot: int = Field(default=0, ge=0)
    chain_id: int = Field(..., ge=0)
    provenance: Provenance
    source_chain: int | None = None

    @property
    def position(self) -> tuple[int, int, int, int]:
        return (self.part, self.sentence, self.gap_index, self.slot)


class NewMention(BaseModel):
    """A CoNLL singleton that gets tagged because an AZP corefers with it."""

    model_config = ConfigDict(frozen=True)

    mention: Mention
    chain_id: int = Field(..., ge=0)


class IndexEntry(BaseModel):
    """Original word number of a row and its number after insertion."""

    model_config = ConfigDict(frozen=True)

    part: int
    sentence: int
    original: int
    extended: int


class RejectRecord(BaseModel):
    """An AZP skipped while building the extended dataset."""

    model_config = ConfigDict(frozen=True)

    doc_id: str
    part: int
    chain_id: int
    coordinate: str
    reason: RejectReason
    detail: str = ""


class MergePlan(BaseModel):
    """Everything ``apply_merge`` needs to extend one document."""

    model_config = ConfigDict(frozen=True)

    doc_id: str
    fingerprint: str
    insertions: tuple[Insertion, ...] = ()
    new_mentions: tuple[NewMention, ...] = ()
    index_map: tuple[IndexEntry, ...] = ()
    rejects: tuple[RejectRecord, ...] = ()
    existing_chain_ids: tuple[int, ...] = ()

    @model_validator(mode="after")
    def validate_plan(self) -> "MergePlan":
        """Insertions are sorted and fresh chain ids never collide."""
        positions = [insertion.position for insertion in self.insertions]
        if positions != sorted(positions):
            raise ValueError("Insertions must be sorted by position")
        existing = set(self.existing_chain_ids)
        for insertion in self.insertions:
            if insertion.provenance == "new_chain" and insertion.chain_id in existing:
                raise ValueError(f"New chain id {insertion.chain_id} collides with an existing id")
        return self

    @property
    def is_empty(self) -> bool:
        return not self.insertions and not self.new_mentions

    def extended_number(self, part: int, sentence: int, original: int) -> int:
        """Word number of an original row after insertion."""
        for entry in self.index_map:
            if (entry.part, entry.sentence, entry.original) == (part, sentence, original):
                return entry.extended
        raise KeyError((part, sentence, original))

    def original_numbers(self) -> dict[tuple[int, int, int], int]:
        """Reverse map ``(part, sentence, extended) -> original``."""
        return {
            (entry.part, entry.sentence, entry.extended): entry.original
            for entry in self.index_map
        }


class CorpusStats(BaseModel):
    """Document, sentence, overt word and AZP counts of a split."""

    model_config = ConfigDict(frozen=True)

    documents: int = Field(default=0, ge=0)
    sentences: int = Field(default=0, ge=0)
    words: int = Field(default=0, ge=0)
    azps: int = Field(default=0, ge=0)

    def __add__(self, other: "CorpusStats") -> "CorpusStats":
        return CorpusStats(
            documents=self.documents + other.documents,
            sentences=self.sentences + other.sentences,
            words=self.words + other.words,
            azps=self.azps + other.azps,
        )


# Scoring schemas
class ScoreTriple(BaseModel):
    """Recall, precision and F1 of one metric."""

    model_config = ConfigDict(frozen=True)

    recall: float = Field(..., ge=0.0, le=1.0)
    precision: float = Field(..., ge=0.0, le=1.0)
    f1: float = Field(..., ge=0.0, le=1.0)

    @model_validator(mode="after")
    def validate_f1(self) -> "ScoreTriple":
        total = self.recall + self.precision
        expected = 2 * self.recall * self.precision / total if total > 0 else 0.0
        if abs(expected - self.f1) > 1e-9:
            raise ValueError(f"f1 {self.f1} is not the harmonic mean of R and P")
        return self

    @classmethod
    def from_scores(cls, recall: float, precision: float) -> "ScoreTriple":
        recall = min(max(recall, 0.0), 1.0)
        precision = min(max(precision, 0.0), 1.0)
        total = recall + precision
        f1 = 2 * recall * precision / total if total > 0 else 0.0
        return cls(recall=recall, precision=precision, f1=f1)

    @classmethod
    def from_counts(
        cls, recall_num: float, recall_den: float, precision_num: float, precision_den: float
    ) -> "ScoreTriple":
        """Build a triple from numerators and denominators; 0/0 scores 0."""
        recall = recall_num / recall_den if recall_den else 0.0
        precision = precision_num / precision_den if precision_den else 0.0
        return cls.from_scores(recall, precision)

    def rounded(self, decimals: int) -> dict[str, float]:
        return {
            "r": round(self.recall, decimals),
            "p": round(self.precision, decimals),
            "f1": round(self.f1, decimals),
        }


class ScoreReport(BaseModel):
    """Full coreference and AZP score report."""

    model_config = ConfigDict(frozen=True)

    muc: ScoreTriple
    b_cubed: ScoreTriple
    ceaf_phi4: ScoreTriple
    conll_avg_f1: float
    azp: ScoreTriple
    documents: int = 0
    config: dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def validate_average(self) -> "ScoreReport":
        mean = (self.muc.f1 + self.b_cubed.f1 + self.ceaf_phi4.f1) / 3
        if abs(mean - self.conll_avg_f1) > 1e-9:
            raise ValueError("conll_avg_f1 must be the mean of the three F1 values")
        return self


class AzpResolutionRecord(BaseModel):
    """An AZP of the response and the cluster it was resolved to."""

    model_config = ConfigDict(frozen=True)

    position: Azp
    resolved_cluster: int


# Resolution schemas
class Candidate(BaseModel):
    """A cluster offered to an AZP resolver."""

    model_config = ConfigDict(frozen=True)

    cluster_id: int
    representative: Mention
    features: AzpFeatures
    pair: Embedding
    nearest_preceding: Mention | None = None


class ResolutionResult(BaseModel):
    """Output of one pipeline or joint run over a document."""

    model_config = ConfigDict(frozen=True)

    doc_id: str
    mode: Literal["pipeline", "joint"]
    clusters: ClusterSet
    document: Document
    index_map: tuple[IndexEntry, ...] = ()
    abstained: tuple[Azp, ...] = ()

    @property
    def attached_azps(self) -> tuple[Azp, ...]:
        return self.clusters.azps


class ResolutionDiff(BaseModel):
    """Differences between pipeline and joint output for one document."""

    model_config = ConfigDict(frozen=True)

    doc_id: str
    moved_azps: tuple[tuple[Azp, int | None, int | None], ...] = ()
    pipeline_only: tuple[tuple[str, ...], ...] = ()
    joint_only: tuple[tuple[str, ...], ...] = ()

    @property
    def is_empty(self) -> bool:
        return not (self.moved_azps or self.pipeline_only or self.joint_only)


class ProbabilityInstance(BaseModel):
    """Candidate probabilities of one training instance."""

    model_config = ConfigDict(frozen=True)

    instance_id: str
    candidates: tuple[str, ...]
    probs: tuple[float, ...]

    @model_validator(mode="after")
    def validate_instance(self) -> "ProbabilityInstance":
        if not self.candidates:
            raise ValueError(f"Instance {self.instance_id} has no candidates")
        if len(self.candidates) != len(self.probs):
            raise ValueError(f"Instance {self.instance_id}: candidates and probs differ in length")
        if len(set(self.candidates)) != len(self.candidates):
            raise ValueError(f"Instance {self.instance_id}: duplicate candidates")
        if any(not 0.0 <= p <= 1.0 for p in self.probs):
            raise ValueError(f"Instance {self.instance_id}: probabilities must lie in [0, 1]")
        return self

    def as_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=np.float64)


class ProbabilityTable(BaseModel):
    """Per-instance candidate probabilities supplied by a model."""

    model_config = ConfigDict(frozen=True)

    instances: tuple[ProbabilityInstance, ...] = ()

    @field_validator("instances")
    @classmethod
    def validate_ids(
        cls, instances: tuple[ProbabilityInstance, ...]
    ) -> tuple[ProbabilityInstance, ...]:
        ids = [instance.instance_id for instance in instances]
        if len(set(ids)) != len(ids):
            raise ValueError("Instance ids must be unique")
        return instances

    @classmethod
    def from_mapping(cls, data: dict[str, dict[str, float]]) -> "ProbabilityTable":
        """Build a table from ``{instance: {candidate: prob}}``."""
        return cls(
            instances=tuple(
                ProbabilityInstance(
                    instance_id=instance_id,
                    candidates=tuple(candidates),
                    probs=tuple(candidates.values()),
                )
                for instance_id, candidates in data.items()
            )
        )


# Plugin protocol
class PluginSentence(BaseModel):
    """Sentence view sent to external resolvers."""

    part: int
    index: int
    words: list[str]
    pos: list[str]
    pro: list[bool]


class PluginDocument(BaseModel):
    """Document view sent to external resolvers."""

    doc_id: str
    conll: str
    sentences: list[PluginSentence]


class PluginRequest(BaseModel):
    """Request line written to a resolver process."""

    v: int
    op: Literal["resolve", "identify"]
    doc: PluginDocument
    seed: int = 0


class PluginResponse(BaseModel):
    """Response line read from a resolver process."""

    v: int
    clusters: list[list[Mention | Azp]] | None = None
    gaps: list[list[int]] | None = None
    error: str | None = None

    @field_validator("gaps")
    @classmethod
    def validate_gaps(cls, gaps: list[list[int]] | None) -> list[list[int]] | None:
        if gaps is None:
            return gaps
        for gap in gaps:
            if len(gap) not in (2, 3) or any(value < 0 for value in gap):
                raise ValueError(f"Gap must be [sentence, gap] or [part, sentence, gap]: {gap}")
        return gaps


# CLI schemas
Command = Literal["merge", "stats", "score", "resolve", "validate"]
READ_COMMANDS: frozenset[str] = frozenset({"merge", "stats", "score", "resolve", "validate"})


class RunConfig(BaseModel):
    """Effective configuration of one CLI run, echoed into reports."""

    model_config = ConfigDict(frozen=True)

    command: Command
    inputs: dict[str, str] = Field(default_factory=dict)
    output: str | None = None
    mode: Literal["pipeline", "joint"] | None = None
    cluster_representation: Literal["first", "last"] = "last"
    azp_hit_mode: Literal["position", "entity"] = "entity"
    include_pro_in_coref: bool = True
    buckets: tuple[int, ...] = (0, 1, 2, 4, 8)
    seed: int = 0
    jobs: int = Field(default=1, ge=1)
    json_output: bool = False

    @model_validator(mode="after")
    def validate_inputs(self) -> "RunConfig":
        """Input paths of read commands must exist."""
        if self.command in READ_COMMANDS:
            for name, path in self.inputs.items():
                if not Path(path).exists():
                    raise ValueError(f"Input path for {name} does not exist: {path}")
        return self

    def echo(self) -> dict[str, Any]:
        """Settings that determine the output, for embedding in reports."""
        return self.model_dump(mode="json", exclude={"json_output", "jobs"})


class Finding(BaseModel):
    """One diagnostic produced by ``validate``."""

    model_config = ConfigDict(frozen=True)

    path: str
    severity: Literal["error", "warning"]
    code: str
    message: str
    line: int | None = None
    doc_id: str | None = None
