"""Pydantic models for CoNLL-2012 documents and ONF coreference chains.

All models are frozen: once parsed, documents are shared read-only between
threads and are never mutated in place. Operations that change a document build
a new one.
"""

import re
from collections.abc import Iterator
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from zero_coref.core.config import settings

Boundary = Literal["open", "close", "open_and_close"]

_TAG_RE = re.compile(r"^(\()?(\d+)(\))?$")
_COORD_RE = re.compile(r"^(\d+)\.(\d+)-(\d+)$")


class CorefTag(BaseModel):
    """One bracket of a coreference cell, e.g. ``(3``, ``3)`` or ``(3)``."""

    model_config = ConfigDict(frozen=True)

    chain_id: int = Field(..., ge=0)
    boundary: Boundary

    @classmethod
    def parse(cls, text: str) -> "CorefTag":
        """Parse a single bracket expression.

        Raises:
            ValueError: If the text is not a bracketed chain id
        """
        match = _TAG_RE.match(text)
        if not match or not (match.group(1) or match.group(3)):
            raise ValueError(f"Invalid coreference tag: {text!r}")
        opens, closes = bool(match.group(1)), bool(match.group(3))
        boundary: Boundary = (
            "open_and_close" if opens and closes else "open" if opens else "close"
        )
        return cls(chain_id=int(match.group(2)), boundary=boundary)

    @property
    def opens(self) -> bool:
        return self.boundary in ("open", "open_and_close")

    @property
    def closes(self) -> bool:
        return self.boundary in ("close", "open_and_close")

    def render(self) -> str:
        """Render the tag in CoNLL bracket notation."""
        if self.boundary == "open_and_close":
            return f"({self.chain_id})"
        if self.boundary == "open":
            return f"({self.chain_id}"
        return f"{self.chain_id})"


class TokenRow(BaseModel):
    """One token line with all CoNLL-2012 annotation layers."""

    model_config = ConfigDict(frozen=True)

    doc_id: str
    part_number: int = Field(..., ge=0)
    word_number: int = Field(..., ge=0)
    word: str
    pos: str
    parse_bit: str
    lemma: str
    frameset_id: str
    word_sense: str
    speaker: str
    named_entity: str
    arguments: tuple[str, ...] = ()
    coref_tags: tuple[CorefTag, ...] = ()

    @property
    def is_pro(self) -> bool:
        """Whether this row is an explicit AZP marker row."""
        return self.word == settings.pro_marker

    @property
    def coref_cell(self) -> str:
        """Coreference column text, ``-`` when the row carries no tags."""
        if not self.coref_tags:
            return "-"
        return "|".join(tag.render() for tag in self.coref_tags)

    def columns(self) -> list[str]:
        """All column values in file order."""
        return [
            self.doc_id,
            str(self.part_number),
            str(self.word_number),
            self.word,
            self.pos,
            self.parse_bit,
            self.lemma,
            self.frameset_id,
            self.word_sense,
            self.speaker,
            self.named_entity,
            *self.arguments,
            self.coref_cell,
        ]


class Sentence(BaseModel):
    """An ordered, non-empty run of token rows."""

    model_config = ConfigDict(frozen=True)

    rows: tuple[TokenRow, ...]

    @field_validator("rows")
    @classmethod
    def validate_rows(cls, rows: tuple[TokenRow, ...]) -> tuple[TokenRow, ...]:
        """Check the sentence-level invariants."""
        if not rows:
            raise ValueError("Sentence must contain at least one row")
        part = rows[0].part_number
        arity = len(rows[0].arguments)
        for previous, row in zip(rows, rows[1:], strict=False):
            if row.word_number <= previous.word_number:
                raise ValueError(
                    f"Word numbers must increase within a sentence "
                    f"({previous.word_number} then {row.word_number})"
                )
        for row in rows:
            if row.part_number != part:
                raise ValueError("All rows of a sentence must share the part number")
            if len(row.arguments) != arity:
                raise ValueError("All rows of a sentence must have the same argument columns")
        return rows

    @property
    def numbering_base(self) -> int:
        return self.rows[0].word_number

    @property
    def overt_rows(self) -> tuple[TokenRow, ...]:
        return tuple(row for row in self.rows if not row.is_pro)

    @property
    def words(self) -> tuple[str, ...]:
        """Surface forms of the overt tokens (``*pro*`` rows excluded)."""
        return tuple(row.word for row in self.rows if not row.is_pro)

    @property
    def pro_count(self) -> int:
        return sum(1 for row in self.rows if row.is_pro)


class Document(BaseModel):
    """A CoNLL-2012 document: one or more parts, each a list of sentences."""

    model_config = ConfigDict(frozen=True)

    doc_id: str
    parts: tuple[tuple[Sentence, ...], ...] = ()

    @model_validator(mode="after")
    def validate_parts(self) -> "Document":
        """Rows must belong to this document and to the part they sit in."""
        for part_number, sentences in enumerate(self.parts):
            for sentence in sentences:
                for row in sentence.rows:
                    if row.doc_id != self.doc_id:
                        raise ValueError(
                            f"Row doc_id {row.doc_id!r} differs from document {self.doc_id!r}"
                        )
                    if row.part_number != part_number:
                        raise ValueError(
                            f"Row part {row.part_number} sits in part {part_number}; "
                            "part numbers must be contiguous from 0"
                        )
        return self

    def iter_sentences(self) -> Iterator[tuple[int, int, Sentence]]:
        """Yield ``(part, sentence_index, sentence)`` in document order."""
        for part_number, sentences in enumerate(self.parts):
            for index, sentence in enumerate(sentences):
                yield part_number, index, sentence

    def sentence(self, part: int, index: int) -> Sentence:
        """Look up a sentence by position.

        Raises:
            IndexError: If the position is outside the document
        """
        if not 0 <= part < len(self.parts) or not 0 <= index < len(self.parts[part]):
            raise IndexError(f"No sentence {index} in part {part} of {self.doc_id}")
        return self.parts[part][index]

    @property
    def sentence_count(self) -> int:
        return sum(len(sentences) for sentences in self.parts)

    @property
    def has_pro_rows(self) -> bool:
        return any(sentence.pro_count for _, _, sentence in self.iter_sentences())


# ONF models


class OnfCoordinate(BaseModel):
    """ONF member coordinate ``sentence.start-end``."""

    model_config = ConfigDict(frozen=True)

    sentence_index: int = Field(..., ge=0)
    start_word: int = Field(..., ge=0)
    end_word: int = Field(..., ge=0)

    @model_validator(mode="after")
    def validate_span(self) -> "OnfCoordinate":
        if self.start_word > self.end_word:
            raise ValueError(f"start_word {self.start_word} exceeds end_word {self.end_word}")
        return self

    @classmethod
    def parse(cls, text: str) -> "OnfCoordinate":
        """Parse ``"8.16-16"``.

        Raises:
            ValueError: If the text is not a coordinate
        """
        match = _COORD_RE.match(text)
        if not match:
            raise ValueError(f"Invalid ONF coordinate: {text!r}")
        sentence, start, end = (int(group) for group in match.groups())
        return cls(sentence_index=sentence, start_word=start, end_word=end)

    @property
    def width(self) -> int:
        return self.end_word - self.start_word + 1

    def render(self) -> str:
        return f"{self.sentence_index}.{self.start_word}-{self.end_word}"


class OnfChainMember(BaseModel):
    """A chain member as printed in ONF."""

    model_config = ConfigDict(frozen=True)

    coordinate: OnfCoordinate
    is_azp: bool = False
    surface: str = ""
    role: Literal["ATTRIB", "HEAD"] | None = None

    @model_validator(mode="after")
    def validate_marker(self) -> "OnfChainMember":
        if self.is_azp and "*" not in self.surface:
            raise ValueError("AZP members must carry the '*' marker in their surface")
        return self

    @property
    def is_trace(self) -> bool:
        """Whether the member is an empty element (``*``, ``*pro*``, ``*T*-1``, ...)."""
        tokens = self.surface.split()
        return bool(tokens) and all(token.startswith("*") for token in tokens)


class OnfChain(BaseModel):
    """An ONF coreference chain."""

    model_config = ConfigDict(frozen=True)

    chain_id: int = Field(..., ge=0)
    kind: Literal["IDENT", "APPOS"]
    members: tuple[OnfChainMember, ...]
    part: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def validate_members(self) -> "OnfChain":
        if not self.members:
            raise ValueError(f"Chain {self.chain_id} has no members")
        has_roles = [member.role is not None for member in self.members]
        if self.kind == "APPOS" and not all(has_roles):
            raise ValueError(f"APPOS chain {self.chain_id} needs ATTRIB/HEAD roles")
        if self.kind == "IDENT" and any(has_roles):
            raise ValueError(f"IDENT chain {self.chain_id} must not carry role labels")
        return self


class OnfDocument(BaseModel):
    """Coreference chains of one ONF file."""

    model_config = ConfigDict(frozen=True)

    doc_id: str = ""
    chains: tuple[OnfChain, ...] = ()

    @field_validator("chains")
    @classmethod
    def validate_unique(cls, chains: tuple[OnfChain, ...]) -> tuple[OnfChain, ...]:
        seen: set[int] = set()
        for chain in chains:
            if chain.chain_id in seen:
                raise ValueError(f"Duplicate chain id {chain.chain_id}")
            seen.add(chain.chain_id)
        return chains
