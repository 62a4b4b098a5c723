"""CoNLL-2012 reading and writing.

Canonical layout: single-space separated columns, a blank line after every
sentence, ``#begin document (<id>); part <nnn>`` headers and ``#end document``
trailers. Documents in that layout round-trip byte for byte.
"""

import hashlib
import re
from collections import defaultdict
from collections.abc import Iterable, Iterator
from pathlib import Path

from zero_coref.core.config import settings
from zero_coref.core.exceptions import (
    ColumnCountMismatch,
    ConllFormatError,
    InvariantViolation,
    MalformedCorefTag,
    MalformedHeader,
    MalformedParseBit,
    NonUtf8Input,
    UnbalancedCorefBrackets,
)
from zero_coref.core.logging import get_logger
from zero_coref.models.coref import Azp, ClusterSet, Mention
from zero_coref.models.documents import CorefTag, Document, Sentence, TokenRow

logger = get_logger(__name__)

MIN_COLUMNS = 12
CONLL_SUFFIXES = (".conll", "_conll")

_BEGIN_RE = re.compile(r"^#begin document \((?P<doc_id>.*)\);\s*part\s+(?P<part>\d+)\s*$")
_END = "#end document"


def decode(data: str | bytes) -> str:
    """Return text, decoding bytes as strict UTF-8.

    Raises:
        NonUtf8Input: If bytes are not valid UTF-8
    """
    if isinstance(data, str):
        return data
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        line = data[: e.start].count(b"\n") + 1
        raise NonUtf8Input(f"invalid UTF-8 byte at offset {e.start}", line=line) from e


def _parse_row(fields: list[str], line_no: int) -> TokenRow:
    if len(fields) < MIN_COLUMNS:
        raise ColumnCountMismatch(
            f"expected at least {MIN_COLUMNS} columns, found {len(fields)}", line=line_no
        )
    try:
        part_number, word_number = int(fields[1]), int(fields[2])
    except ValueError as e:
        raise ConllFormatError("part and word numbers must be integers", line=line_no) from e

    parse_bit = fields[5]
    if settings.validate_parse_bits and parse_bit != "-" and parse_bit.count("*") != 1:
        raise MalformedParseBit(f"parse bit {parse_bit!r} needs exactly one '*'", line=line_no)

    cell = fields[-1]
    tags: tuple[CorefTag, ...] = ()
    if cell != "-":
        try:
            tags = tuple(CorefTag.parse(piece) for piece in cell.split("|"))
        except ValueError as e:
            raise MalformedCorefTag(str(e), line=line_no) from e

    return TokenRow(
        doc_id=fields[0],
        part_number=part_number,
        word_number=word_number,
        word=fields[3],
        pos=fields[4],
        parse_bit=parse_bit,
        lemma=fields[6],
        frameset_id=fields[7],
        word_sense=fields[8],
        speaker=fields[9],
        named_entity=fields[10],
        arguments=tuple(fields[11:-1]),
        coref_tags=tags,
    )


def _check_brackets(rows: list[TokenRow], lines: list[int]) -> None:
    """Every open must be closed within the sentence, last-opened first."""
    stacks: dict[int, list[int]] = defaultdict(list)
    for row, line_no in zip(rows, lines, strict=True):
        for tag in row.coref_tags:
            if tag.boundary == "open":
                stacks[tag.chain_id].append(line_no)
            elif tag.boundary == "close":
                if not stacks[tag.chain_id]:
                    raise UnbalancedCorefBrackets(
                        f"chain {tag.chain_id} closed without being opened", line=line_no
                    )
                stacks[tag.chain_id].pop()
    for chain_id, opened in sorted(stacks.items()):
        if opened:
            raise UnbalancedCorefBrackets(
                f"chain {chain_id} opened but never closed", line=opened[0]
            )


def _build_sentence(rows: list[TokenRow], lines: list[int]) -> Sentence:
    arity = len(rows[0].arguments)
    for row, line_no in zip(rows, lines, strict=True):
        if len(row.arguments) != arity:
            raise ColumnCountMismatch(
                f"row has {len(row.arguments) + MIN_COLUMNS} columns, sentence has "
                f"{arity + MIN_COLUMNS}",
                line=line_no,
            )
    if rows[0].word_number not in (0, 1):
        raise ConllFormatError(
            f"sentence starts at word number {rows[0].word_number}, expected 0 or 1",
            line=lines[0],
        )
    for previous, row, line_no in zip(rows, rows[1:], lines[1:], strict=False):
        if row.word_number != previous.word_number + 1:
            raise ConllFormatError(
                f"word number {row.word_number} follows {previous.word_number}", line=line_no
            )
    _check_brackets(rows, lines)
    return Sentence(rows=tuple(rows))


def parse_conll(data: str | bytes) -> list[Document]:
    """Parse CoNLL-2012 text into documents.

    Consecutive ``#begin document`` blocks with the same id are the parts of one
    document and must be numbered 0, 1, 2, ...

    Args:
        data: File contents, text or UTF-8 bytes

    Returns:
        Documents in file order

    Raises:
        ConllFormatError: On any framing, column or coreference tag error
    """
    text = decode(data)
    documents: list[Document] = []
    doc_id: str | None = None
    parts: list[tuple[Sentence, ...]] = []

    block: tuple[str, int] | None = None
    sentences: list[Sentence] = []
    rows: list[TokenRow] = []
    row_lines: list[int] = []

    def flush_sentence() -> None:
        if rows:
            sentences.append(_build_sentence(rows, row_lines))
            rows.clear()
            row_lines.clear()

    def flush_document() -> None:
        nonlocal doc_id, parts
        if doc_id is not None:
            documents.append(Document(doc_id=doc_id, parts=tuple(parts)))
        doc_id, parts = None, []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if block is None:
            if not line:
                continue
            match = _BEGIN_RE.match(line)
            if not match:
                raise MalformedHeader(f"expected '#begin document', found {line[:40]!r}", line_no)
            block_id, part = match.group("doc_id"), int(match.group("part"))
            if block_id != doc_id:
                flush_document()
                if any(document.doc_id == block_id for document in documents):
                    raise MalformedHeader(f"document {block_id!r} appears twice", line_no)
                doc_id = block_id
            if part != len(parts):
                raise MalformedHeader(
                    f"part {part} of {block_id!r} out of sequence, expected {len(parts)}", line_no
                )
            block = (block_id, part)
            continue

        if not line:
            flush_sentence()
        elif line == _END:
            flush_sentence()
            parts.append(tuple(sentences))
            sentences = []
            block = None
        elif line.startswith("#"):
            raise MalformedHeader(f"unexpected directive inside a document: {line[:40]!r}", line_no)
        else:
            row = _parse_row(line.split(), line_no)
            if (row.doc_id, row.part_number) != block:
                raise MalformedHeader(
                    f"row belongs to {row.doc_id!r} part {row.part_number}, "
                    f"not to the enclosing header",
                    line_no,
                )
            rows.append(row)
            row_lines.append(line_no)

    if block is not None:
        raise MalformedHeader(f"document {block[0]!r} has no '#end document'")
    flush_document()
    logger.debug(f"Parsed {len(documents)} CoNLL document(s)")
    return documents


def _format_rows(rows: list[list[str]], layout: str) -> list[str]:
    if layout != "fixed" or not rows:
        return [" ".join(columns) for columns in rows]
    width = max(len(columns) for columns in rows)
    widths = [
        max((len(columns[i]) for columns in rows if i < len(columns)), default=0)
        for i in range(width)
    ]
    gap = " " * settings.fixed_width_gap
    return [
        gap.join(
            value if i == len(columns) - 1 else value.ljust(widths[i])
            for i, value in enumerate(columns)
        )
        for columns in rows
    ]


def write_conll(documents: Iterable[Document], layout: str | None = None) -> str:
    """Serialize documents as CoNLL-2012 text.

    Args:
        documents: Documents to write
        layout: ``canonical`` or ``fixed`` (defaults to settings)

    Returns:
        File contents

    Raises:
        InvariantViolation: If a sentence holds unbalanced coreference tags
    """
    layout = layout or settings.column_layout
    out: list[str] = []
    for document in documents:
        for part_number, sentences in enumerate(document.parts):
            out.append(f"#begin document ({document.doc_id}); part {part_number:03d}")
            part_rows: list[list[str]] = []
            sentence_sizes: list[int] = []
            for sentence in sentences:
                try:
                    _check_brackets(list(sentence.rows), list(range(len(sentence.rows))))
                except UnbalancedCorefBrackets as e:
                    raise InvariantViolation(
                        f"{document.doc_id} part {part_number}: {e}"
                    ) from e
                part_rows.extend(row.columns() for row in sentence.rows)
                sentence_sizes.append(len(sentence.rows))
            lines = iter(_format_rows(part_rows, layout))
            for size in sentence_sizes:
                out.extend(next(lines) for _ in range(size))
                out.append("")
            out.append(_END)
    return "".join(line + "\n" for line in out)


def read_conll_file(path: str | Path) -> list[Document]:
    """Parse a CoNLL file, prefixing format errors with the path."""
    path = Path(path)
    try:
        return parse_conll(path.read_bytes())
    except ConllFormatError as e:
        raise type(e)(f"{path}: {e.args[0]}") from e


def conll_files(root: str | Path) -> list[Path]:
    """CoNLL files under ``root`` in lexicographic order (``root`` may be a file)."""
    root = Path(root)
    if root.is_file():
        return [root]
    return sorted(
        path for path in root.rglob("*") if path.is_file() and path.name.endswith(CONLL_SUFFIXES)
    )


def fingerprint(document: Document) -> str:
    """Stable digest of a document's canonical serialization."""
    return hashlib.sha256(write_conll([document], layout="canonical").encode("utf-8")).hexdigest()


# Mentions


def overt_ordinals(sentence: Sentence) -> list[int]:
    """For each row, the ordinal of the next overt token at or after it.

    Overt rows get their own ordinal; ``*pro*`` rows get the ordinal of the
    token that follows their gap.
    """
    ordinals: list[int] = []
    count = 0
    for row in sentence.rows:
        ordinals.append(count)
        if not row.is_pro:
            count += 1
    return ordinals


def pro_positions(sentence: Sentence, part: int, index: int) -> list[tuple[int, Azp]]:
    """``(row_index, Azp)`` for each ``*pro*`` row of a sentence."""
    ordinals = overt_ordinals(sentence)
    slots: dict[int, int] = defaultdict(int)
    positions = []
    for row_index, row in enumerate(sentence.rows):
        if row.is_pro:
            gap = ordinals[row_index]
            positions.append(
                (row_index, Azp(part=part, sentence=index, gap_index=gap, slot=slots[gap]))
            )
            slots[gap] += 1
    return positions


def azp_positions(document: Document) -> list[Azp]:
    """Every ``*pro*`` row of a document as an Azp, in document order."""
    return [
        azp
        for part, index, sentence in document.iter_sentences()
        for _, azp in pro_positions(sentence, part, index)
    ]


def iter_spans(document: Document) -> Iterator[tuple[int, int, int, int, int]]:
    """Yield ``(chain_id, part, sentence, first_row, last_row)`` for every tagged span."""
    for part, index, sentence in document.iter_sentences():
        stacks: dict[int, list[int]] = defaultdict(list)
        for row_index, row in enumerate(sentence.rows):
            for tag in row.coref_tags:
                if tag.boundary == "open_and_close":
                    yield tag.chain_id, part, index, row_index, row_index
                elif tag.boundary == "open":
                    stacks[tag.chain_id].append(row_index)
                elif stacks[tag.chain_id]:
                    yield tag.chain_id, part, index, stacks[tag.chain_id].pop(), row_index
                else:
                    raise InvariantViolation(
                        f"{document.doc_id}: chain {tag.chain_id} closed without being opened"
                    )
        if any(stacks.values()):
            raise InvariantViolation(f"{document.doc_id}: unclosed coreference tags")


def extract_mentions(document: Document) -> ClusterSet:
    """Materialize the chains encoded in the coreference column.

    Spans made only of ``*pro*`` rows become Azp members; every other span is a
    Mention over overt token ordinals.

    Raises:
        InvariantViolation: If a span is tagged twice or shared by two chains
    """
    groups: dict[int, list[Mention | Azp]] = defaultdict(list)
    sentences = {(part, index): sentence for part, index, sentence in document.iter_sentences()}
    cache: dict[tuple[int, int], tuple[list[int], dict[int, Azp]]] = {}

    for chain_id, part, index, first, last in iter_spans(document):
        if (part, index) not in cache:
            sentence = sentences[(part, index)]
            cache[(part, index)] = (
                overt_ordinals(sentence),
                dict(pro_positions(sentence, part, index)),
            )
        ordinals, pros = cache[(part, index)]
        rows = sentences[(part, index)].rows[first : last + 1]
        overt = [first + i for i, row in enumerate(rows) if not row.is_pro]
        member: Mention | Azp
        if overt:
            member = Mention(
                part=part, sentence=index, start=ordinals[overt[0]], end=ordinals[overt[-1]]
            )
        else:
            member = pros[first]
        groups[chain_id].append(member)

    try:
        return ClusterSet.from_groups(groups)
    except ValueError as e:
        raise InvariantViolation(f"{document.doc_id}: {e}") from e


def overt_row_index(sentence: Sentence, ordinal: int) -> int:
    """Row index of the overt token with the given ordinal."""
    for row_index, row_ordinal in enumerate(overt_ordinals(sentence)):
        if row_ordinal == ordinal and not sentence.rows[row_index].is_pro:
            return row_index
    raise InvariantViolation(f"no overt token {ordinal} in sentence")


def encode_mentions(clusters: ClusterSet, document: Document) -> Document:
    """Rewrite the coreference column of ``document`` from ``clusters``.

    Cells are written in canonical order: opens (outermost first), single-token
    tags, then closes (innermost first); ties go to the smaller chain id.

    Raises:
        InvariantViolation: If a member has no place in the document
    """
    # row key -> list of (order, tag)
    cells: dict[tuple[int, int, int], list[tuple[tuple[int, int, int], CorefTag]]] = defaultdict(
        list
    )
    for cluster in clusters:
        for member in cluster.members:
            try:
                sentence = document.sentence(member.part, member.sentence)
            except IndexError as e:
                raise InvariantViolation(str(e)) from e
            key = (member.part, member.sentence)
            if isinstance(member, Azp):
                pro_rows = {
                    azp: row_index
                    for row_index, azp in pro_positions(sentence, member.part, member.sentence)
                }
                if member not in pro_rows:
                    raise InvariantViolation(f"no *pro* row for {member}")
                cells[(*key, pro_rows[member])].append(
                    ((1, cluster.id, 0), CorefTag(chain_id=cluster.id, boundary="open_and_close"))
                )
                continue
            start = overt_row_index(sentence, member.start)
            end = overt_row_index(sentence, member.end)
            if start == end:
                cells[(*key, start)].append(
                    ((1, cluster.id, 0), CorefTag(chain_id=cluster.id, boundary="open_and_close"))
                )
            else:
                cells[(*key, start)].append(
                    ((0, -end, cluster.id), CorefTag(chain_id=cluster.id, boundary="open"))
                )
                cells[(*key, end)].append(
                    ((2, -start, cluster.id), CorefTag(chain_id=cluster.id, boundary="close"))
                )

    parts = []
    for part, sentences in enumerate(document.parts):
        new_sentences = []
        for index, sentence in enumerate(sentences):
            rows = []
            for row_index, row in enumerate(sentence.rows):
                cell = sorted(cells.get((part, index, row_index), []), key=lambda item: item[0])
                tags = tuple(tag for _, tag in cell)
                rows.append(row.model_copy(update={"coref_tags": tags}))
            new_sentences.append(Sentence(rows=tuple(rows)))
        parts.append(tuple(new_sentences))
    return Document(doc_id=document.doc_id, parts=tuple(parts))


def renumber(rows: Iterable[TokenRow], base: int) -> tuple[TokenRow, ...]:
    """Number rows sequentially from ``base``."""
    return tuple(
        row.model_copy(update={"word_number": base + offset}) for offset, row in enumerate(rows)
    )


def mask_azps(document: Document) -> Document:
    """Remove every ``*pro*`` row, renumbering in each sentence's own base."""
    if not document.has_pro_rows:
        return document
    retag = any(
        tag.boundary != "open_and_close"
        for _, _, sentence in document.iter_sentences()
        for row in sentence.rows
        if row.is_pro
        for tag in row.coref_tags
    )
    parts = []
    for sentences in document.parts:
        new_sentences = []
        for sentence in sentences:
            overt = sentence.overt_rows
            if not overt:
                raise InvariantViolation(f"{document.doc_id}: sentence holds only *pro* rows")
            new_sentences.append(Sentence(rows=renumber(overt, sentence.numbering_base)))
        parts.append(tuple(new_sentences))
    masked = Document(doc_id=document.doc_id, parts=tuple(parts))
    if retag:
        masked = encode_mentions(extract_mentions(document).without_azps(), masked)
    return masked
