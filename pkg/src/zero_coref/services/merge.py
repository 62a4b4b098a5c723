"""Building the extended dataset: ONF AZPs injected into CoNLL documents."""

from collections import Counter, defaultdict
from collections.abc import Iterable, Sequence
from pathlib import PurePosixPath

from zero_coref.core.config import settings
from zero_coref.core.conll import (
    azp_positions,
    extract_mentions,
    fingerprint,
    overt_ordinals,
    overt_row_index,
)
from zero_coref.core.exceptions import (
    AmbiguousChainMatch,
    DocumentIdMismatch,
    InvariantViolation,
    StalePlan,
    UnalignableMember,
)
from zero_coref.core.logging import get_logger, log_reject
from zero_coref.models.coref import Azp, Mention
from zero_coref.models.documents import (
    CorefTag,
    Document,
    OnfChainMember,
    OnfDocument,
    Sentence,
    TokenRow,
)
from zero_coref.models.schemas import (
    AlignedMember,
    AlignmentTable,
    CorpusStats,
    IndexEntry,
    Insertion,
    MergePlan,
    NewMention,
    RejectReason,
    RejectRecord,
)

logger = get_logger(__name__)


def same_document(onf_id: str, conll_id: str) -> bool:
    """Whether an ONF id (usually a file stem) names a CoNLL document id."""
    return not onf_id or onf_id == conll_id or PurePosixPath(conll_id).name == onf_id


def _interleave(
    sentence: Sentence, gaps: dict[int, list[int | None]]
) -> list[TokenRow | int | None]:
    """Order existing rows and new AZP slots of one sentence.

    New AZPs at gap ``g`` follow any ``*pro*`` rows already in that gap and
    precede overt token ``g``. New slots appear as their chain id (or None).

    Raises:
        InvariantViolation: If a gap lies beyond the end of the sentence
    """
    overt_count = len(sentence.overt_rows)
    if gaps and max(gaps) > overt_count:
        raise InvariantViolation(f"gap {max(gaps)} beyond sentence of {overt_count} tokens")
    ordinals = overt_ordinals(sentence)
    items: list[TokenRow | int | None] = []
    for row, ordinal in zip(sentence.rows, ordinals, strict=True):
        if not row.is_pro:
            items.extend(gaps.get(ordinal, []))
        items.append(row)
    items.extend(gaps.get(overt_count, []))
    return items


def _pro_row(template: TokenRow, chain_id: int | None, arity: int) -> TokenRow:
    fill = settings.pro_fill
    tags = () if chain_id is None else (CorefTag(chain_id=chain_id, boundary="open_and_close"),)
    return TokenRow(
        doc_id=template.doc_id,
        part_number=template.part_number,
        word_number=template.word_number,
        word=settings.pro_marker,
        pos=settings.pro_pos,
        parse_bit="*",
        lemma=fill,
        frameset_id=fill,
        word_sense=fill,
        speaker=template.speaker,
        named_entity=fill,
        arguments=(fill,) * arity,
        coref_tags=tags,
    )


class MergeService:
    """Service for aligning ONF chains and extending CoNLL documents."""

    @staticmethod
    def align(onf: OnfDocument, conll: Document, strict: bool = True) -> AlignmentTable:
        """Map every IDENT chain member onto the CoNLL document.

        ONF word positions count the empty elements of the sentence that chain
        members reveal (AZP markers and other traces); they are shifted back by
        the ones preceding them. Traces other than AZPs have no CoNLL row and are
        left out of the table. Overt members are matched on surface first, then
        searched nearby, then taken by position alone.

        Args:
            onf: Parsed ONF chains
            conll: The matching CoNLL document
            strict: Raise on the first unalignable member instead of recording it

        Returns:
            Alignment table in chain order

        Raises:
            DocumentIdMismatch: If the inputs name different documents
            UnalignableMember: If strict and a member cannot be located
        """
        if not same_document(onf.doc_id, conll.doc_id):
            raise DocumentIdMismatch(f"ONF {onf.doc_id!r} does not describe {conll.doc_id!r}")

        traces: dict[tuple[int, int], set[int]] = defaultdict(set)
        azp_markers: dict[tuple[int, int], set[int]] = defaultdict(set)
        for chain in onf.chains:
            for member in chain.members:
                key = (chain.part, member.coordinate.sentence_index)
                if member.is_azp or member.is_trace:
                    traces[key].add(member.coordinate.start_word)
                if member.is_azp:
                    azp_markers[key].add(member.coordinate.start_word)

        members: list[AlignedMember] = []
        for chain in onf.chains:
            if chain.kind != "IDENT":
                continue
            for member_index, member in enumerate(chain.members):
                if member.is_trace and not member.is_azp:
                    logger.debug(f"Skipping trace {member.surface} of chain {chain.chain_id}")
                    continue
                key = (chain.part, member.coordinate.sentence_index)
                aligned = MergeService._align_member(
                    conll,
                    chain.part,
                    member,
                    sorted(traces.get(key, ())),
                    sorted(azp_markers.get(key, ())),
                )
                aligned = aligned.model_copy(
                    update={"chain_id": chain.chain_id, "member_index": member_index}
                )
                if not aligned.aligned:
                    logger.debug(
                        f"Unaligned member {member.coordinate.render()} of chain {chain.chain_id}"
                    )
                    if strict:
                        raise UnalignableMember(
                            f"{conll.doc_id}: chain {chain.chain_id} member "
                            f"{member.coordinate.render()} cannot be located"
                        )
                members.append(aligned)
        return AlignmentTable(doc_id=conll.doc_id, members=tuple(members))

    @staticmethod
    def _align_member(
        conll: Document,
        part: int,
        member: OnfChainMember,
        markers: list[int],
        azp_markers: list[int],
    ) -> AlignedMember:
        coordinate = member.coordinate
        unaligned = AlignedMember(
            chain_id=0,
            member_index=0,
            coordinate=coordinate.render(),
            part=part,
            is_azp=member.is_azp,
            method="unaligned",
        )
        try:
            sentence = conll.sentence(part, coordinate.sentence_index)
        except IndexError:
            return unaligned

        def overt(position: int) -> int:
            return position - sum(1 for marker in markers if marker < position)

        words = sentence.words
        if member.is_azp:
            gap = overt(coordinate.start_word)
            if gap > len(words):
                return unaligned
            slot = sum(
                1
                for marker in azp_markers
                if marker < coordinate.start_word and overt(marker) == gap
            )
            azp = Azp(part=part, sentence=coordinate.sentence_index, gap_index=gap, slot=slot)
            return unaligned.model_copy(update={"method": "position", "azp": azp})

        start = overt(coordinate.start_word)
        end = overt(coordinate.end_word)
        if coordinate.end_word in markers:
            end -= 1
        end = max(start, end)
        tokens = [token for token in member.surface.split() if not token.startswith("*")]

        def mention(first: int, last: int) -> Mention:
            return Mention(part=part, sentence=coordinate.sentence_index, start=first, end=last)

        if tokens and list(words[start : end + 1]) == tokens:
            return unaligned.model_copy(update={"method": "exact", "mention": mention(start, end)})
        if tokens:
            width = len(tokens)
            offsets = sorted(range(len(words) - width + 1), key=lambda o: (abs(o - start), o))
            for offset in offsets:
                if list(words[offset : offset + width]) == tokens:
                    return unaligned.model_copy(
                        update={"method": "surface", "mention": mention(offset, offset + width - 1)}
                    )
        if end < len(words):
            return unaligned.model_copy(
                update={"method": "position", "mention": mention(start, end)}
            )
        return unaligned

    @staticmethod
    def plan_merge(onf: OnfDocument, conll: Document, strict: bool = True) -> MergePlan:
        """Decide which AZPs to insert and which chain each one joins.

        An AZP whose chain's overt members sit in one CoNLL chain joins that chain.
        An AZP whose chain has a single overt member absent from the coreference
        columns gets a fresh chain id shared with that mention. Everything else is
        rejected with a reason. AZPs already present as ``*pro*`` rows are skipped.

        Args:
            onf: Parsed ONF chains
            conll: The matching CoNLL document
            strict: Raise on ambiguous or unalignable chains instead of rejecting

        Returns:
            The merge plan

        Raises:
            DocumentIdMismatch: If the inputs name different documents
            AmbiguousChainMatch: If strict and overt members span several CoNLL chains
            UnalignableMember: If strict and an overt member cannot be located
        """
        table = MergeService.align(onf, conll, strict=False)
        existing = extract_mentions(conll)
        chain_of = {
            mention: cluster.id for cluster in existing for mention in cluster.mentions
        }
        existing_ids = existing.ids
        next_id = max(existing_ids, default=-1) + 1
        present = Counter(
            (azp.part, azp.sentence, azp.gap_index) for azp in azp_positions(conll)
        )
        rescued: dict[Mention, int] = {}

        insertions: list[Insertion] = []
        new_mentions: list[NewMention] = []
        rejects: list[RejectRecord] = []

        def reject(targets: Iterable[AlignedMember], reason: RejectReason, detail: str) -> None:
            for target in targets:
                rejects.append(
                    RejectRecord(
                        doc_id=conll.doc_id,
                        part=target.part,
                        chain_id=target.chain_id,
                        coordinate=target.coordinate,
                        reason=reason,
                        detail=detail,
                    )
                )
                log_reject(conll.doc_id, target.chain_id, reason, detail)

        for chain in onf.chains:
            if chain.kind != "IDENT" or not any(member.is_azp for member in chain.members):
                continue
            aligned = table.for_chain(chain.chain_id)
            azps = [member for member in aligned if member.is_azp]
            overt = [member for member in aligned if not member.is_azp]
            if not overt:
                logger.warning(f"ONF chain {chain.chain_id} of {conll.doc_id} holds only AZPs")
                reject(azps, "azp_only_chain", "chain has no overt member")
                continue

            pending: list[AlignedMember] = []
            for member in azps:
                if member.azp is None:
                    reject([member], "unaligned_gap", "gap lies outside the document")
                elif member.azp.slot < present[
                    (member.azp.part, member.azp.sentence, member.azp.gap_index)
                ]:
                    logger.debug(f"{member.azp} already present in {conll.doc_id}")
                else:
                    pending.append(member)
            if not pending:
                continue

            lost = [member for member in overt if member.mention is None]
            if lost:
                detail = "overt member " + ", ".join(member.coordinate for member in lost)
                if strict:
                    raise UnalignableMember(f"{conll.doc_id}: chain {chain.chain_id}: {detail}")
                reject(pending, "unaligned_member", detail)
                continue

            mentions = [member.mention for member in overt if member.mention is not None]
            matched = sorted(
                {chain_of[m] for m in mentions if m in chain_of}
                | {rescued[m] for m in mentions if m in rescued}
            )
            if len(matched) > 1:
                detail = f"overt members fall in CoNLL chains {matched}"
                if strict:
                    raise AmbiguousChainMatch(f"{conll.doc_id}: chain {chain.chain_id}: {detail}")
                reject(pending, "ambiguous_chain", detail)
                continue

            if matched:
                chain_id, provenance = matched[0], "existing_chain"
            elif len(mentions) == 1:
                chain_id, provenance = next_id, "new_chain"
                next_id += 1
                rescued[mentions[0]] = chain_id
                new_mentions.append(NewMention(mention=mentions[0], chain_id=chain_id))
            else:
                reject(pending, "unmatched_chain", "overt members belong to no CoNLL chain")
                continue

            for member in pending:
                assert member.azp is not None
                insertions.append(
                    Insertion(
                        part=member.azp.part,
                        sentence=member.azp.sentence,
                        gap_index=member.azp.gap_index,
                        slot=member.azp.slot,
                        chain_id=chain_id,
                        provenance=provenance,  # type: ignore[arg-type]
                        source_chain=chain.chain_id,
                    )
                )

        insertions.sort(key=lambda insertion: insertion.position)
        _, index_map = MergeService.insert_azps(
            conll, [(Azp(**_azp_fields(i)), i.chain_id) for i in insertions]
        )
        logger.info(
            f"Planned {len(insertions)} AZP insertion(s) for {conll.doc_id} "
            f"({len(new_mentions)} new chain(s), {len(rejects)} rejected)"
        )
        return MergePlan(
            doc_id=conll.doc_id,
            fingerprint=fingerprint(conll),
            insertions=tuple(insertions),
            new_mentions=tuple(new_mentions),
            index_map=index_map,
            rejects=tuple(rejects),
            existing_chain_ids=existing_ids,
        )

    @staticmethod
    def insert_azps(
        document: Document, azps: Sequence[tuple[Azp, int | None]]
    ) -> tuple[Document, tuple[IndexEntry, ...]]:
        """Insert one ``*pro*`` row per AZP, tagged with its chain id if given.

        Rows in each sentence are renumbered from the sentence's own base.

        Returns:
            The new document and the map from original to new word numbers

        Raises:
            InvariantViolation: If an AZP points outside the document
        """
        by_sentence: dict[tuple[int, int], dict[int, list[int | None]]] = defaultdict(
            lambda: defaultdict(list)
        )
        for azp, chain_id in sorted(azps, key=lambda item: item[0].sort_key):
            by_sentence[(azp.part, azp.sentence)][azp.gap_index].append(chain_id)
        for part, index in by_sentence:
            try:
                document.sentence(part, index)
            except IndexError as e:
                raise InvariantViolation(str(e)) from e

        parts: list[tuple[Sentence, ...]] = [() for _ in document.parts]
        index_map: list[IndexEntry] = []
        for part, index, sentence in document.iter_sentences():
            gaps = by_sentence.get((part, index), {})
            items = _interleave(sentence, gaps)
            arity = len(sentence.rows[0].arguments)
            base = sentence.numbering_base
            rows: list[TokenRow] = []
            for position, item in enumerate(items):
                if isinstance(item, TokenRow):
                    row = item
                    index_map.append(
                        IndexEntry(
                            part=part,
                            sentence=index,
                            original=item.word_number,
                            extended=base + position,
                        )
                    )
                else:
                    neighbour = rows[-1] if rows else next(
                        candidate for candidate in items if isinstance(candidate, TokenRow)
                    )
                    row = _pro_row(neighbour, item, arity)
                rows.append(row.model_copy(update={"word_number": base + position}))
            parts[part] = (*parts[part], Sentence(rows=tuple(rows)))
        return Document(doc_id=document.doc_id, parts=tuple(parts)), tuple(index_map)

    @staticmethod
    def apply_merge(plan: MergePlan, conll: Document) -> Document:
        """Apply a merge plan to the document it was made for.

        Raises:
            StalePlan: If the document changed since planning
        """
        if plan.doc_id != conll.doc_id or plan.fingerprint != fingerprint(conll):
            raise StalePlan(f"merge plan for {plan.doc_id!r} does not match {conll.doc_id!r}")
        if plan.is_empty:
            return conll

        document, _ = MergeService.insert_azps(
            conll, [(Azp(**_azp_fields(i)), i.chain_id) for i in plan.insertions]
        )
        for new in plan.new_mentions:
            document = _edit_tags(document, new, add=True)
        logger.info(f"Inserted {len(plan.insertions)} *pro* row(s) into {conll.doc_id}")
        return document

    @staticmethod
    def strip_merge(document: Document, plan: MergePlan) -> Document:
        """Undo ``apply_merge``: drop inserted rows and tags, restore word numbers.

        Raises:
            StalePlan: If the document does not carry the plan's insertions
        """
        if plan.doc_id != document.doc_id:
            raise StalePlan(f"merge plan for {plan.doc_id!r} does not match {document.doc_id!r}")
        if plan.is_empty:
            return document
        for new in plan.new_mentions:
            document = _edit_tags(document, new, add=False)

        to_drop: Counter[tuple[int, int, int]] = Counter(
            (i.part, i.sentence, i.gap_index) for i in plan.insertions
        )
        originals = plan.original_numbers()
        parts: list[tuple[Sentence, ...]] = [() for _ in document.parts]
        for part, index, sentence in document.iter_sentences():
            ordinals = overt_ordinals(sentence)
            drop: set[int] = set()
            for gap in {g for (p, s, g) in to_drop if (p, s) == (part, index)}:
                in_gap = [
                    row_index
                    for row_index, row in enumerate(sentence.rows)
                    if row.is_pro and ordinals[row_index] == gap
                ]
                count = to_drop[(part, index, gap)]
                if len(in_gap) < count:
                    raise StalePlan(f"{document.doc_id}: missing *pro* rows at gap {gap}")
                drop.update(in_gap[len(in_gap) - count :])
            rows = []
            for row_index, row in enumerate(sentence.rows):
                if row_index in drop:
                    continue
                original = originals.get((part, index, row.word_number))
                if original is None:
                    raise StalePlan(f"{document.doc_id}: row {row.word_number} not in index map")
                rows.append(row.model_copy(update={"word_number": original}))
            parts[part] = (*parts[part], Sentence(rows=tuple(rows)))
        return Document(doc_id=document.doc_id, parts=tuple(parts))

    @staticmethod
    def corpus_stats(documents: Iterable[Document]) -> CorpusStats:
        """Count documents, sentences, overt words and AZPs."""
        total = CorpusStats()
        for document in documents:
            sentences = [sentence for _, _, sentence in document.iter_sentences()]
            total = total + CorpusStats(
                documents=1,
                sentences=len(sentences),
                words=sum(len(sentence.overt_rows) for sentence in sentences),
                azps=sum(sentence.pro_count for sentence in sentences),
            )
        return total


def _azp_fields(insertion: Insertion) -> dict[str, int]:
    return {
        "part": insertion.part,
        "sentence": insertion.sentence,
        "gap_index": insertion.gap_index,
        "slot": insertion.slot,
    }


def _edit_tags(document: Document, new: NewMention, add: bool) -> Document:
    """Add or remove the tags of a rescued singleton mention."""
    mention = new.mention
    sentence = document.sentence(mention.part, mention.sentence)
    start = overt_row_index(sentence, mention.start)
    end = overt_row_index(sentence, mention.end)
    rows = list(sentence.rows)

    def replace(row_index: int, tags: list[CorefTag]) -> None:
        rows[row_index] = rows[row_index].model_copy(update={"coref_tags": tuple(tags)})

    if start == end:
        tag = CorefTag(chain_id=new.chain_id, boundary="open_and_close")
        tags = list(rows[start].coref_tags)
        if add:
            replace(start, [*tags, tag])
        else:
            if tag not in tags:
                raise StalePlan(f"{document.doc_id}: missing tag {tag.render()}")
            last = len(tags) - 1 - tags[::-1].index(tag)
            replace(start, tags[:last] + tags[last + 1 :])
    else:
        opening = CorefTag(chain_id=new.chain_id, boundary="open")
        closing = CorefTag(chain_id=new.chain_id, boundary="close")
        open_tags, close_tags = list(rows[start].coref_tags), list(rows[end].coref_tags)
        if add:
            replace(start, [*open_tags, opening])
            replace(end, [closing, *close_tags])
        else:
            if opening not in open_tags or closing not in close_tags:
                raise StalePlan(f"{document.doc_id}: missing tags of chain {new.chain_id}")
            last = len(open_tags) - 1 - open_tags[::-1].index(opening)
            replace(start, open_tags[:last] + open_tags[last + 1 :])
            close_tags.remove(closing)
            replace(end, close_tags)

    parts = list(document.parts)
    sentences = list(parts[mention.part])
    sentences[mention.sentence] = Sentence(rows=tuple(rows))
    parts[mention.part] = tuple(sentences)
    return Document(doc_id=document.doc_id, parts=tuple(parts))
