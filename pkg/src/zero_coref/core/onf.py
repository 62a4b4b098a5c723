"""Reader for the coreference-chain listing of OntoNotes Normal Form files.

Two layouts are accepted. The multi-line layout prints one member per
indented line under the chain header::

    Coreference chains for section 0:
    ---------------------------------

        Chain 95 (APPOS)
                ATTRIB  8.1-4     <surface>
                HEAD    8.5-6     <surface>

The one-line layout puts every coordinate and the concatenated surfaces on
the header line::

    Chain 71 (IDENT)    6.2-13 7.2-2    <surface ...> *

Every other line of the file is ignored.
"""

import re
from pathlib import Path

from zero_coref.core.config import settings
from zero_coref.core.conll import decode
from zero_coref.core.exceptions import (
    DuplicateChainId,
    MalformedChainHeader,
    MalformedCoordinate,
    OnfFormatError,
)
from zero_coref.core.logging import get_logger
from zero_coref.models.documents import OnfChain, OnfChainMember, OnfCoordinate, OnfDocument

logger = get_logger(__name__)

_SECTION_RE = re.compile(r"^\s*Coreference chains for section (\d+)", re.IGNORECASE)
_CHAIN_RE = re.compile(r"^\s*Chain\s+(\S+)\s+\((\S+?)\)(.*)$")
_COORD_LIKE_RE = re.compile(r"^\d+\.")
_ROLES = ("ATTRIB", "HEAD")
_KINDS = ("IDENT", "APPOS")


def _coordinate(text: str, line_no: int) -> OnfCoordinate:
    try:
        return OnfCoordinate.parse(text)
    except ValueError as e:
        raise MalformedCoordinate(str(e), line=line_no) from e


def _member(
    coordinate: OnfCoordinate, surface: str, role: str | None
) -> OnfChainMember:
    surface = surface.strip()
    return OnfChainMember(
        coordinate=coordinate,
        is_azp=surface in settings.onf_azp_markers,
        surface=surface,
        role=role,  # type: ignore[arg-type]
    )


def _split_surfaces(tokens: list[str], coordinates: list[OnfCoordinate]) -> list[str]:
    """Distribute concatenated surface tokens over members, right to left.

    Each member after the first takes at most its span width; the first member
    takes whatever remains.
    """
    surfaces = [""] * len(coordinates)
    remaining = list(tokens)
    for i in range(len(coordinates) - 1, 0, -1):
        take = min(coordinates[i].width, max(len(remaining) - 1, 0))
        taken, remaining = remaining[len(remaining) - take :], remaining[: len(remaining) - take]
        surfaces[i] = " ".join(taken)
    if coordinates:
        surfaces[0] = " ".join(remaining)
    return surfaces


def _one_line_members(rest: str, line_no: int) -> list[OnfChainMember]:
    tokens = rest.split()
    items: list[tuple[str | None, OnfCoordinate]] = []
    role: str | None = None
    position = 0
    while position < len(tokens):
        token = tokens[position]
        if token in _ROLES and role is None:
            role = token
        elif _COORD_LIKE_RE.match(token):
            items.append((role, _coordinate(token, line_no)))
            role = None
        else:
            break
        position += 1
    if role is not None:
        raise MalformedChainHeader(f"role {role} without a coordinate", line=line_no)
    surfaces = _split_surfaces(tokens[position:], [coordinate for _, coordinate in items])
    return [
        _member(coordinate, surface, member_role)
        for (member_role, coordinate), surface in zip(items, surfaces, strict=True)
    ]


def _indented_member(line: str, line_no: int) -> OnfChainMember | None:
    """Parse an indented member line, or return None if the line is not one."""
    if not line[:1].isspace():
        return None
    tokens = line.split(maxsplit=2)
    role = None
    if tokens and tokens[0] in _ROLES:
        role = tokens.pop(0)
        tokens = " ".join(tokens).split(maxsplit=1)
    if not tokens or not _COORD_LIKE_RE.match(tokens[0]):
        if role is not None:
            raise MalformedCoordinate(f"{role} member without a coordinate", line=line_no)
        return None
    coordinate = _coordinate(tokens[0], line_no)
    surface = " ".join(tokens[1:])
    return _member(coordinate, surface, role)


def parse_onf(data: str | bytes, doc_id: str = "") -> OnfDocument:
    """Extract coreference chains from ONF text.

    Args:
        data: ONF file contents
        doc_id: Identifier to attach (ONF chain listings carry none)

    Returns:
        Parsed chains in file order

    Raises:
        MalformedChainHeader: If a chain header or block is malformed
        MalformedCoordinate: If a member coordinate cannot be read
        DuplicateChainId: If a chain id repeats
    """
    text = decode(data)
    chains: list[OnfChain] = []
    seen: dict[int, int] = {}
    part = 0

    header: tuple[int, str, int] | None = None
    members: list[OnfChainMember] = []

    def close_chain() -> None:
        nonlocal header
        if header is None:
            return
        chain_id, kind, header_line = header
        header = None
        if not members:
            raise MalformedChainHeader(f"chain {chain_id} has no members", line=header_line)
        try:
            parsed = OnfChain(
                chain_id=chain_id,
                kind=kind,  # type: ignore[arg-type]
                members=tuple(members),
                part=part,
            )
        except ValueError as e:
            raise MalformedChainHeader(str(e), line=header_line) from e
        chains.append(parsed)
        members.clear()

    for line_no, line in enumerate(text.splitlines(), start=1):
        section = _SECTION_RE.match(line)
        if section:
            close_chain()
            part = int(section.group(1))
            continue

        chain = _CHAIN_RE.match(line)
        if chain:
            close_chain()
            raw_id, kind, rest = chain.groups()
            if not raw_id.isdigit():
                raise MalformedChainHeader(f"chain id {raw_id!r} is not a number", line=line_no)
            if kind not in _KINDS:
                raise MalformedChainHeader(f"unknown chain kind {kind!r}", line=line_no)
            chain_id = int(raw_id)
            if chain_id in seen:
                raise DuplicateChainId(
                    f"chain {chain_id} already defined on line {seen[chain_id]}", line=line_no
                )
            seen[chain_id] = line_no
            header = (chain_id, kind, line_no)
            if rest.strip():
                members.extend(_one_line_members(rest, line_no))
            continue

        if header is not None:
            member = _indented_member(line, line_no) if line.strip() else None
            if member is not None:
                members.append(member)
            else:
                close_chain()

    close_chain()
    logger.debug(f"Parsed {len(chains)} ONF chain(s) for {doc_id or '<unnamed>'}")
    return OnfDocument(doc_id=doc_id, chains=tuple(chains))


def read_onf_file(path: str | Path) -> OnfDocument:
    """Parse an ONF file, using its stem as the document id."""
    path = Path(path)
    try:
        return parse_onf(path.read_bytes(), doc_id=path.stem)
    except OnfFormatError as e:
        raise type(e)(f"{path}: {e.args[0]}") from e


def azp_members(document: OnfDocument) -> list[tuple[int, OnfChainMember]]:
    """AZP members of every chain, in document order."""
    return [
        (chain.chain_id, member)
        for chain in document.chains
        for member in chain.members
        if member.is_azp
    ]
