"""Pytest configuration and shared fixtures."""

from collections.abc import Callable, Sequence
from pathlib import Path

import pytest

from zero_coref.core.conll import parse_conll
from zero_coref.models.coref import Azp, ClusterSet, Mention
from zero_coref.models.documents import Document

# (word, pos, coref cell)
Token = tuple[str, str, str]
ConllBuilder = Callable[..., str]


def build_conll(
    doc_id: str, parts: Sequence[Sequence[Sequence[Token]]], arguments: int = 0
) -> str:
    """Render canonical CoNLL text from ``parts -> sentences -> tokens``."""
    lines = []
    for part_number, sentences in enumerate(parts):
        lines.append(f"#begin document ({doc_id}); part {part_number:03d}")
        for sentence in sentences:
            for word_number, (word, pos, coref) in enumerate(sentence):
                extra = " *" * arguments
                lines.append(
                    f"{doc_id} {part_number} {word_number} {word} {pos} * - - - - *{extra} {coref}"
                )
            lines.append("")
        lines.append("#end document")
    return "".join(line + "\n" for line in lines)


@pytest.fixture
def conll_builder() -> ConllBuilder:
    """Builder for canonical CoNLL fixtures."""
    return build_conll


@pytest.fixture
def simple_text() -> str:
    """Two sentences: chain 0 over tokens 0-1, chain 1 on token 3."""
    return build_conll(
        "test/simple",
        [
            [
                [("the", "DT", "(0"), ("ministry", "NN", "0)"), ("said", "VBD", "-"),
                 ("Sudan", "NNP", "(1)"), (".", ".", "-")],
                [("talks", "NNS", "-"), ("ended", "VBD", "-"), (".", ".", "-")],
            ]
        ],
    )


@pytest.fixture
def simple_document(simple_text: str) -> Document:
    return parse_conll(simple_text)[0]


@pytest.fixture
def table2_text() -> str:
    """Original sentence of the extended-representation example (one argument column)."""
    return build_conll(
        "nw/ann/00/ann_0002",
        [[[("كانا", "PV", "-"), ("في", "PREP", "-"), ("الوضع", "NOUN", "-"),
            ("نفسه", "NOUN", "-")]]],
        arguments=1,
    )


@pytest.fixture
def table2_extended_text() -> str:
    """The same sentence with ``*pro*`` after the verb."""
    return build_conll(
        "nw/ann/00/ann_0002",
        [[[("كانا", "PV", "-"), ("*pro*", "PRON", "-"), ("في", "PREP", "-"),
            ("الوضع", "NOUN", "-"), ("نفسه", "NOUN", "-")]]],
        arguments=1,
    )


@pytest.fixture
def onf_conll_text() -> str:
    """CoNLL side of the ONF/CoNLL merge pair; chain 92 already exists."""
    return build_conll(
        "nw/ann/00/ann_0001",
        [
            [
                [("Ahmad", "NNP", "(92)"), ("visited", "VBD", "-"), ("the", "DT", "-"),
                 ("market", "NN", "-"), (".", ".", "-")],
                [("He", "PRP", "(92)"), ("bought", "VBD", "-"), ("bread", "NN", "-"),
                 (".", ".", "-")],
                [("returned", "VBD", "-"), ("home", "NN", "-"), (".", ".", "-")],
                [("was", "VBD", "-"), ("crowded", "JJ", "-"), (".", ".", "-")],
            ]
        ],
    )


@pytest.fixture
def onf_text() -> str:
    """ONF side of the merge pair.

    Chain 71 pairs an untagged mention with an AZP; chain 92 extends CoNLL
    chain 92; chain 95 is an appositive.
    """
    return (
        "Coreference chains for section 0:\n"
        "---------------------------------\n"
        "\n"
        "    Chain 71 (IDENT)\n"
        "            0.2-3     the market\n"
        "            3.0-0     *\n"
        "\n"
        "    Chain 92 (IDENT)\n"
        "            0.0-0     Ahmad\n"
        "            1.0-0     He\n"
        "            2.0-0     *\n"
        "\n"
        "    Chain 95 (APPOS)\n"
        "            ATTRIB  1.1-1     bought\n"
        "            HEAD    1.2-2     bread\n"
        "\n"
    )


@pytest.fixture
def bush_gold_text() -> str:
    """Extended document: the AZP after 'praised' refers to Bush."""
    return build_conll(
        "bn/bush/00/bush_0001",
        [
            [
                [("Egypt", "NNP", "(1)"), ("welcomed", "VBD", "-"), ("Bush", "NNP", "(0)"),
                 (".", ".", "-")],
                [("Cairo", "NNP", "(1)"), ("hosted", "VBD", "-"), ("him", "PRP", "(0)"),
                 (".", ".", "-")],
                [("praised", "VBD", "-"), ("*pro*", "PRON", "(0)"), ("the", "DT", "-"),
                 ("talks", "NNS", "-"), (".", ".", "-")],
            ]
        ],
    ).replace("*pro* PRON * - - - - *", "*pro* PRON * - - - - -")


@pytest.fixture
def bush_gold(bush_gold_text: str) -> Document:
    return parse_conll(bush_gold_text)[0]


@pytest.fixture
def bush_masked_text() -> str:
    """The Bush document as a system sees it: no ``*pro*`` rows, no AZP tag."""
    return build_conll(
        "bn/bush/00/bush_0001",
        [
            [
                [("Egypt", "NNP", "(1)"), ("welcomed", "VBD", "-"), ("Bush", "NNP", "(0)"),
                 (".", ".", "-")],
                [("Cairo", "NNP", "(1)"), ("hosted", "VBD", "-"), ("him", "PRP", "(0)"),
                 (".", ".", "-")],
                [("praised", "VBD", "-"), ("the", "DT", "-"), ("talks", "NNS", "-"),
                 (".", ".", "-")],
            ]
        ],
    )


@pytest.fixture
def bush_masked(bush_masked_text: str) -> Document:
    return parse_conll(bush_masked_text)[0]


@pytest.fixture
def abc() -> tuple[Mention, Mention, Mention]:
    """Three single-token mentions a, b, c in sentence 0."""
    return (
        Mention(sentence=0, start=0, end=0),
        Mention(sentence=0, start=2, end=2),
        Mention(sentence=0, start=4, end=4),
    )


@pytest.fixture
def key_abc(abc) -> ClusterSet:
    """Key {{a, b, c}}."""
    return ClusterSet.from_groups({0: list(abc)})


@pytest.fixture
def response_ab_c(abc) -> ClusterSet:
    """Response {{a, b}, {c}}."""
    a, b, c = abc
    return ClusterSet.from_groups({0: [a, b], 1: [c]})


@pytest.fixture
def azp_s0() -> Azp:
    return Azp(sentence=0, gap_index=1)


@pytest.fixture
def write_file(tmp_path: Path) -> Callable[[str, str], Path]:
    """Write text under ``tmp_path`` and return the path."""

    def write(relative: str, text: str) -> Path:
        path = tmp_path / relative
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        return path

    return write
