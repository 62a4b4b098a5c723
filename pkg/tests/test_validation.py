"""Tests for CoNLL diagnostics."""

import pytest

from zero_coref.services.validation import ValidationService


def codes(findings):
    return [(finding.severity, finding.code) for finding in findings]


@pytest.mark.unit
class TestValidateBytes:
    """Test ValidationService.validate_bytes."""

    def test_clean_extended_document(self, bush_gold_text):
        """Test a well-formed extended document has no findings."""
        assert ValidationService.validate_bytes(bush_gold_text) == []

    def test_singletons_are_warnings(self, simple_text):
        """Test single-mention chains are reported without failing."""
        findings = ValidationService.validate_bytes(simple_text, "simple.conll")
        assert codes(findings) == [("warning", "singleton_chain"), ("warning", "singleton_chain")]
        assert findings[0].path == "simple.conll"
        assert findings[0].doc_id == "test/simple"
        assert not ValidationService.has_errors(findings)

    def test_untagged_pro(self, conll_builder):
        """Test a *pro* row outside every chain is a warning."""
        text = conll_builder(
            "test/pro",
            [[[("Ali", "NNP", "(0"), ("Ahmad", "NNP", "0)"), ("left", "VBD", "-"),
               ("*pro*", "PRON", "-")]]],
        )
        assert codes(ValidationService.validate_bytes(text)) == [
            ("warning", "singleton_chain"),
            ("warning", "untagged_pro"),
        ]

    def test_azp_only_chain(self, conll_builder):
        """Test a chain made only of *pro* rows is an error."""
        text = conll_builder(
            "test/pro", [[[("left", "VBD", "-"), ("*pro*", "PRON", "(5)"), (".", ".", "-")]]]
        )
        findings = ValidationService.validate_bytes(text)
        assert codes(findings) == [("error", "azp_only_chain")]
        assert ValidationService.has_errors(findings)

    def test_duplicate_chain_id(self, conll_builder):
        """Test the same chain tagging one span twice."""
        text = conll_builder("test/dup", [[[("Ali", "NNP", "(0)|(0)"), ("left", "VBD", "-")]]])
        assert codes(ValidationService.validate_bytes(text)) == [("error", "duplicate_chain_id")]

    def test_shared_mention(self, conll_builder):
        """Test one span in two chains."""
        text = conll_builder("test/shared", [[[("Ali", "NNP", "(0)|(1)"), ("left", "VBD", "-")]]])
        assert codes(ValidationService.validate_bytes(text)) == [("error", "shared_mention")]

    def test_unbalanced_brackets(self, conll_builder):
        """Test format errors carry their line number."""
        text = conll_builder("test/open", [[[("Ali", "NNP", "(0"), ("left", "VBD", "-")]]])
        (finding,) = ValidationService.validate_bytes(text)
        assert (finding.severity, finding.code, finding.line) == ("error", "unbalanced_coref", 2)
        assert not finding.message.startswith("line")

    @pytest.mark.parametrize(
        "data,code",
        [
            (b"#begin document (x); part 000\n\xff\xfe\n#end document\n", "non_utf8"),
            ("x 0 0 word\n", "malformed_header"),
            ("#begin document (x); part 000\nx 0 0 w NN * - - - -\n#end document\n",
             "column_count"),
            ("#begin document (x); part 000\nx 0 0 w NN * - - - - * (a)\n#end document\n",
             "malformed_coref_tag"),
            ("#begin document (x); part 000\nx 0 0 w NN ** - - - - * -\n#end document\n",
             "parse_bit"),
        ],
    )
    def test_format_errors(self, data, code):
        """Test each format error maps to its code."""
        (finding,) = ValidationService.validate_bytes(data)
        assert finding.code == code
        assert finding.severity == "error"


@pytest.mark.unit
class TestValidatePath:
    """Test ValidationService.validate_path."""

    def test_directory_in_order(self, write_file, tmp_path, bush_gold_text, simple_text):
        """Test files are checked in lexicographic order."""
        write_file("corpus/b.conll", simple_text)
        write_file("corpus/a.conll", bush_gold_text)
        write_file("corpus/notes.txt", "ignored")
        findings = ValidationService.validate_path(tmp_path / "corpus")
        assert {finding.path for finding in findings} == {str(tmp_path / "corpus" / "b.conll")}
        assert len(findings) == 2
