"""Tests for the zero-coref command line."""

import json
import logging

import pytest

from zero_coref.cli.commands import merge as merge_command
from zero_coref.cli.main import create_parser, main
from zero_coref.core.conll import extract_mentions, read_conll_file

REQUIRED = {
    "merge": ["--conll", "a", "--onf", "b", "--out", "c"],
    "stats": ["--conll", "a"],
    "score": ["--key", "a", "--response", "b"],
    "resolve": ["--conll", "a", "--mode", "pipeline", "--out", "c"],
    "validate": ["a"],
}


@pytest.fixture(autouse=True)
def restore_logging():
    """main() reconfigures the root logger; put it back afterwards."""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


def run(capsys, *argv) -> tuple[int, str]:
    exit_code = main([str(arg) for arg in argv])
    return exit_code, capsys.readouterr().out


def run_json(capsys, *argv):
    exit_code, out = run(capsys, *argv, "--json")
    return exit_code, json.loads(out)


@pytest.fixture
def merge_inputs(write_file, tmp_path, onf_conll_text, onf_text):
    """CoNLL and ONF directories of the merge fixture, plus an output directory."""
    write_file("conll/ann_0001.conll", onf_conll_text)
    write_file("onf/ann_0001.onf", onf_text)
    return tmp_path / "conll", tmp_path / "onf", tmp_path / "out"


@pytest.fixture
def bush_files(write_file, bush_gold_text, bush_masked_text):
    """Gold and masked copies of the Bush document."""
    return (
        write_file("gold/bush_0001.conll", bush_gold_text),
        write_file("masked/bush_0001.conll", bush_masked_text),
    )


@pytest.mark.unit
class TestParser:
    """Test argument parsing."""

    @pytest.mark.parametrize("command", sorted(REQUIRED))
    def test_commands(self, command):
        """Test every workflow is a sub-command with common flags."""
        args = create_parser().parse_args([command, *REQUIRED[command], "--seed", "3"])
        assert args.command == command
        assert args.seed == 3
        assert args.json is False

    def test_jobs_must_be_positive(self, tmp_path):
        """Test --jobs 0 is refused."""
        with pytest.raises(SystemExit):
            main(["stats", "--conll", str(tmp_path), "--jobs", "0"])

    def test_bad_buckets(self):
        """Test --buckets is validated while parsing."""
        with pytest.raises(SystemExit):
            create_parser().parse_args([*("resolve", *REQUIRED["resolve"]), "--buckets", "1,2"])

    def test_missing_input(self, tmp_path, capsys):
        """Test a missing input path exits with status 1."""
        exit_code, out = run(capsys, "stats", "--conll", tmp_path / "absent")
        assert exit_code == 1
        assert out == ""


@pytest.mark.integration
class TestMergeCommand:
    """Test zero-coref merge."""

    def test_merge_pair(self, capsys, merge_inputs):
        """Test AZPs are injected and a new chain is created."""
        conll_dir, onf_dir, out_dir = merge_inputs
        exit_code, summary = run_json(
            capsys, "merge", "--conll", conll_dir, "--onf", onf_dir, "--out", out_dir
        )
        assert exit_code == 0
        assert (summary["files"], summary["documents"]) == (1, 1)
        assert (summary["insertions"], summary["new_chains"], summary["rejected"]) == (2, 1, 0)
        assert summary["config"]["command"] == "merge"

        (merged,) = read_conll_file(out_dir / "ann_0001.conll")
        clusters = extract_mentions(merged)
        assert 93 in clusters.ids
        assert len(clusters.azps) == 2
        assert json.loads((out_dir / "rejects.json").read_text(encoding="utf-8")) == []

    def test_inputs_parsed_once(self, capsys, merge_inputs, mocker):
        """Test each CoNLL input is parsed a single time."""
        spy = mocker.spy(merge_command, "parse_conll")
        conll_dir, onf_dir, out_dir = merge_inputs
        exit_code, _ = run(
            capsys, "merge", "--conll", conll_dir, "--onf", onf_dir, "--out", out_dir
        )
        assert exit_code == 0
        assert spy.call_count == 1

    def test_azp_free_input_unchanged(self, capsys, write_file, tmp_path, onf_conll_text):
        """Test files without ONF AZPs are copied byte for byte."""
        write_file("conll/ann_0001.conll", onf_conll_text)
        write_file(
            "onf/ann_0001.onf",
            "Coreference chains for section 0:\n"
            "    Chain 92 (IDENT)\n"
            "            0.0-0     Ahmad\n"
            "            1.0-0     He\n",
        )
        exit_code, _ = run(
            capsys,
            "merge",
            "--conll",
            tmp_path / "conll",
            "--onf",
            tmp_path / "onf",
            "--out",
            tmp_path / "out",
        )
        assert exit_code == 0
        assert (tmp_path / "out" / "ann_0001.conll").read_bytes() == onf_conll_text.encode()

    def test_custom_reject_log(self, capsys, merge_inputs, tmp_path):
        """Test --reject-log moves the reject log."""
        conll_dir, onf_dir, out_dir = merge_inputs
        log = tmp_path / "logs" / "rejects.json"
        exit_code, _ = run(
            capsys,
            "merge",
            "--conll",
            conll_dir,
            "--onf",
            onf_dir,
            "--out",
            out_dir,
            "--reject-log",
            log,
        )
        assert exit_code == 0
        assert log.exists()
        assert not (out_dir / "rejects.json").exists()

    def test_missing_onf(self, capsys, write_file, tmp_path, onf_conll_text, onf_text):
        """Test a CoNLL document without an ONF partner fails."""
        write_file("conll/ann_0001.conll", onf_conll_text)
        write_file("onf/ann_0009.onf", onf_text)
        exit_code, _ = run(
            capsys,
            "merge",
            "--conll",
            tmp_path / "conll",
            "--onf",
            tmp_path / "onf",
            "--out",
            tmp_path / "out",
        )
        assert exit_code == 1
        assert not (tmp_path / "out").exists()


@pytest.mark.integration
class TestStatsCommand:
    """Test zero-coref stats."""

    def test_json(self, capsys, bush_files):
        """Test counts of the extended Bush document."""
        gold, _ = bush_files
        exit_code, stats = run_json(capsys, "stats", "--conll", gold.parent)
        assert exit_code == 0
        assert stats == {"documents": 1, "sentences": 3, "words": 12, "azps": 1}

    def test_text(self, capsys, bush_files):
        """Test the text rendering."""
        gold, _ = bush_files
        exit_code, out = run(capsys, "stats", "--conll", gold, "--format", "text")
        assert exit_code == 0
        assert "12" in out


@pytest.mark.integration
class TestScoreCommand:
    """Test zero-coref score."""

    def test_perfect(self, capsys, bush_files, tmp_path):
        """Test a key scored against itself, with the report written to --out."""
        gold, _ = bush_files
        report_path = tmp_path / "report.json"
        exit_code, report = run_json(
            capsys, "score", "--key", gold, "--response", gold, "--out", report_path
        )
        assert exit_code == 0
        assert report["conll_avg_f1"] == 1.0
        assert report["azp"] == {"r": 1.0, "p": 1.0, "f1": 1.0}
        assert report["config"]["azp_hit_mode"] == "entity"
        assert json.loads(report_path.read_text(encoding="utf-8")) == report

    def test_pro_excluded_from_coref(self, capsys, bush_files):
        """Test --no-include-pro-in-coref scores overt mentions only."""
        gold, masked = bush_files
        exit_code, report = run_json(
            capsys,
            "score",
            "--key",
            gold,
            "--response",
            masked,
            "--no-include-pro-in-coref",
            "--azp-hit",
            "position",
        )
        assert exit_code == 0
        assert report["muc"]["r"] == 1.0
        assert report["azp"]["r"] == 0.0
        assert report["config"]["include_pro_in_coref"] is False
        assert report["config"]["azp_hit_mode"] == "position"

    def test_text(self, capsys, bush_files):
        """Test the text table."""
        gold, _ = bush_files
        exit_code, out = run(capsys, "score", "--key", gold, "--response", gold, "--format", "text")
        assert exit_code == 0
        assert "muc" in out

    def test_unmatched_documents(self, capsys, bush_files, write_file, simple_text):
        """Test differing document sets fail."""
        gold, _ = bush_files
        other = write_file("other/simple.conll", simple_text)
        exit_code, _ = run(capsys, "score", "--key", gold, "--response", other)
        assert exit_code == 1


@pytest.mark.integration
class TestResolveCommand:
    """Test zero-coref resolve."""

    def test_pipeline_baseline(self, capsys, bush_files, tmp_path):
        """Test the baseline pipeline attaches every verb gap."""
        _, masked = bush_files
        out_dir = tmp_path / "resolved"
        exit_code, payload = run_json(
            capsys, "resolve", "--conll", masked.parent, "--mode", "pipeline", "--out", out_dir
        )
        assert exit_code == 0
        assert payload["documents"] == 1
        assert (payload["attached_azps"], payload["abstained_azps"]) == (3, 0)
        (document,) = read_conll_file(out_dir / "bush_0001.conll")
        assert len(extract_mentions(document).azps) == 3

    def test_deterministic(self, capsys, bush_files, tmp_path):
        """Test equal inputs and seed give identical files."""
        _, masked = bush_files
        outputs = []
        for name in ("first", "second"):
            exit_code, _ = run(
                capsys,
                "resolve",
                "--conll",
                masked,
                "--mode",
                "joint",
                "--out",
                tmp_path / name,
                "--seed",
                "5",
            )
            assert exit_code == 0
            outputs.append((tmp_path / name / "bush_0001.conll").read_bytes())
        assert outputs[0] == outputs[1]

    @pytest.mark.parametrize("mode", ["pipeline", "joint"])
    def test_gold_oracles_score_perfectly(self, capsys, bush_files, tmp_path, mode, bush_gold_text):
        """Test gold oracles reproduce the gold file and score 1.0."""
        gold, masked = bush_files
        out_dir = tmp_path / mode
        exit_code, payload = run_json(
            capsys,
            "resolve",
            "--conll",
            masked,
            "--mode",
            mode,
            "--out",
            out_dir,
            "--gold",
            gold,
            "--coref",
            "gold",
            "--identifier",
            "gold",
            "--azp-resolver",
            "gold",
        )
        assert exit_code == 0
        assert payload["score"]["conll_avg_f1"] == 1.0
        assert payload["score"]["azp"]["f1"] == 1.0
        assert (out_dir / "bush_0001.conll").read_text(encoding="utf-8") == bush_gold_text
        assert (out_dir / "score.json").exists()

    def test_compare(self, capsys, bush_files, tmp_path):
        """Test --compare writes the pipeline/joint diff."""
        _, masked = bush_files
        out_dir = tmp_path / "compared"
        exit_code, payload = run_json(
            capsys,
            "resolve",
            "--conll",
            masked,
            "--mode",
            "pipeline",
            "--out",
            out_dir,
            "--compare",
        )
        assert exit_code == 0
        assert payload["differing_documents"] == 0
        diff = json.loads((out_dir / "diff.json").read_text(encoding="utf-8"))
        assert diff == [
            {
                "doc_id": "bn/bush/00/bush_0001",
                "moved_azps": [],
                "pipeline_only": [],
                "joint_only": [],
            }
        ]

    def test_gold_oracle_needs_gold(self, capsys, bush_files, tmp_path):
        """Test gold oracles without --gold fail."""
        _, masked = bush_files
        exit_code, _ = run(
            capsys,
            "resolve",
            "--conll",
            masked,
            "--mode",
            "pipeline",
            "--out",
            tmp_path / "out",
            "--identifier",
            "gold",
        )
        assert exit_code == 1

    def test_parallel_matches_serial(self, capsys, write_file, tmp_path, bush_masked_text):
        """Test --jobs does not change the output."""
        for name in ("a", "b", "c"):
            write_file(
                f"many/{name}.conll",
                bush_masked_text.replace("bn/bush/00/bush_0001", f"bn/bush/00/{name}"),
            )
        for jobs, out in (("1", "serial"), ("3", "parallel")):
            exit_code, _ = run(
                capsys,
                "resolve",
                "--conll",
                tmp_path / "many",
                "--mode",
                "pipeline",
                "--out",
                tmp_path / out,
                "--jobs",
                jobs,
            )
            assert exit_code == 0
        for name in ("a", "b", "c"):
            assert (tmp_path / "serial" / f"{name}.conll").read_bytes() == (
                tmp_path / "parallel" / f"{name}.conll"
            ).read_bytes()


@pytest.mark.integration
class TestValidateCommand:
    """Test zero-coref validate."""

    def test_clean(self, capsys, bush_files):
        """Test a clean file exits 0 with no findings."""
        gold, _ = bush_files
        exit_code, findings = run_json(capsys, "validate", gold)
        assert exit_code == 0
        assert findings == []

    def test_errors_fail(self, capsys, write_file, conll_builder):
        """Test an error finding exits 1."""
        path = write_file(
            "bad/doc.conll",
            conll_builder("bad", [[[("left", "VBD", "-"), ("*pro*", "PRON", "(5)")]]]),
        )
        exit_code, findings = run_json(capsys, "validate", path)
        assert exit_code == 1
        assert [finding["code"] for finding in findings] == ["azp_only_chain"]

    def test_text(self, capsys, write_file, simple_text):
        """Test warnings alone exit 0."""
        path = write_file("warn/doc.conll", simple_text)
        exit_code, out = run(capsys, "validate", path)
        assert exit_code == 0
        assert "singleton_chain" in out
