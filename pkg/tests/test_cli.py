import json

import pytest
from click.testing import CliRunner

from reqspec.cli import cli, main

ROW3 = ("Up to four vending vehicles may dispense merchandise in any given "
        "city block at any time.")


@pytest.fixture()
def runner():
    return CliRunner()


class TestExitCodes:
    def test_success(self):
        assert main(["kb", "stats"]) == 0

    def test_unknown_subcommand_is_user_error(self):
        assert main(["definitely-not-a-command"]) == 1

    def test_missing_file_is_user_error(self):
        assert main(["kb", "stats", "--kb", "/no/such/file.jsonl"]) == 1


class TestKbCommands:
    def test_stats_shape(self, runner):
        result = runner.invoke(cli, ["kb", "stats"])
        assert result.exit_code == 0
        stats = json.loads(result.output)
        assert stats["patterns"] >= 15
        assert stats["total_phrases"] >= 150

    def test_export_round_trips(self, runner, tmp_path):
        result = runner.invoke(cli, ["kb", "export"])
        assert result.exit_code == 0
        path = tmp_path / "kb.jsonl"
        path.write_text(result.output)
        again = runner.invoke(cli, ["kb", "stats", "--kb", str(path)])
        assert json.loads(again.output)["total_phrases"] >= 150

    def test_ingest(self, runner, tmp_path):
        corpus = tmp_path / "corpus.jsonl"
        corpus.write_text(json.dumps({
            "text": "X rises in Y.",
            "slots": {
                "entity": [{"text": "X", "span": [0, 1], "confidence": 1.0}],
                "location": [{"text": "Y", "span": [3, 4], "confidence": 1.0}],
            },
        }) + "\n")
        out = tmp_path / "kb_out.jsonl"
        result = runner.invoke(cli, ["kb", "ingest", str(corpus),
                                     "--out", str(out)])
        assert result.exit_code == 0
        assert "added 2 terms, 1 patterns" in result.output


class TestExtractCommand:
    def test_prints_slots(self, runner):
        result = runner.invoke(cli, ["extract", "--text", ROW3])
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert payload["slots"]["quantifier"][0]["text"] == "vending vehicles"
        assert payload["slots"]["location"][0]["text"] == "city block"


class TestSynthCommand:
    def test_writes_expected_volume(self, runner, tmp_path):
        out = tmp_path / "synth.jsonl"
        result = runner.invoke(cli, ["synth", "--lambda", "1", "--seed", "1",
                                     "--out", str(out)])
        assert result.exit_code == 0
        lines = [json.loads(l) for l in out.read_text().strip().splitlines()]
        assert len(lines) == 33  # 1 * max vocab size of the seed KB
        assert all({"text", "slots", "pattern", "row"} <= set(l) for l in lines)

    def test_exclusions_respected(self, runner, tmp_path):
        test_corpus = tmp_path / "test.jsonl"
        test_corpus.write_text(json.dumps({
            "text": "irrelevant",
            "slots": {"location": [{"text": "city block", "span": None}]},
        }) + "\n")
        out = tmp_path / "synth.jsonl"
        result = runner.invoke(cli, [
            "synth", "--lambda", "1", "--seed", "1",
            "--exclude", str(test_corpus), "--out", str(out)])
        assert result.exit_code == 0
        for line in out.read_text().strip().splitlines():
            record = json.loads(line)
            for entries in record["slots"].values():
                for entry in entries:
                    assert entry["text"].lower() != "city block"


class TestEvalCommand:
    def test_report_and_dld(self, runner, tmp_path):
        corpus = tmp_path / "gold.jsonl"
        corpus.write_text(json.dumps({
            "tokens": ["a", "b", "c"],
            "slots": {"entity": [{"text": "a", "span": [0, 1]}]},
        }) + "\n")
        result = runner.invoke(cli, ["eval", "--gold", str(corpus),
                                     "--pred", str(corpus)])
        assert result.exit_code == 0
        report = json.loads(result.output)
        assert report["token_acc"] == 1.0
        assert report["sent_acc"] == 1.0

        f1 = tmp_path / "a.txt"
        f2 = tmp_path / "b.txt"
        f1.write_text("ab")
        f2.write_text("ba")
        result = runner.invoke(cli, ["eval", "dld", "--a", str(f1),
                                     "--b", str(f2)])
        assert result.output.strip() == "1"


class TestChatCommand:
    def test_json_stream(self, runner):
        script = f"{ROW3}\nconfirm\n"
        result = runner.invoke(cli, ["chat", "--json"], input=script)
        assert result.exit_code == 0
        replies = [json.loads(line) for line in result.output.strip().splitlines()]
        assert replies[0]["kind"] == "proposal"
        assert replies[1]["kind"] == "ack"

    def test_guard_validate(self, runner):
        result = runner.invoke(cli, ["guard", "validate", "--term",
                                     "Music Row", "--kind", "location"])
        assert result.exit_code == 0
        verdict = json.loads(result.output)
        assert verdict["decision"] == "accept"
