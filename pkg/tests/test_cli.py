"""Command-line interface: subcommand round trips and exit codes."""

from __future__ import annotations

import json
import sys
import textwrap

import pytest

from fingertype._jsonl import group_pools, parse_records
from fingertype.cli import main
from fingertype.keymap import fingers_for_text, parse_keymap
from fingertype.ngram import load_table


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_version_and_usage_exit_codes(capsys):
    assert main(["--version"]) == 0
    assert main([]) == 1
    assert main(["bogus"]) == 1
    assert main(["decode"]) == 1  # missing required --in
    capsys.readouterr()


def test_keymap_prints_parseable_mapping(capsys):
    code, out, _ = run(capsys, "keymap")
    assert code == 0
    km = parse_keymap(out)
    assert km.finger_for("t") == 3
    code, out, _ = run(capsys, "keymap", "--space-finger", "5")
    assert parse_keymap(out).space_finger == 5


def test_keymap_pool_tables(capsys):
    code, out, _ = run(capsys, "keymap", "--pools", "canonical")
    assert code == 0
    assert len(out.strip().splitlines()) == 26
    code, out, _ = run(capsys, "keymap", "--pools", "augmented")
    assert len(out.strip().splitlines()) == 35


def test_keymap_out_file(tmp_path, capsys):
    target = tmp_path / "map.tsv"
    code, out, _ = run(capsys, "keymap", "--out", str(target))
    assert code == 0
    assert out == ""
    assert parse_keymap(target.read_text()).space_finger == 4


def test_encode_text(capsys):
    code, out, _ = run(capsys, "encode", "--text", "this has two parts")
    assert code == 0
    record = json.loads(out)
    assert record["events"] == fingers_for_text("this has two parts")
    assert record["ref"] == "this has two parts"
    assert record["sentence"] == 0


def test_encode_file(tmp_path, capsys):
    src = tmp_path / "text.txt"
    src.write_text("This  Has\ntwo parts\n")
    code, out, _ = run(capsys, "encode", "--in", str(src))
    assert code == 0
    records = [r for _, r in parse_records(out)]
    assert len(records) == 2
    assert records[0]["ref"] == "this has"
    assert records[1]["sentence"] == 1


def test_encode_requires_lowercase_compatible_text(capsys):
    code, _, err = run(capsys, "encode", "--text", "num3er")
    assert code == 3
    assert "error" in err


def test_corrupt_round_trip(tmp_path, capsys):
    events = tmp_path / "events.jsonl"
    code, out, _ = run(capsys, "encode", "--text", "this has two parts",
                       "--out", str(events))
    assert code == 0

    code, clean, _ = run(capsys, "corrupt", "--in", str(events),
                         "--accuracy", "1.0")
    assert code == 0
    assert json.loads(clean)["events"] == fingers_for_text("this has two parts")

    code, noisy1, _ = run(capsys, "corrupt", "--in", str(events),
                          "--accuracy", "0.5", "--seed", "3")
    code2, noisy2, _ = run(capsys, "corrupt", "--in", str(events),
                           "--accuracy", "0.5", "--seed", "3")
    assert (code, code2) == (0, 0)
    assert noisy1 == noisy2
    assert json.loads(noisy1)["events"] != json.loads(clean)["events"]


def test_pools_and_decode_chain(tmp_path, capsys):
    events = tmp_path / "events.jsonl"
    pools = tmp_path / "pools.jsonl"
    model = tmp_path / "model.lm"

    assert run(capsys, "encode", "--text", "this has two parts",
               "--out", str(events))[0] == 0
    code, out, _ = run(capsys, "pools", "--in", str(events),
                       "--fallback-k", "3", "--out", str(pools))
    assert code == 0
    grouped = group_pools(pools.read_text())
    assert "this" in grouped[0][0].words()

    assert run(capsys, "lm", "train", "--out", str(model))[0] == 0
    assert load_table(str(model)).order == 3

    code, out, _ = run(capsys, "decode", "--in", str(pools),
                       "--lm", str(model))
    assert code == 0
    records = [r for _, r in parse_records(out)]
    assert records[0]["text"] == "this has two parts"
    assert records[0]["sentence"] == 0


def test_decode_without_table_trains_bundled(tmp_path, capsys):
    events = tmp_path / "events.jsonl"
    pools = tmp_path / "pools.jsonl"
    assert run(capsys, "encode", "--text", "this has two parts",
               "--out", str(events))[0] == 0
    assert run(capsys, "pools", "--in", str(events), "--fallback-k", "3",
               "--out", str(pools))[0] == 0
    code, out, _ = run(capsys, "decode", "--in", str(pools))
    assert code == 0
    assert json.loads(out)["text"] == "this has two parts"


def test_decode_external_scorer(tmp_path, capsys):
    events = tmp_path / "events.jsonl"
    pools = tmp_path / "pools.jsonl"
    scorer = tmp_path / "scorer.py"
    scorer.write_text(textwrap.dedent("""\
        import json, sys
        for line in sys.stdin:
            req = json.loads(line)
            print(json.dumps({"id": req["id"],
                              "logprobs": [0.0] * len(req["candidates"])}),
                  flush=True)
    """))
    assert run(capsys, "encode", "--text", "two",
               "--out", str(events))[0] == 0
    assert run(capsys, "pools", "--in", str(events),
               "--out", str(pools))[0] == 0
    code, out, _ = run(capsys, "decode", "--in", str(pools),
                       "--scorer-cmd", f"{sys.executable} {scorer}")
    assert code == 0
    assert json.loads(out)["text"] == "two"


def test_decode_scorer_failure_exit_code(tmp_path, capsys):
    events = tmp_path / "events.jsonl"
    pools = tmp_path / "pools.jsonl"
    crash = tmp_path / "crash.py"
    crash.write_text("import sys\nsys.exit(3)\n")
    assert run(capsys, "encode", "--text", "two",
               "--out", str(events))[0] == 0
    assert run(capsys, "pools", "--in", str(events),
               "--out", str(pools))[0] == 0
    code, _, err = run(capsys, "decode", "--in", str(pools),
                       "--scorer-cmd", f"{sys.executable} {crash}")
    assert code == 4
    assert "error" in err


def test_lm_score(capsys, trigram):
    code, out, _ = run(capsys, "lm", "score", "--text", "this has two parts")
    assert code == 0
    assert float(out.strip()) == pytest.approx(
        trigram.sentence_logprob("this has two parts"))
    code, out_no_eos, _ = run(capsys, "lm", "score", "--text",
                              "this has two parts", "--no-eos")
    assert float(out_no_eos.strip()) == pytest.approx(
        trigram.sentence_logprob("this has two parts", include_eos=False))


def test_lm_score_with_table(tmp_path, capsys, trigram):
    model = tmp_path / "model.lm"
    assert run(capsys, "lm", "train", "--out", str(model))[0] == 0
    code, out, _ = run(capsys, "lm", "score", "--model", str(model),
                       "--text", "this has two parts")
    assert code == 0
    assert float(out.strip()) == pytest.approx(
        trigram.sentence_logprob("this has two parts"), abs=1e-6)


def test_eval_json(tmp_path, capsys):
    refs = tmp_path / "refs.txt"
    hyps = tmp_path / "hyps.txt"
    refs.write_text("this has two parts\n")
    hyps.write_text("this haw two parts\n")
    code, out, _ = run(capsys, "eval", "--refs", str(refs),
                       "--hyps", str(hyps), "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["word"]["rate"] == pytest.approx(0.25)
    assert doc["char"]["rate"] == pytest.approx(1 / 18)


def test_eval_table_and_mismatch(tmp_path, capsys):
    refs = tmp_path / "refs.txt"
    hyps = tmp_path / "hyps.txt"
    refs.write_text("a b\n")
    hyps.write_text("a b\n")
    code, out, _ = run(capsys, "eval", "--refs", str(refs), "--hyps", str(hyps))
    assert code == 0
    assert "word" in out
    hyps.write_text("a b\nextra line\n")
    code, _, err = run(capsys, "eval", "--refs", str(refs), "--hyps", str(hyps))
    assert code == 3


def test_eval_jsonl_hypotheses(tmp_path, capsys):
    refs = tmp_path / "refs.txt"
    refs.write_text("this has two parts\n")
    report = tmp_path / "report.jsonl"
    report.write_text(json.dumps({"sentence": 0, "text": "this haw two parts"})
                      + "\n")
    code, out, _ = run(capsys, "eval", "--refs", str(refs),
                       "--hyps", str(report), "--hyps-format", "jsonl",
                       "--json")
    assert code == 0
    assert json.loads(out)["word"]["rate"] == pytest.approx(0.25)


def test_signals_synth_analyze_segments(tmp_path, capsys):
    rec_dir = tmp_path / "rec"
    code, _, _ = run(capsys, "signals", "synth", "--keys", "aserhilp",
                     "--count", "24", "--spacing", "2.0", "--rate", "500",
                     "--channels", "4", "--seed", "5", "--out", str(rec_dir))
    assert code == 0
    assert (rec_dir / "manifest.json").exists()
    assert (rec_dir / "samples.raw").exists()
    assert (rec_dir / "keystrokes.csv").exists()

    code, out, _ = run(capsys, "signals", "analyze", "--rec", str(rec_dir),
                       "--json")
    assert code == 0
    stats = json.loads(out)
    assert set(int(k) for k in stats) == {0, 1, 2, 3, 6, 7, 8, 9}
    for entry in stats.values():
        assert entry["count"] == 3

    seg_dir = tmp_path / "segs"
    code, _, _ = run(capsys, "signals", "segments", "--rec", str(rec_dir),
                     "--out", str(seg_dir))
    assert code == 0
    assert (seg_dir / "index.json").exists()


def test_e2e_writes_report_and_is_deterministic(tmp_path, capsys):
    refs = tmp_path / "refs.txt"
    refs.write_text("this has two parts\nthe sky turns red\n")
    out1 = tmp_path / "r1.json"
    out2 = tmp_path / "r2.json"
    base = ["e2e", "--text", str(refs), "--accuracy", "0.9",
            "--fallback-k", "3", "--seed", "3", "--quiet"]
    assert main(base + ["--out", str(out1)]) == 0
    assert main(base + ["--out", str(out2), "--workers", "4"]) == 0
    capsys.readouterr()
    assert out1.read_bytes() == out2.read_bytes()
    report = json.loads(out1.read_text())
    assert report["metrics"]["word"]["rate"] is not None
    assert len(report["sentences"]) == 2


def test_e2e_prints_summary(capsys, tmp_path):
    refs = tmp_path / "refs.txt"
    refs.write_text("this has two parts\n")
    code, out, _ = run(capsys, "e2e", "--text", str(refs))
    assert code == 0
    assert "word" in out


def test_io_error_exit_code(capsys):
    code, _, err = run(capsys, "encode", "--in", "/no/such/file.txt")
    assert code == 2
    assert "error" in err


def test_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[decode]\nbeam = 4\n")
    code, _, err = run(capsys, "e2e", "--config", str(bad))
    assert code == 1
    assert "error" in err


def test_parse_error_exit_code(tmp_path, capsys):
    pools = tmp_path / "pools.jsonl"
    pools.write_text("this is not json\n")
    code, _, err = run(capsys, "decode", "--in", str(pools))
    assert code == 3
    assert "error" in err
