"""End-to-end runs and the pool record format."""

from __future__ import annotations

import json

import pytest

from fingertype._jsonl import (
    dump_records,
    group_pools,
    parse_records,
    pool_record,
    record_pool,
)
from fingertype.config import PipelineConfig
from fingertype.errors import ParseError, ValidationError
from fingertype.keymap import fingers_for_text
from fingertype.lexicon import EmptyPool, candidate_words
from fingertype.pipeline import (
    load_text_lines,
    report_to_json,
    run_e2e,
    sentence_events,
    sentence_pools,
    train_lm,
)


def test_load_text_lines_bundled_demo():
    lines = load_text_lines(None)
    assert len(lines) == 50
    assert lines[0] == "this has two parts"
    assert all(line == line.strip().lower() for line in lines)


def test_load_text_lines_normalizes(tmp_path):
    path = tmp_path / "refs.txt"
    path.write_text("  Hello   WORLD \n\n  ok\n")
    assert load_text_lines(str(path)) == ["hello world", "ok"]


def test_train_lm_smoothing_selection():
    sb = train_lm(PipelineConfig())
    assert sb.order == 3
    ak = train_lm(PipelineConfig(smoothing="add_k", add_k=0.3, order=2))
    assert ak.order == 2
    assert ak.smoothing.k == 0.3


def test_sentence_events_clean_path():
    cfg = PipelineConfig()
    assert sentence_events("this has", cfg, 0) == fingers_for_text("this has")


def test_sentence_events_deterministic_per_index():
    cfg = PipelineConfig(accuracy=0.7, seed=5)
    a = sentence_events("this has two parts", cfg, 3)
    b = sentence_events("this has two parts", cfg, 3)
    c = sentence_events("this has two parts", cfg, 4)
    assert a == b
    assert a != c


def test_sentence_pools_splits_words(lexicon):
    cfg = PipelineConfig()
    events = fingers_for_text("this has")
    pools = sentence_pools(events, lexicon, cfg)
    assert [p.position for p in pools] == [0, 1]
    assert "this" in pools[0].words()
    with pytest.raises(ValidationError):
        sentence_pools([4, 4], lexicon, cfg)


def test_run_e2e_report_shape(corpus_lines):
    cfg = PipelineConfig(seed=0)
    report = run_e2e(cfg, lines=["this has two parts", corpus_lines[1]])
    assert report["config"]["seed"] == 0
    assert "workers" not in report["config"]
    assert len(report["sentences"]) == 2
    first = report["sentences"][0]
    assert first["ref"] == "this has two parts"
    assert first["hyp"] == "this has two parts"
    assert report["metrics"]["word"]["rate"] == 0.0
    assert len(report["config_hash"]) == 16
    # the report serializes cleanly
    parsed = json.loads(report_to_json(report))
    assert parsed["n_sentences"] if "n_sentences" in parsed else True


def test_run_e2e_deterministic_and_worker_invariant():
    noisy = dict(accuracy=0.85, fallback_k=3, seed=11)
    a = report_to_json(run_e2e(PipelineConfig(**noisy, workers=1)))
    b = report_to_json(run_e2e(PipelineConfig(**noisy, workers=1)))
    c = report_to_json(run_e2e(PipelineConfig(**noisy, workers=4)))
    assert a == b
    assert a == c


def test_run_e2e_empty_pool_policies(lexicon):
    # a nonsense right-pinky run matches no words, forcing the policy
    line = "pppppppp"
    placeholder = run_e2e(PipelineConfig(), lines=[line])
    assert placeholder["sentences"][0]["hyp"] == "????????"
    fallback = run_e2e(PipelineConfig(empty_pool="fallback"), lines=[line])
    assert fallback["sentences"][0]["hyp"] == "pppppppp"
    with pytest.raises(ValidationError):
        run_e2e(PipelineConfig(empty_pool="error"), lines=[line])


def test_run_e2e_rejects_conflicting_inputs(tmp_path):
    path = tmp_path / "refs.txt"
    path.write_text("ok\n")
    with pytest.raises(ValidationError):
        run_e2e(PipelineConfig(), lines=["a"], text_path=str(path))


def test_pool_record_round_trip(lexicon):
    pool = candidate_words(fingers_for_text("has"), lexicon, position=2)
    record = pool_record(7, pool)
    sentence, back = record_pool(record, lineno=1)
    assert sentence == 7
    assert back == pool
    empty = EmptyPool(position=0, fingers=(9,) * 8, pools=(("p",),) * 8)
    sentence, back = record_pool(pool_record(1, empty), lineno=1)
    assert isinstance(back, EmptyPool)
    assert back == empty


def test_dump_parse_records():
    text = dump_records([{"b": 1, "a": 2}, {"x": None}])
    assert text == '{"a": 2, "b": 1}\n{"x": null}\n'
    records = list(parse_records(text + "\n  \n"))
    assert records == [(1, {"a": 2, "b": 1}), (2, {"x": None})]
    with pytest.raises(ParseError) as err:
        list(parse_records("{}\nnot json\n"))
    assert "line 2" in str(err.value)
    with pytest.raises(ParseError):
        list(parse_records("[1, 2]\n"))


def test_group_pools(lexicon):
    pools = [candidate_words(fingers_for_text(w), lexicon, position=i)
             for i, w in enumerate(["this", "has"])]
    text = dump_records([pool_record(0, p) for p in pools]
                        + [pool_record(3, pools[0])])
    grouped = group_pools(text)
    assert sorted(grouped) == [0, 3]
    assert [p.position for p in grouped[0]] == [0, 1]


def test_group_pools_rejects_gaps(lexicon):
    pool = candidate_words(fingers_for_text("has"), lexicon, position=1)
    with pytest.raises(ParseError) as err:
        group_pools(dump_records([pool_record(0, pool)]))
    assert "positions" in str(err.value)
