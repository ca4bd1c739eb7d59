import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import REALITY_PAYLOAD, fenced, transcript_from, uniform_bounds
from podpreview import (
    PreviewSpan,
    parse_llm_output,
    select_llm_preview,
    snap_start,
    span_from_record,
    span_to_record,
    trim_to_window,
)
from podpreview.errors import InvalidSpan


def test_snap_nearest_start():
    t = transcript_from([(0.0, 9.0), (10.0, 19.0), (20.0, 29.0)])
    result = snap_start(t, 9.4)
    assert result.index == 1
    assert result.drift_s == pytest.approx(0.6)
    assert not result.warning


def test_snap_exact_hit():
    t = transcript_from([(0.0, 9.0), (10.0, 19.0), (20.0, 29.0)])
    result = snap_start(t, 10.0)
    assert result.index == 1
    assert result.drift_s == 0.0


def test_snap_tie_goes_to_earlier_sentence():
    t = transcript_from([(0.0, 9.0), (10.0, 19.0)])
    assert snap_start(t, 5.0).index == 0


def test_snap_warning_above_two_seconds():
    t = transcript_from([(0.0, 9.0), (10.0, 19.0)])
    assert snap_start(t, 5.0).warning  # drift 5.0
    assert not snap_start(t, 8.5).warning  # drift 1.5


def test_trim_excludes_sentence_starting_at_window_edge():
    # sentence 4 starts at 61 >= 0 + 60, so the span stops at sentence 3
    t = transcript_from([(0, 19), (20, 49), (50, 58), (59, 61.4), (61, 70)])
    span = trim_to_window(t, 0, 60.0)
    assert span.first_sentence == 0
    assert span.last_sentence == 3
    assert span.start_s == 0.0
    assert span.end_s == 61.4


def test_trim_final_sentence_may_overhang():
    t = transcript_from([(0, 29), (30, 58), (59, 95)])
    span = trim_to_window(t, 0, 60.0)
    assert span.last_sentence == 2
    assert span.end_s == 95.0  # overhang allowed, start was inside the window


def test_trim_single_sentence():
    t = transcript_from([(3.0, 8.0)])
    span = trim_to_window(t, 0)
    assert (span.start_s, span.end_s) == (3.0, 8.0)
    assert span.first_sentence == span.last_sentence == 0


def test_trim_first_sentence_longer_than_window():
    t = transcript_from([(0.0, 80.0), (80.5, 90.0)])
    span = trim_to_window(t, 0, 60.0)
    assert span.last_sentence == 0
    assert span.end_s == 80.0


def test_trim_window_is_relative_to_first_sentence():
    t = transcript_from(uniform_bounds(30, length_s=6.0, gap_s=0.5))
    span = trim_to_window(t, 5, 60.0)
    first_start = t.sentences[5].start_s
    assert span.start_s == first_start
    assert t.sentences[span.last_sentence].start_s < first_start + 60.0
    if span.last_sentence + 1 < len(t):
        assert t.sentences[span.last_sentence + 1].start_s >= first_start + 60.0


def test_trim_validates_arguments():
    t = transcript_from([(0.0, 5.0)])
    with pytest.raises(IndexError):
        trim_to_window(t, 3)
    with pytest.raises(ValueError):
        trim_to_window(t, 0, 0.0)


def test_select_llm_preview_exact_snap():
    t = transcript_from([(0.0, 9.0), (120.5, 130.0), (131.0, 140.0)])
    choice = parse_llm_output(fenced(REALITY_PAYLOAD))  # start 120.5
    span = select_llm_preview(t, choice)
    assert span.start_s == 120.5
    assert span.snap_drift_s == 0.0
    assert span.system == "llm"
    assert span.metadata == choice.metadata


def test_select_llm_preview_records_drift():
    t = transcript_from([(0.0, 9.0), (10.0, 19.0), (20.0, 29.0)])
    choice = parse_llm_output(fenced(dict(REALITY_PAYLOAD, preview_start_s=11.2, preview_end_s=80.0)))
    span = select_llm_preview(t, choice)
    assert span.first_sentence == 1
    assert span.snap_drift_s == pytest.approx(1.2)


def test_select_llm_preview_ignores_requested_end():
    bounds = uniform_bounds(30, length_s=6.0, gap_s=0.5)
    t = transcript_from(bounds)
    near = parse_llm_output(fenced(dict(REALITY_PAYLOAD, preview_start_s=0.0, preview_end_s=10.0)))
    far = parse_llm_output(fenced(dict(REALITY_PAYLOAD, preview_start_s=0.0, preview_end_s=9999.0)))
    assert select_llm_preview(t, near).end_s == select_llm_preview(t, far).end_s


def test_span_validation():
    with pytest.raises(InvalidSpan):
        PreviewSpan(
            episode_id="e", start_s=10.0, end_s=5.0, first_sentence=0, last_sentence=0, system="llm"
        )
    with pytest.raises(InvalidSpan):
        PreviewSpan(
            episode_id="e", start_s=0.0, end_s=5.0, first_sentence=3, last_sentence=1, system="llm"
        )
    with pytest.raises(ValueError):
        PreviewSpan(
            episode_id="e", start_s=0.0, end_s=5.0, first_sentence=0, last_sentence=0, system="other"
        )


def test_record_round_trip():
    t = transcript_from([(0.0, 9.0), (120.5, 130.0)])
    span = select_llm_preview(t, parse_llm_output(fenced(REALITY_PAYLOAD)))
    record = span_to_record(span, created_at=123.0)
    assert record["created_at"] == 123.0
    assert record["metadata"]["preview_title"] == "Does Reality Testing Work?"
    again = span_from_record(record)
    assert again.start_s == span.start_s
    assert again.metadata == span.metadata


@st.composite
def layouts(draw):
    n = draw(st.integers(min_value=1, max_value=40))
    bounds = []
    t = 0.0
    for _ in range(n):
        t += draw(st.floats(min_value=0.0, max_value=2.0))
        dur = draw(st.floats(min_value=2.0, max_value=15.0))
        bounds.append((round(t, 2), round(t + dur, 2)))
        t += dur
    return transcript_from(bounds)


@given(layouts(), st.floats(min_value=-10.0, max_value=700.0), st.integers(0, 39))
@settings(deadline=None, max_examples=300)
def test_span_invariants(t, requested, first_raw):
    snap = snap_start(t, requested)
    assert 0 <= snap.index < len(t)
    # no other sentence start is strictly nearer
    best = min(abs(s.start_s - requested) for s in t.sentences)
    assert snap.drift_s == pytest.approx(best)

    first = first_raw % len(t)
    span = trim_to_window(t, first, 60.0)
    # alignment: span boundaries coincide with sentence boundaries
    assert span.start_s == t.sentences[span.first_sentence].start_s
    assert span.end_s == t.sentences[span.last_sentence].end_s
    # window rule: last starts inside, the next sentence (if any) does not
    assert t.sentences[span.last_sentence].start_s < span.start_s + 60.0
    if span.last_sentence + 1 < len(t):
        assert t.sentences[span.last_sentence + 1].start_s >= span.start_s + 60.0


def test_mean_duration_on_synthetic_corpus():
    rng = random.Random(7)
    durations = []
    for _ in range(300):
        bounds = []
        t = 0.0
        for _ in range(60):
            dur = rng.uniform(2.0, 15.0)
            bounds.append((round(t, 2), round(t + dur, 2)))
            t += dur + rng.uniform(0.05, 0.5)
        transcript = transcript_from(bounds)
        first = rng.randrange(0, 20)
        durations.append(trim_to_window(transcript, first, 60.0).duration_s)
    mean = sum(durations) / len(durations)
    assert 55.0 <= mean <= 70.0
