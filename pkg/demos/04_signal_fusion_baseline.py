"""
Signal fusion: lexicon scores, ad suppression, peak windows
===========================================================

"""

# The model-free baseline fuses two families of signal onto a one-second
# grid: primary scorers emit topic/sentiment intensity, secondary detectors
# (ads, music, non-speech) scale it back down. Peak windows over the fused
# series become preview candidates.

from podpreview import (
    AdjustmentTable,
    Episode,
    KeywordAdDetector,
    LexiconScorer,
    Sentence,
    aggregate_primary,
    apply_secondary,
    empty_series,
    extract_baseline_preview,
    select_peaks,
    trim_and_rank,
    transcript_for,
)

texts = [
    "Welcome back, settle in.",
    "First, this incredible show is sponsored by MattressCo, use code SLEEP.",
    "Thanks to them for supporting the show.",
    "Now, the story: a breakthrough nobody saw coming.",
    "It was a stunning, remarkable result.",
    "The team was thrilled, an incredible moment for the field.",
    "Of course, skeptics pushed back hard.",
    "The debate turned fascinating once the data landed.",
    "We will be right back after this.",
    "That is all for today, thanks for listening.",
]
sentences = tuple(
    Sentence(index=i, text=text, start_s=12.0 * i, end_s=12.0 * i + 10.0) for i, text in enumerate(texts)
)
episode = Episode(episode_id="fusion-07", title="A Breakthrough", language_tags=("en",), sentences=sentences)

scorer = LexiconScorer(
    {"breakthrough": 2.0, "stunning": 1.5, "remarkable": 1.5, "thrilled": 1.0, "incredible": 1.5, "fascinating": 1.0},
    topics={"discovery": ["breakthrough", "result", "data"]},
)
detector = KeywordAdDetector()

primary_spans = scorer.score(episode)
ad_spans = detector.detect(episode)
print(f"{len(primary_spans)} scored sentences, {len(ad_spans)} ad sentences")

# Intensities land on the grid and get a width-5 moving average, so isolated
# spikes bleed into their neighborhood.
grid = empty_series(duration_s=sentences[-1].end_s)
aggregate = aggregate_primary(primary_spans, grid)
print(f"dominant topic: {aggregate.dominant_topic}  totals: {dict(aggregate.topic_totals)}")

adjusted = apply_secondary(aggregate.series, ad_spans, AdjustmentTable())

def sketch(series, width=60):
    peak = series.values.max() or 1.0
    return "".join(" .:-=+*#"[min(7, int(7 * v / peak))] for v in series.values[:width])

print("primary  |" + sketch(aggregate.series) + "|")
print("adjusted |" + sketch(adjusted) + "|")

# Candidate windows are greedy non-overlapping maxima of the windowed sum.
windows = select_peaks(adjusted, window_s=36.0, k=3)
for w in windows:
    print(f"window [{w.start_s:6.1f}, {w.end_s:6.1f}]  mass {w.total:7.3f}")

# Ranking trims each window to sentence boundaries and scores it on mean
# selectivity, ad overlap, and how late it starts.
ranked = trim_and_rank(transcript_for(episode), windows, adjusted, ad_spans, window_s=36.0)
for candidate in ranked:
    span = candidate.span
    print(
        f"rank {candidate.rank_score:7.4f}  sentences {span.first_sentence}..{span.last_sentence}"
        f"  [{span.start_s:.1f}, {span.end_s:.1f}]"
    )

# Or in one call, episode to span:
best = extract_baseline_preview(episode, [scorer], [detector])
print(f"\nbaseline preview: [{best.start_s}, {best.end_s}] sentences {best.first_sentence}..{best.last_sentence}")
