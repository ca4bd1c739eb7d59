"""Signal-fusion preview extraction (the pre-LLM production approach).

Pluggable scorers emit per-sentence topic/sentiment intensity spans and
detectors emit ad/music/non-speech spans. Fusion happens on a fixed time
grid: primary intensities are summed and smoothed into a selectivity series,
detector spans scale it down multiplicatively, peak windows are selected
greedily, and candidates are sentence-trimmed and ranked by a linear score.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Mapping, Protocol, Sequence

import numpy as np

from .errors import InvalidSignalKind, SpanOutOfBounds
from .selector import SYSTEM_BASELINE, PreviewSpan, trim_to_window
from .transcript import Episode, SentencizedTranscript, transcript_for

KIND_TOPIC_SENTIMENT = "topic_sentiment"
KIND_AD = "ad"
KIND_MUSIC = "music"
KIND_NON_SPEECH = "non_speech"
KIND_OTHER = "other"

SIGNAL_KINDS = (KIND_TOPIC_SENTIMENT, KIND_AD, KIND_MUSIC, KIND_NON_SPEECH, KIND_OTHER)
DETECTOR_KINDS = (KIND_AD, KIND_MUSIC, KIND_NON_SPEECH, KIND_OTHER)

DEFAULT_RESOLUTION_S = 1.0
DEFAULT_SMOOTHING_W = 5
DEFAULT_WINDOW_S = 60.0
DEFAULT_TOP_K = 5

_BOUNDS_TOL_S = 1e-9


# -- domain types ---------------------------------------------------------------


@dataclass(frozen=True)
class SignalSpan:
    """One scored time interval from a scorer or detector plug-in.

    topic_sentiment scores are unbounded intensities >= 0; every other kind
    carries a detector confidence in [0, 1].
    """

    kind: str
    start_s: float
    end_s: float
    score: float
    label: str | None = None

    def __post_init__(self):
        if self.kind not in SIGNAL_KINDS:
            raise InvalidSignalKind(f"unknown signal kind {self.kind!r}; expected one of {SIGNAL_KINDS}")
        if not self.start_s < self.end_s:
            raise ValueError(f"signal span start {self.start_s} must precede end {self.end_s}")
        if self.kind == KIND_TOPIC_SENTIMENT:
            if self.score < 0:
                raise ValueError(f"topic_sentiment intensity must be >= 0, got {self.score}")
        elif not 0.0 <= self.score <= 1.0:
            raise ValueError(f"{self.kind} confidence must be in [0, 1], got {self.score}")


@dataclass(frozen=True, eq=False)
class SelectivitySeries:
    """Per-cell selectivity on a uniform time grid covering the episode."""

    values: np.ndarray
    resolution_s: float = DEFAULT_RESOLUTION_S

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 1:
            raise ValueError(f"series values must be one-dimensional, got shape {values.shape}")
        if self.resolution_s <= 0:
            raise ValueError(f"resolution_s must be positive, got {self.resolution_s}")
        if len(values) and (not np.all(np.isfinite(values)) or values.min() < 0):
            raise ValueError("series values must be finite and non-negative")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def duration_s(self) -> float:
        return len(self.values) * self.resolution_s


@dataclass(frozen=True)
class AdjustmentTable:
    """Floor multipliers applied where detector spans land (1.0 = no effect)."""

    ad: float = 0.0
    music: float = 0.3
    non_speech: float = 0.2
    other: float = 1.0

    def __post_init__(self):
        for kind in DETECTOR_KINDS:
            value = getattr(self, kind)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"adjustment multiplier for {kind} must be in [0, 1], got {value}")

    def multiplier_for(self, kind: str) -> float:
        if kind not in DETECTOR_KINDS:
            raise InvalidSignalKind(f"no adjustment multiplier for kind {kind!r}")
        return getattr(self, kind)


@dataclass(frozen=True)
class PrimaryAggregate:
    """Smoothed intensity series plus the label totals behind it."""

    series: SelectivitySeries
    dominant_topic: str | None
    topic_totals: Mapping[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class CandidateWindow:
    """A fixed-length grid window and its selectivity mass."""

    start_s: float
    end_s: float
    total: float
    covers_episode: bool = False  # set when the episode was shorter than one window


@dataclass(frozen=True)
class RankWeights:
    """Linear ranking: w1*mean_selectivity - w2*ad_overlap - w3*position."""

    w1: float = 1.0
    w2: float = 2.0
    w3: float = 0.1

    def __post_init__(self):
        if min(self.w1, self.w2, self.w3) < 0:
            raise ValueError("ranking weights must be non-negative")


@dataclass(frozen=True)
class CandidateFeatures:
    mean_selectivity: float
    ad_overlap_frac: float
    position_frac: float


@dataclass(frozen=True)
class RankedCandidate:
    span: PreviewSpan
    features: CandidateFeatures
    rank_score: float


@dataclass(frozen=True)
class BaselineConfig:
    resolution_s: float = DEFAULT_RESOLUTION_S
    smoothing_w: int = DEFAULT_SMOOTHING_W
    window_s: float = DEFAULT_WINDOW_S
    top_k: int = DEFAULT_TOP_K
    table: AdjustmentTable = field(default_factory=AdjustmentTable)
    weights: RankWeights = field(default_factory=RankWeights)


class SentimentScorer(Protocol):
    """Primary-signal plug-in: topic/sentiment intensity spans."""

    def score(self, episode: Episode) -> list[SignalSpan]:
        ...


class SignalDetector(Protocol):
    """Secondary-signal plug-in: ad/music/non-speech spans."""

    def detect(self, episode: Episode) -> list[SignalSpan]:
        ...


# -- fusion math ----------------------------------------------------------------


def empty_series(duration_s: float, resolution_s: float = DEFAULT_RESOLUTION_S) -> SelectivitySeries:
    """All-zero series whose grid covers [0, duration_s]."""
    if duration_s <= 0:
        raise ValueError(f"duration_s must be positive, got {duration_s}")
    n_cells = math.ceil(duration_s / resolution_s)
    return SelectivitySeries(values=np.zeros(n_cells), resolution_s=resolution_s)


def _covered_cells(series: SelectivitySeries, span: SignalSpan) -> tuple[int, int]:
    """Half-open cell range [lo, hi) covered by a span; bounds-checked."""
    res = series.resolution_s
    if span.start_s < -_BOUNDS_TOL_S or span.end_s > series.duration_s + _BOUNDS_TOL_S:
        raise SpanOutOfBounds(
            f"span [{span.start_s}, {span.end_s}] exceeds episode grid [0, {series.duration_s}]"
        )
    lo = max(0, math.floor(span.start_s / res))
    hi = min(len(series), math.ceil(span.end_s / res))
    return lo, hi


def _smooth(values: np.ndarray, width: int) -> np.ndarray:
    """Centered moving average; edge windows are truncated, not padded."""
    if width <= 1 or len(values) == 0:
        return values.copy()
    n = len(values)
    left = (width - 1) // 2
    right = width // 2
    csum = np.concatenate(([0.0], np.cumsum(values)))
    idx = np.arange(n)
    lo = np.maximum(0, idx - left)
    hi = np.minimum(n, idx + right + 1)
    return (csum[hi] - csum[lo]) / (hi - lo)


def aggregate_primary(
    spans: Sequence[SignalSpan],
    grid: SelectivitySeries,
    smoothing_w: int = DEFAULT_SMOOTHING_W,
) -> PrimaryAggregate:
    """Sum topic/sentiment intensities onto the grid, then smooth.

    Only the grid's shape (length, resolution) is used. The dominant topic is
    the label with the greatest total intensity.
    """
    if smoothing_w < 1:
        raise ValueError(f"smoothing width must be >= 1, got {smoothing_w}")
    values = np.zeros(len(grid))
    topic_totals: dict[str, float] = {}
    for span in spans:
        if span.kind != KIND_TOPIC_SENTIMENT:
            raise InvalidSignalKind(f"primary aggregation expects topic_sentiment spans, got {span.kind!r}")
        lo, hi = _covered_cells(grid, span)
        values[lo:hi] += span.score
        if span.label is not None:
            topic_totals[span.label] = topic_totals.get(span.label, 0.0) + span.score
    dominant = None
    if topic_totals:
        dominant = max(sorted(topic_totals), key=lambda label: topic_totals[label])
    series = SelectivitySeries(values=_smooth(values, smoothing_w), resolution_s=grid.resolution_s)
    return PrimaryAggregate(series=series, dominant_topic=dominant, topic_totals=topic_totals)


def apply_secondary(
    series: SelectivitySeries,
    spans: Sequence[SignalSpan],
    table: AdjustmentTable | None = None,
) -> SelectivitySeries:
    """Scale the series down where detector spans land.

    Each covering span contributes the multiplier 1 - confidence*(1 - table[kind]),
    so confidence 0 is the identity and confidence 1 applies the table value.
    """
    table = table if table is not None else AdjustmentTable()
    multipliers = np.ones(len(series))
    for span in spans:
        if span.kind == KIND_TOPIC_SENTIMENT:
            raise InvalidSignalKind("secondary adjustment expects detector spans, not topic_sentiment")
        effective = 1.0 - span.score * (1.0 - table.multiplier_for(span.kind))
        lo, hi = _covered_cells(series, span)
        multipliers[lo:hi] *= effective
    return SelectivitySeries(values=series.values * multipliers, resolution_s=series.resolution_s)


def select_peaks(
    series: SelectivitySeries,
    window_s: float = DEFAULT_WINDOW_S,
    k: int = DEFAULT_TOP_K,
) -> list[CandidateWindow]:
    """Greedy non-overlapping top-k windows by windowed sum.

    Ties break to the earlier start; windows come back in pick order
    (descending sum). An episode shorter than one window yields a single
    window covering the whole episode, flagged covers_episode.
    """
    if window_s <= 0:
        raise ValueError(f"window_s must be positive, got {window_s}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    res = series.resolution_s
    n = len(series)
    window_cells = max(1, int(round(window_s / res)))
    if n < window_cells:
        return [
            CandidateWindow(start_s=0.0, end_s=n * res, total=float(series.values.sum()), covers_episode=True)
        ]
    csum = np.concatenate(([0.0], np.cumsum(series.values)))
    sums = csum[window_cells:] - csum[:-window_cells]  # sums[i] = window starting at cell i
    available = np.ones(len(sums), dtype=bool)
    picks: list[CandidateWindow] = []
    for _ in range(k):
        if not available.any():
            break
        masked = np.where(available, sums, -np.inf)
        best = int(np.argmax(masked))  # first occurrence wins ties
        picks.append(
            CandidateWindow(
                start_s=best * res,
                end_s=(best + window_cells) * res,
                total=float(sums[best]),
            )
        )
        lo = max(0, best - window_cells + 1)
        hi = min(len(sums), best + window_cells)
        available[lo:hi] = False
    return picks


def _snap_window_start(t: SentencizedTranscript, window: CandidateWindow) -> int:
    """Nearest sentence start to the window start, excluding starts past its end."""
    best_index = None
    best_dist = None
    for i, sentence in enumerate(t.sentences):
        if sentence.start_s >= window.end_s:
            break
        dist = abs(sentence.start_s - window.start_s)
        if best_dist is None or dist < best_dist:
            best_index, best_dist = i, dist
    return 0 if best_index is None else best_index


def _ad_overlap_frac(span: PreviewSpan, detector_spans: Sequence[SignalSpan]) -> float:
    intervals = sorted(
        (max(s.start_s, span.start_s), min(s.end_s, span.end_s))
        for s in detector_spans
        if s.kind == KIND_AD and s.end_s > span.start_s and s.start_s < span.end_s
    )
    covered = 0.0
    cursor = span.start_s
    for lo, hi in intervals:
        lo = max(lo, cursor)
        if hi > lo:
            covered += hi - lo
            cursor = hi
    return covered / span.duration_s


def _mean_selectivity(series: SelectivitySeries, span: PreviewSpan) -> float:
    res = series.resolution_s
    lo = max(0, math.floor(span.start_s / res))
    hi = min(len(series), math.ceil(span.end_s / res))
    if hi <= lo:
        return 0.0
    return float(series.values[lo:hi].mean())


def trim_and_rank(
    t: SentencizedTranscript,
    windows: Sequence[CandidateWindow],
    series: SelectivitySeries,
    detector_spans: Sequence[SignalSpan] = (),
    weights: RankWeights | None = None,
    window_s: float = DEFAULT_WINDOW_S,
) -> list[RankedCandidate]:
    """Sentence-align each candidate window, score it, and sort.

    Window starts snap to the nearest sentence start at or before the window
    end; spans are then trimmed to the one-minute rule. Ranking is the linear
    score over (mean selectivity, ad overlap, position); ties break to the
    earlier start.
    """
    weights = weights if weights is not None else RankWeights()
    episode_len_s = max(series.duration_s, t.duration_s)
    candidates: list[RankedCandidate] = []
    seen_firsts: set[int] = set()
    for window in windows:
        first = _snap_window_start(t, window)
        if first in seen_firsts:
            continue
        seen_firsts.add(first)
        span = trim_to_window(t, first, window_s, system=SYSTEM_BASELINE)
        features = CandidateFeatures(
            mean_selectivity=_mean_selectivity(series, span),
            ad_overlap_frac=_ad_overlap_frac(span, detector_spans),
            position_frac=min(1.0, span.start_s / episode_len_s) if episode_len_s > 0 else 0.0,
        )
        rank_score = (
            weights.w1 * features.mean_selectivity
            - weights.w2 * features.ad_overlap_frac
            - weights.w3 * features.position_frac
        )
        candidates.append(RankedCandidate(span=span, features=features, rank_score=rank_score))
    candidates.sort(key=lambda c: (-c.rank_score, c.span.start_s, c.span.first_sentence))
    return candidates


def extract_baseline_preview(
    episode: Episode,
    scorers: Sequence[SentimentScorer],
    detectors: Sequence[SignalDetector],
    config: BaselineConfig | None = None,
) -> PreviewSpan:
    """Full fusion pipeline for one episode; always returns a span.

    When the adjusted series carries no signal at all (no scorer output, or
    everything suppressed by detectors), the fallback is the span trimmed
    from the first sentence, flagged degenerate.
    """
    config = config if config is not None else BaselineConfig()
    t = transcript_for(episode)
    grid = empty_series(t.duration_s, config.resolution_s)
    primary = [span for scorer in scorers for span in scorer.score(episode)]
    secondary = [span for detector in detectors for span in detector.detect(episode)]
    aggregate = aggregate_primary(primary, grid, config.smoothing_w)
    adjusted = apply_secondary(aggregate.series, secondary, config.table)

    def fallback() -> PreviewSpan:
        return trim_to_window(t, 0, config.window_s, system=SYSTEM_BASELINE, degenerate=True)

    if not len(adjusted) or float(adjusted.values.max(initial=0.0)) <= 0.0:
        return fallback()
    windows = select_peaks(adjusted, config.window_s, config.top_k)
    ranked = trim_and_rank(t, windows, adjusted, secondary, config.weights, config.window_s)
    if not ranked:
        return fallback()
    return ranked[0].span


# -- reference plug-ins ------------------------------------------------------------


DEFAULT_AD_CUES = (
    "sponsored by",
    "brought to you by",
    "use code",
    "promo code",
    "discount code",
    "visit our sponsor",
)

# Small built-in engagement lexicon; real deployments supply their own.
DEFAULT_LEXICON = {
    "amazing": 2.0,
    "incredible": 2.0,
    "fascinating": 1.8,
    "surprising": 1.5,
    "shocking": 1.5,
    "secret": 1.2,
    "discover": 1.2,
    "breakthrough": 1.5,
    "wild": 1.0,
    "unbelievable": 1.8,
    "love": 1.0,
    "hate": 1.0,
    "best": 1.0,
    "worst": 1.0,
    "crazy": 1.2,
    "exciting": 1.5,
    "powerful": 1.2,
    "remarkable": 1.5,
    "stunning": 1.5,
    "wow": 1.2,
}

_WORD_RE = re.compile(r"[a-z']+")


class LexiconScorer:
    """Per-sentence intensity from a word→weight lexicon, with topic labels.

    A sentence's intensity is the sum of lexicon weights of its words; its
    label is the topic whose keyword set matches the most words (None when
    nothing matches). Sentences with zero intensity emit nothing.
    """

    def __init__(self, lexicon: Mapping[str, float], topics: Mapping[str, Sequence[str]] | None = None):
        self.lexicon = {word.lower(): float(weight) for word, weight in lexicon.items()}
        self.topics = {
            name: frozenset(word.lower() for word in words) for name, words in (topics or {}).items()
        }

    def score(self, episode: Episode) -> list[SignalSpan]:
        t = transcript_for(episode)
        spans = []
        for sentence in t.sentences:
            words = _WORD_RE.findall(sentence.text.lower())
            intensity = sum(self.lexicon.get(word, 0.0) for word in words)
            if intensity <= 0:
                continue
            label = None
            best_hits = 0
            for name in sorted(self.topics):
                hits = sum(1 for word in words if word in self.topics[name])
                if hits > best_hits:
                    label, best_hits = name, hits
            spans.append(
                SignalSpan(
                    kind=KIND_TOPIC_SENTIMENT,
                    start_s=sentence.start_s,
                    end_s=sentence.end_s,
                    score=intensity,
                    label=label,
                )
            )
        return spans


class KeywordAdDetector:
    """Flags sentences containing ad cues ("sponsored by", "use code", ...)."""

    def __init__(self, cues: Sequence[str] = DEFAULT_AD_CUES, confidence: float = 1.0):
        self.cues = tuple(cue.lower() for cue in cues)
        if not 0.0 <= confidence <= 1.0:
            raise ValueError(f"confidence must be in [0, 1], got {confidence}")
        self.confidence = confidence

    def detect(self, episode: Episode) -> list[SignalSpan]:
        t = transcript_for(episode)
        return [
            SignalSpan(kind=KIND_AD, start_s=s.start_s, end_s=s.end_s, score=self.confidence)
            for s in t.sentences
            if any(cue in s.text.lower() for cue in self.cues)
        ]


def default_scorers() -> list[SentimentScorer]:
    return [LexiconScorer(DEFAULT_LEXICON)]


def default_detectors() -> list[SignalDetector]:
    return [KeywordAdDetector()]
