"""Turn raw preview offsets into sentence-aligned spans.

Whatever chose the offsets (an LLM or the signal-fusion baseline), the final
span must start at a sentence start and end at a sentence end, and it must be
trimmed to the last sentence that starts inside the duration window. The
requested end timestamp is advisory; the trim rule decides the real end.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass

from .errors import InvalidSpan
from .llmbridge import PreviewChoice, PreviewMetadata
from .transcript import SentencizedTranscript

logger = logging.getLogger(__name__)

DEFAULT_WINDOW_S = 60.0
SNAP_WARNING_DRIFT_S = 2.0

SYSTEM_LLM = "llm"
SYSTEM_BASELINE = "baseline"
_SYSTEMS = (SYSTEM_LLM, SYSTEM_BASELINE)


@dataclass(frozen=True)
class SnapResult:
    """Outcome of snapping a requested start to a sentence start."""

    index: int
    drift_s: float
    warning: bool


@dataclass(frozen=True)
class PreviewSpan:
    """A final sentence-aligned preview with provenance.

    start_s/end_s coincide with the first/last sentence boundaries of the
    covered range. degenerate marks fallback spans produced when signal
    fusion had nothing to say.
    """

    episode_id: str
    start_s: float
    end_s: float
    first_sentence: int
    last_sentence: int
    system: str
    snap_drift_s: float = 0.0
    metadata: PreviewMetadata | None = None
    drift_warning: bool = False
    degenerate: bool = False

    def __post_init__(self):
        if self.system not in _SYSTEMS:
            raise ValueError(f"system must be one of {_SYSTEMS}, got {self.system!r}")
        if self.first_sentence < 0 or self.first_sentence > self.last_sentence:
            raise InvalidSpan(
                f"need 0 <= first_sentence <= last_sentence, got "
                f"{self.first_sentence}..{self.last_sentence}"
            )
        if not self.start_s < self.end_s:
            raise InvalidSpan(f"span start {self.start_s} must precede end {self.end_s}")

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


def snap_start(t: SentencizedTranscript, requested_start_s: float) -> SnapResult:
    """Find the sentence whose start is nearest to the requested time.

    Ties go to the earlier sentence. Total: any finite request maps to some
    sentence; drifts above 2 s only set the warning flag.
    """
    best_index = 0
    best_dist = abs(t.sentences[0].start_s - requested_start_s)
    for i, sentence in enumerate(t.sentences[1:], start=1):
        dist = abs(sentence.start_s - requested_start_s)
        if dist < best_dist:
            best_index, best_dist = i, dist
    warning = best_dist > SNAP_WARNING_DRIFT_S
    if warning:
        logger.warning(
            "episode %s: requested start %.2fs snapped to sentence %d with %.2fs drift",
            t.episode_id, requested_start_s, best_index, best_dist,
        )
    return SnapResult(index=best_index, drift_s=best_dist, warning=warning)


def trim_to_window(
    t: SentencizedTranscript,
    first: int,
    window_s: float = DEFAULT_WINDOW_S,
    *,
    system: str = SYSTEM_LLM,
    snap_drift_s: float = 0.0,
    metadata: PreviewMetadata | None = None,
    drift_warning: bool = False,
    degenerate: bool = False,
) -> PreviewSpan:
    """Extend a span from sentence `first` to the last sentence starting in-window.

    last_sentence is the greatest j >= first with
    sentence[j].start_s < sentence[first].start_s + window_s, so the span may
    overrun the window only by the final sentence's overhang.
    """
    if not 0 <= first < len(t.sentences):
        raise IndexError(f"first sentence {first} out of range 0..{len(t.sentences) - 1}")
    if window_s <= 0:
        raise ValueError(f"window_s must be positive, got {window_s}")
    limit = t.sentences[first].start_s + window_s
    last = first
    for j in range(first + 1, len(t.sentences)):
        if t.sentences[j].start_s < limit:
            last = j
        else:
            break
    return PreviewSpan(
        episode_id=t.episode_id,
        start_s=t.sentences[first].start_s,
        end_s=t.sentences[last].end_s,
        first_sentence=first,
        last_sentence=last,
        system=system,
        snap_drift_s=snap_drift_s,
        metadata=metadata,
        drift_warning=drift_warning,
        degenerate=degenerate,
    )


def select_llm_preview(
    t: SentencizedTranscript,
    choice: PreviewChoice,
    window_s: float = DEFAULT_WINDOW_S,
) -> PreviewSpan:
    """Snap the model's start to a sentence, then apply the trim rule.

    The model's end timestamp is ignored on purpose; the window rule alone
    decides where the preview stops.
    """
    snap = snap_start(t, choice.preview_start_s)
    return trim_to_window(
        t,
        snap.index,
        window_s,
        system=SYSTEM_LLM,
        snap_drift_s=snap.drift_s,
        metadata=choice.metadata,
        drift_warning=snap.warning,
    )


def span_to_record(span: PreviewSpan, created_at: float | None = None) -> dict:
    """Serialize a span to the persisted preview-record shape."""
    return {
        "episode_id": span.episode_id,
        "system": span.system,
        "start_s": span.start_s,
        "end_s": span.end_s,
        "first_sentence": span.first_sentence,
        "last_sentence": span.last_sentence,
        "snap_drift_s": span.snap_drift_s,
        "metadata": span.metadata.to_dict() if span.metadata is not None else None,
        "created_at": time.time() if created_at is None else created_at,
    }


def span_from_record(record: dict) -> PreviewSpan:
    """Rebuild a span from a persisted preview record (extra keys ignored)."""
    metadata = record.get("metadata")
    return PreviewSpan(
        episode_id=record["episode_id"],
        start_s=float(record["start_s"]),
        end_s=float(record["end_s"]),
        first_sentence=int(record["first_sentence"]),
        last_sentence=int(record["last_sentence"]),
        system=record["system"],
        snap_drift_s=float(record.get("snap_drift_s", 0.0)),
        metadata=PreviewMetadata(
            episode_theme=metadata.get("episode_theme", ""),
            preview_title=metadata["preview_title"],
            preview_explanation=metadata.get("preview_explanation", ""),
            hashtags=tuple(metadata.get("hashtags", ())),
        )
        if metadata
        else None,
        drift_warning=bool(record.get("drift_warning", False)),
        degenerate=bool(record.get("degenerate", False)),
    )
