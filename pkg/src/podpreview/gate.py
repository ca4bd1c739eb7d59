"""English-eligibility gating over episode language metadata.

Both extraction systems only process English episodes. The LLM path trusts
the (noisy) metadata tags alone; the legacy path may combine metadata with a
pluggable spoken-language detector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

from .errors import DetectorFailure
from .transcript import Episode

ENGLISH = "en"
DEFAULT_DETECTOR_THRESHOLD = 0.8

SOURCE_METADATA_ONLY = "metadata_only"
SOURCE_METADATA_PLUS_DETECTOR = "metadata_plus_detector"


@dataclass(frozen=True)
class LanguageDecision:
    eligible: bool
    source: str  # SOURCE_METADATA_ONLY | SOURCE_METADATA_PLUS_DETECTOR
    matched_tag: str | None = None


class LanguageDetector(Protocol):
    """Plug-in contract for spoken-language identification."""

    def detect(self, episode: Episode) -> tuple[str, float]:
        """Return (language code, confidence in [0, 1])."""
        ...


def normalize_tag(tag: str) -> str:
    """Lowercase a BCP-47-style tag and truncate at the first '-'."""
    return tag.strip().lower().split("-", 1)[0]


def filter_metadata(episode: Episode) -> LanguageDecision:
    """Decide eligibility from metadata tags alone.

    Eligible iff any language tag normalizes to "en"; the first matching raw
    tag is reported.
    """
    for tag in episode.language_tags:
        if normalize_tag(tag) == ENGLISH:
            return LanguageDecision(eligible=True, source=SOURCE_METADATA_ONLY, matched_tag=tag)
    return LanguageDecision(eligible=False, source=SOURCE_METADATA_ONLY, matched_tag=None)


def filter_combined(
    episode: Episode,
    detector: LanguageDetector,
    threshold: float = DEFAULT_DETECTOR_THRESHOLD,
) -> LanguageDecision:
    """Combine metadata with a detector: metadata "en" OR detector says "en"
    with confidence at or above ``threshold``.

    The detector is consulted at most once, and not at all when metadata
    already matches. Detector exceptions and out-of-range confidences are
    wrapped in :class:`DetectorFailure` carrying the episode id.
    """
    meta = filter_metadata(episode)
    if meta.eligible:
        return LanguageDecision(
            eligible=True, source=SOURCE_METADATA_PLUS_DETECTOR, matched_tag=meta.matched_tag
        )
    try:
        code, confidence = detector.detect(episode)
    except Exception as exc:
        raise DetectorFailure(episode.episode_id, exc) from exc
    if not 0.0 <= confidence <= 1.0:
        raise DetectorFailure(episode.episode_id, f"confidence {confidence} outside [0, 1]")
    eligible = normalize_tag(code) == ENGLISH and confidence >= threshold
    return LanguageDecision(
        eligible=eligible, source=SOURCE_METADATA_PLUS_DETECTOR, matched_tag=None
    )
