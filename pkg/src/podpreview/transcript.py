"""Word-timed transcript ingestion, sentencization, and the timestamped line format.

The timestamped text format is one sentence per line::

    [01.00 - 02.50] Here is a sentence.

Timestamps are seconds with two decimals, integer part zero-padded to at
least two digits. This rendering is the canonical LLM input and must stay
bit-exact, so all formatting goes through :func:`format_timestamp`.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

from .errors import (
    EmptyTranscript,
    InvalidSentence,
    InvalidWord,
    MalformedLine,
    NonMonotonicTimestamps,
)

#: Words that end in '.' but never terminate a sentence (compared lowercased).
DEFAULT_ABBREVIATIONS = frozenset(
    {"dr.", "mr.", "mrs.", "ms.", "st.", "vs.", "etc.", "u.s.", "e.g.", "i.e."}
)

#: Tolerated backwards jitter between consecutive timestamps, in seconds.
TIMESTAMP_JITTER_S = 0.5

_SENTENCE_TERMINALS = (".", "!", "?")
_LINE_RE = re.compile(r"^\[(\d{2,}\.\d{2}) - (\d{2,}\.\d{2})\] (.+)$")


@dataclass(frozen=True)
class Word:
    """A transcribed word with start/end timing in seconds."""

    text: str
    start_s: float
    end_s: float

    def __post_init__(self):
        if not self.text or any(ch.isspace() for ch in self.text):
            raise InvalidWord(f"word text must be non-empty with no whitespace: {self.text!r}")
        if self.start_s < 0:
            raise InvalidWord(f"word start must be non-negative, got {self.start_s}")
        if self.start_s > self.end_s:
            raise InvalidWord(
                f"word start {self.start_s} must not exceed end {self.end_s} ({self.text!r})"
            )


@dataclass(frozen=True)
class Sentence:
    """An indexed sentence with start/end timestamps in seconds."""

    index: int
    text: str
    start_s: float
    end_s: float

    def __post_init__(self):
        if self.index < 0:
            raise InvalidSentence(f"sentence index must be non-negative, got {self.index}")
        if not self.text or "\n" in self.text or "\r" in self.text:
            raise InvalidSentence(f"sentence text must be non-empty with no line breaks: {self.text!r}")
        if self.start_s < 0:
            raise InvalidSentence(f"sentence start must be non-negative, got {self.start_s}")
        if not self.start_s < self.end_s:
            raise InvalidSentence(
                f"sentence start {self.start_s} must precede end {self.end_s} (index {self.index})"
            )

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


@dataclass(frozen=True)
class SentencizedTranscript:
    """An ordered, timestamped sentence list for one episode."""

    episode_id: str
    sentences: tuple[Sentence, ...]

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        if not self.sentences:
            raise EmptyTranscript("a transcript needs at least one sentence")
        for i, sent in enumerate(self.sentences):
            if sent.index != i:
                raise InvalidSentence(
                    f"sentence indices must be contiguous from 0; position {i} has index {sent.index}"
                )
            if i == 0:
                continue
            prev = self.sentences[i - 1]
            if sent.start_s < prev.start_s - TIMESTAMP_JITTER_S:
                raise NonMonotonicTimestamps(
                    f"sentence {i} starts at {sent.start_s}, more than {TIMESTAMP_JITTER_S}s "
                    f"before sentence {i - 1} ({prev.start_s})"
                )
            if prev.end_s - sent.start_s > TIMESTAMP_JITTER_S:
                raise NonMonotonicTimestamps(
                    f"sentences {i - 1} and {i} overlap by more than {TIMESTAMP_JITTER_S}s"
                )

    def __len__(self) -> int:
        return len(self.sentences)

    @property
    def duration_s(self) -> float:
        """End of the last sentence; the episode's effective length."""
        return max(s.end_s for s in self.sentences)

    def starts(self) -> list[float]:
        return [s.start_s for s in self.sentences]


@dataclass(frozen=True)
class Episode:
    """Episode metadata plus word- and/or sentence-level transcript."""

    episode_id: str
    title: str = ""
    description: str = ""
    show_name: str = ""
    language_tags: tuple[str, ...] = ()
    words: tuple[Word, ...] | None = None
    sentences: tuple[Sentence, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "language_tags", tuple(self.language_tags))
        if self.words is not None:
            object.__setattr__(self, "words", tuple(self.words))
        if self.sentences is not None:
            object.__setattr__(self, "sentences", tuple(self.sentences))
        if not self.episode_id:
            raise ValueError("episode_id must be non-empty")
        if self.words is None and self.sentences is None:
            raise ValueError(f"episode {self.episode_id!r} needs words or sentences")


def sentencize(
    words: list[Word] | tuple[Word, ...],
    episode_id: str = "",
    abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS,
) -> SentencizedTranscript:
    """Split word-timed text into timestamped sentences at punctuation boundaries.

    A boundary falls after any word ending in '.', '!' or '?' whose lowercased
    text is not in ``abbreviations``. A trailing unterminated run becomes the
    final sentence. Every word lands in exactly one sentence; sentence
    timestamps are the first word's start and the last word's end.
    """
    if not words:
        raise EmptyTranscript("cannot sentencize an empty word list")
    lowered = frozenset(a.lower() for a in abbreviations)
    for i in range(1, len(words)):
        prev, cur = words[i - 1], words[i]
        regression = max(prev.start_s - cur.start_s, prev.end_s - cur.start_s)
        if regression > TIMESTAMP_JITTER_S:
            raise NonMonotonicTimestamps(
                f"word {i} ({cur.text!r}) starts at {cur.start_s}, regressing "
                f"{regression:.3f}s past word {i - 1}"
            )

    sentences: list[Sentence] = []
    run: list[Word] = []
    for word in words:
        run.append(word)
        if word.text.endswith(_SENTENCE_TERMINALS) and word.text.lower() not in lowered:
            sentences.append(_sentence_from_run(len(sentences), run))
            run = []
    if run:
        sentences.append(_sentence_from_run(len(sentences), run))
    return SentencizedTranscript(episode_id=episode_id, sentences=tuple(sentences))


def _sentence_from_run(index: int, run: list[Word]) -> Sentence:
    return Sentence(
        index=index,
        text=" ".join(w.text for w in run),
        start_s=run[0].start_s,
        end_s=run[-1].end_s,
    )


def format_timestamp(value: float) -> str:
    """Render seconds with two decimals, integer part padded to two digits.

    Rounding is half-away-from-zero on the decimal reading of the value, so
    130.125 renders as "130.13" (plain float formatting would give "130.12").
    """
    quantized = Decimal(str(value)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)
    text = f"{quantized:.2f}"
    return "0" + text if quantized < 10 else text


def render_timestamped(t: SentencizedTranscript) -> str:
    """Render a transcript in the bracketed one-sentence-per-line format.

    Lines are joined with single newlines and there is no trailing newline.
    """
    return "\n".join(
        f"[{format_timestamp(s.start_s)} - {format_timestamp(s.end_s)}] {s.text}"
        for s in t.sentences
    )


def parse_timestamped(text: str, episode_id: str = "") -> SentencizedTranscript:
    """Parse the bracketed line format back into a transcript.

    Blank lines are ignored; any other line that does not match the format
    raises :class:`MalformedLine` with its 1-based line number. Timestamps are
    recovered to the 0.01 s the format encodes.
    """
    sentences: list[Sentence] = []
    for line_no, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        m = _LINE_RE.match(line)
        if m is None:
            raise MalformedLine(line_no, line)
        start_s, end_s = float(m.group(1)), float(m.group(2))
        try:
            sentences.append(
                Sentence(index=len(sentences), text=m.group(3), start_s=start_s, end_s=end_s)
            )
        except InvalidSentence as exc:
            raise MalformedLine(line_no, line, str(exc)) from exc
    if not sentences:
        raise EmptyTranscript("no sentence lines found")
    return SentencizedTranscript(episode_id=episode_id, sentences=tuple(sentences))


def transcript_for(
    episode: Episode, abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS
) -> SentencizedTranscript:
    """Return the episode's sentence transcript, sentencizing words if needed."""
    if episode.sentences:
        return SentencizedTranscript(episode_id=episode.episode_id, sentences=episode.sentences)
    return sentencize(list(episode.words or ()), episode.episode_id, abbreviations)


# -- episode ingestion JSON ----------------------------------------------------


def episode_from_dict(data: dict) -> Episode:
    """Build an :class:`Episode` from the ingestion JSON schema.

    Schema: ``{"episode_id", "title", "description", "show_name",
    "language_tags": [...], "words": [{"text","start_s","end_s"}],
    "sentences": [{"text","start_s","end_s"}]}`` with at least one of
    words/sentences present.
    """
    if not isinstance(data, dict):
        raise ValueError("episode document must be a JSON object")
    episode_id = data.get("episode_id")
    if not episode_id or not isinstance(episode_id, str):
        raise ValueError("episode_id must be a non-empty string")
    words = None
    if data.get("words") is not None:
        words = tuple(
            Word(text=w["text"], start_s=float(w["start_s"]), end_s=float(w["end_s"]))
            for w in data["words"]
        )
    sentences = None
    if data.get("sentences") is not None:
        sentences = tuple(
            Sentence(
                index=i,
                text=s["text"],
                start_s=float(s["start_s"]),
                end_s=float(s["end_s"]),
            )
            for i, s in enumerate(data["sentences"])
        )
    return Episode(
        episode_id=episode_id,
        title=data.get("title", ""),
        description=data.get("description", ""),
        show_name=data.get("show_name", ""),
        language_tags=tuple(data.get("language_tags", ())),
        words=words,
        sentences=sentences,
    )


def episode_to_dict(episode: Episode) -> dict:
    """Inverse of :func:`episode_from_dict`."""
    doc: dict = {
        "episode_id": episode.episode_id,
        "title": episode.title,
        "description": episode.description,
        "show_name": episode.show_name,
        "language_tags": list(episode.language_tags),
    }
    if episode.words is not None:
        doc["words"] = [
            {"text": w.text, "start_s": w.start_s, "end_s": w.end_s} for w in episode.words
        ]
    if episode.sentences is not None:
        doc["sentences"] = [
            {"text": s.text, "start_s": s.start_s, "end_s": s.end_s} for s in episode.sentences
        ]
    return doc


def load_episode(path: str | Path) -> Episode:
    """Read one episode ingestion JSON document from ``path``."""
    with open(path, encoding="utf-8") as fh:
        return episode_from_dict(json.load(fh))
