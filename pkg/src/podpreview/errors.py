"""Typed errors shared across the toolkit."""

from __future__ import annotations


class PodPreviewError(Exception):
    """Base class for every error raised by this package."""


# -- transcript ---------------------------------------------------------------

class EmptyTranscript(PodPreviewError):
    """No words or sentences to work with."""


class NonMonotonicTimestamps(PodPreviewError):
    """Timestamps regress beyond the tolerated jitter."""


class MalformedLine(PodPreviewError):
    """A timestamped transcript line does not match the bracket format."""

    def __init__(self, line_no: int, line: str, reason: str = ""):
        self.line_no = line_no
        self.line = line
        detail = f": {reason}" if reason else ""
        super().__init__(f"line {line_no} is not a valid timestamped sentence{detail}: {line!r}")


class InvalidWord(PodPreviewError):
    """A word violates its timing or text constraints."""


class InvalidSentence(PodPreviewError):
    """A sentence violates its timing or text constraints."""


# -- gate ---------------------------------------------------------------------

class DetectorFailure(PodPreviewError):
    """A language detector plug-in failed or returned garbage."""

    def __init__(self, episode_id: str, cause: object):
        self.episode_id = episode_id
        self.cause = cause
        super().__init__(f"language detector failed for episode {episode_id!r}: {cause}")


# -- promptkit ----------------------------------------------------------------

class EmptyRequirements(PodPreviewError):
    """The requirement list is empty or contains a blank entry."""


class DuplicateRequirement(PodPreviewError):
    """The same requirement string appears more than once."""


class MissingTranscript(PodPreviewError):
    """A user prompt was requested without transcript text."""


class InvalidFewShotExample(PodPreviewError):
    """A few-shot example's expected output does not parse."""


# -- llm output parsing ---------------------------------------------------------

class OutputParseError(PodPreviewError):
    """Base for structured-output parsing failures."""


class NoJsonFound(OutputParseError):
    """The completion text contains no parseable JSON object."""


class SchemaViolation(OutputParseError):
    """A required output field is missing or has the wrong type."""

    def __init__(self, field: str, reason: str = "missing or ill-typed"):
        self.field = field
        super().__init__(f"field {field!r}: {reason}")


class InvalidSpan(OutputParseError):
    """Preview start does not precede preview end."""


# -- llm completion --------------------------------------------------------------

class CompletionError(PodPreviewError):
    """Permanent completion failure; not retried."""


class TransientCompletionError(CompletionError):
    """Retryable completion failure (timeouts, 5xx, connection loss)."""


class AuthError(CompletionError):
    """Credential rejected; never retried."""


class BudgetExceeded(CompletionError):
    """Prompt exceeds the configured token budget in strict mode."""


class Exhausted(CompletionError):
    """All retry attempts failed."""

    def __init__(self, attempts: int, cause: BaseException | None):
        self.attempts = attempts
        self.cause = cause
        super().__init__(f"completion failed after {attempts} attempt(s): {cause}")


# -- baseline -------------------------------------------------------------------

class SpanOutOfBounds(PodPreviewError):
    """A signal span lies outside the episode's time grid."""


class InvalidSignalKind(PodPreviewError):
    """A signal span has a kind the operation does not accept."""


# -- evallab ----------------------------------------------------------------------

class InvalidCounts(PodPreviewError):
    """Counts passed to a statistic are out of range."""


class MismatchedEpisode(PodPreviewError):
    """An A/B pair mixes previews from different episodes."""


class UnknownItem(PodPreviewError):
    """A judgment references an item id that was never exported."""


# -- pipeline ---------------------------------------------------------------------

class IneligibleLanguage(PodPreviewError):
    """Episode failed the language gate."""

    def __init__(self, episode_id: str):
        self.episode_id = episode_id
        super().__init__(f"episode {episode_id!r} is not eligible (language gate)")
