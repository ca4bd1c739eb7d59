"""Chat-completion client plumbing and structured preview-output parsing.

The client side is deliberately generic: anything with a
``send(CompletionRequest) -> str`` method works, and a deterministic scripted
mock is provided for tests and offline runs. The parsing side turns the
model's JSON into a validated :class:`PreviewChoice` and never crashes on
garbage input; it raises typed errors instead.
"""

from __future__ import annotations

import json
import logging
import math
import os
import random
import re
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import requests

from .errors import (
    AuthError,
    BudgetExceeded,
    CompletionError,
    Exhausted,
    InvalidSpan,
    NoJsonFound,
    SchemaViolation,
    TransientCompletionError,
)

logger = logging.getLogger(__name__)

_FENCE_RE = re.compile(r"```[A-Za-z0-9_-]*[ \t]*\r?\n(.*?)```", re.DOTALL)

DEFAULT_MAX_IN_FLIGHT = 8


# -- domain types ---------------------------------------------------------------


@dataclass(frozen=True)
class PreviewMetadata:
    """Descriptive metadata emitted alongside a preview selection."""

    episode_theme: str
    preview_title: str
    preview_explanation: str
    hashtags: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "hashtags", tuple(self.hashtags))
        if not self.preview_title:
            raise SchemaViolation("preview_title", "must be non-empty")
        for tag in self.hashtags:
            if not tag.startswith("#") or any(ch.isspace() for ch in tag):
                raise SchemaViolation("hashtags", f"{tag!r} must start with '#' and hold no whitespace")

    def to_dict(self) -> dict:
        return {
            "episode_theme": self.episode_theme,
            "preview_title": self.preview_title,
            "preview_explanation": self.preview_explanation,
            "hashtags": list(self.hashtags),
        }


@dataclass(frozen=True)
class PreviewChoice:
    """The model's selected segment: raw timestamps plus metadata."""

    preview_start_s: float
    preview_end_s: float
    metadata: PreviewMetadata

    def __post_init__(self):
        if not self.preview_start_s < self.preview_end_s:
            raise InvalidSpan(
                f"preview start {self.preview_start_s} must precede end {self.preview_end_s}"
            )


@dataclass(frozen=True)
class CompletionRequest:
    system: str
    user: str
    temperature: float = 0.2
    max_output_tokens: int = 1024

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature must be in [0, 2], got {self.temperature}")


@dataclass(frozen=True)
class CompletionResult:
    text: str
    latency_s: float
    attempt: int  # 1-based attempt that succeeded


@dataclass(frozen=True)
class RetryPolicy:
    """Exponential backoff for transient completion failures."""

    max_attempts: int = 3
    base_delay_s: float = 0.5
    multiplier: float = 2.0
    jitter_frac: float = 0.1

    def delay_for(self, attempt: int, rng: random.Random) -> float:
        base = self.base_delay_s * self.multiplier ** (attempt - 1)
        return base * (1.0 + self.jitter_frac * rng.random())


class CompletionClient(Protocol):
    """Anything that can turn a completion request into generated text."""

    def send(self, request: CompletionRequest) -> str:
        ...


class AdmissionGate:
    """Caps concurrent in-flight completion calls across worker threads."""

    def __init__(self, limit: int = DEFAULT_MAX_IN_FLIGHT):
        if limit < 1:
            raise ValueError(f"admission limit must be >= 1, got {limit}")
        self.limit = limit
        self._sem = threading.BoundedSemaphore(limit)

    def __enter__(self):
        self._sem.acquire()
        return self

    def __exit__(self, *exc_info):
        self._sem.release()
        return False


# -- completion with retry --------------------------------------------------------


def _rough_tokens(text: str) -> int:
    return (len(text) + 3) // 4


def complete(
    client: CompletionClient,
    req: CompletionRequest,
    retry: RetryPolicy = RetryPolicy(),
    *,
    gate: AdmissionGate | None = None,
    token_budget: int | None = None,
    strict_budget: bool = False,
    sleep=time.sleep,
    rng: random.Random | None = None,
) -> CompletionResult:
    """Call the client, retrying transient failures with exponential backoff.

    Auth and other permanent errors propagate immediately; after
    ``retry.max_attempts`` transient failures an :class:`Exhausted` error
    carries the last cause. Over-budget prompts raise
    :class:`BudgetExceeded` in strict mode and only warn otherwise.
    """
    if token_budget is not None:
        estimate = _rough_tokens(req.system) + _rough_tokens(req.user)
        if estimate > token_budget:
            if strict_budget:
                raise BudgetExceeded(f"prompt estimate {estimate} tokens exceeds budget {token_budget}")
            logger.warning("prompt estimate %d tokens exceeds budget %d", estimate, token_budget)

    rng = rng if rng is not None else random.Random()
    last_cause: BaseException | None = None
    for attempt in range(1, max(1, retry.max_attempts) + 1):
        started = time.perf_counter()
        try:
            if gate is not None:
                with gate:
                    text = client.send(req)
            else:
                text = client.send(req)
            return CompletionResult(text=text, latency_s=time.perf_counter() - started, attempt=attempt)
        except AuthError:
            raise
        except TransientCompletionError as exc:
            last_cause = exc
            if attempt < retry.max_attempts:
                sleep(retry.delay_for(attempt, rng))
    raise Exhausted(attempts=max(1, retry.max_attempts), cause=last_cause)


# -- structured output parsing ------------------------------------------------------


def parse_llm_output(text: str) -> PreviewChoice:
    """Parse completion text into a validated :class:`PreviewChoice`.

    The first fenced code block is preferred when present; otherwise the whole
    text is scanned for a JSON object. Hashtags are normalized: internal
    whitespace removed and a leading '#' added when missing. Raises
    :class:`NoJsonFound`, :class:`SchemaViolation` (naming the field), or
    :class:`InvalidSpan`; never anything else.
    """
    fence = _FENCE_RE.search(text)
    candidate = fence.group(1) if fence else text
    obj = _first_json_object(candidate)
    if obj is None and fence:
        obj = _first_json_object(text)
    if obj is None:
        raise NoJsonFound("no JSON object found in completion text")

    start_s = _number_field(obj, "preview_start_s")
    end_s = _number_field(obj, "preview_end_s")
    metadata = PreviewMetadata(
        episode_theme=_string_field(obj, "episode_theme"),
        preview_title=_string_field(obj, "preview_title"),
        preview_explanation=_string_field(obj, "preview_explanation"),
        hashtags=_hashtags_field(obj),
    )
    return PreviewChoice(preview_start_s=start_s, preview_end_s=end_s, metadata=metadata)


def serialize_choice(choice: PreviewChoice) -> str:
    """Render a choice in the JSON output shape the prompt requests."""
    doc = {
        "preview_start_s": choice.preview_start_s,
        "preview_end_s": choice.preview_end_s,
        **choice.metadata.to_dict(),
    }
    return json.dumps(doc, ensure_ascii=False, indent=2)


def _first_json_object(text: str) -> dict | None:
    decoder = json.JSONDecoder()
    try:
        parsed = json.loads(text)
        return parsed if isinstance(parsed, dict) else None
    except ValueError:
        pass
    for pos, ch in enumerate(text):
        if ch != "{":
            continue
        try:
            parsed, _ = decoder.raw_decode(text, pos)
        except ValueError:
            continue
        if isinstance(parsed, dict):
            return parsed
    return None


def _number_field(obj: dict, name: str) -> float:
    if name not in obj:
        raise SchemaViolation(name, "missing")
    value = obj[name]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaViolation(name, f"expected a number, got {type(value).__name__}")
    value = float(value)
    if not math.isfinite(value):
        raise SchemaViolation(name, "must be finite")
    return value


def _string_field(obj: dict, name: str) -> str:
    if name not in obj:
        raise SchemaViolation(name, "missing")
    value = obj[name]
    if not isinstance(value, str):
        raise SchemaViolation(name, f"expected a string, got {type(value).__name__}")
    return value


def _hashtags_field(obj: dict) -> tuple[str, ...]:
    if "hashtags" not in obj:
        raise SchemaViolation("hashtags", "missing")
    raw = obj["hashtags"]
    if not isinstance(raw, (list, tuple)):
        raise SchemaViolation("hashtags", f"expected a list, got {type(raw).__name__}")
    tags = []
    for entry in raw:
        if not isinstance(entry, str):
            raise SchemaViolation("hashtags", f"expected strings, got {type(entry).__name__}")
        squeezed = "".join(entry.split())
        if not squeezed.startswith("#"):
            squeezed = "#" + squeezed
        if squeezed != "#":
            tags.append(squeezed)
    return tuple(tags)


# -- clients ------------------------------------------------------------------------


@dataclass(frozen=True)
class ScriptedResponse:
    """One scripted mock step: a success text or an injected failure."""

    text: str = ""
    error: str | None = None  # None | "transient" | "auth" | "permanent"
    latency_s: float = 0.0


class MockClient:
    """Deterministic scripted client; repeats the last entry once exhausted.

    Thread-safe; tracks total calls and the peak number of concurrent calls
    so tests can assert admission-gate behavior.
    """

    def __init__(self, script: list[ScriptedResponse] | tuple[ScriptedResponse, ...]):
        if not script:
            raise ValueError("mock script must be non-empty")
        self._script = tuple(script)
        self._lock = threading.Lock()
        self.calls = 0
        self.in_flight = 0
        self.max_in_flight = 0

    def send(self, request: CompletionRequest) -> str:
        with self._lock:
            entry = self._script[min(self.calls, len(self._script) - 1)]
            self.calls += 1
            self.in_flight += 1
            self.max_in_flight = max(self.max_in_flight, self.in_flight)
        try:
            if entry.latency_s > 0:
                time.sleep(entry.latency_s)
            if entry.error == "transient":
                raise TransientCompletionError("scripted transient failure")
            if entry.error == "auth":
                raise AuthError("scripted auth failure")
            if entry.error == "permanent":
                raise CompletionError("scripted permanent failure")
            return entry.text
        finally:
            with self._lock:
                self.in_flight -= 1


def mock_client(script: list[ScriptedResponse]) -> MockClient:
    """Build a deterministic scripted client (test double)."""
    return MockClient(script)


def load_mock_script(path: str | Path) -> list[ScriptedResponse]:
    """Load a mock script from JSON: a list of entries or a single entry.

    Entry shape: ``{"text": str, "error": null|"transient"|"auth"|"permanent",
    "latency_s": float}``; all keys optional.
    """
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    entries = raw if isinstance(raw, list) else [raw]
    script = []
    for entry in entries:
        if not isinstance(entry, dict):
            raise ValueError("mock script entries must be JSON objects")
        script.append(
            ScriptedResponse(
                text=entry.get("text", ""),
                error=entry.get("error"),
                latency_s=float(entry.get("latency_s", 0.0)),
            )
        )
    return script


class HttpCompletionClient:
    """Generic chat-completion HTTP adapter.

    POSTs ``{"system", "user", "temperature", "max_output_tokens"}`` (plus
    ``"model"`` when configured) to the endpoint and expects the generated
    text in the response body, either as a bare string body or under a
    ``"text"`` key. The credential is read from the configured environment
    variable at call time and sent as a bearer token.
    """

    def __init__(
        self,
        endpoint: str,
        model: str | None = None,
        credential_env: str = "PODPREVIEW_API_KEY",
        timeout_s: float = 60.0,
        session: requests.Session | None = None,
    ):
        if not endpoint:
            raise ValueError("endpoint must be configured")
        self.endpoint = endpoint
        self.model = model
        self.credential_env = credential_env
        self.timeout_s = timeout_s
        self._session = session or requests.Session()

    def send(self, request: CompletionRequest) -> str:
        payload = {
            "system": request.system,
            "user": request.user,
            "temperature": request.temperature,
            "max_output_tokens": request.max_output_tokens,
        }
        if self.model:
            payload["model"] = self.model
        headers = {}
        token = os.environ.get(self.credential_env)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        try:
            resp = self._session.post(
                self.endpoint, json=payload, headers=headers, timeout=self.timeout_s
            )
        except (requests.Timeout, requests.ConnectionError) as exc:
            raise TransientCompletionError(f"request failed: {exc}") from exc

        if resp.status_code in (401, 403):
            raise AuthError(f"endpoint rejected credential (HTTP {resp.status_code})")
        if resp.status_code >= 500:
            raise TransientCompletionError(f"server error HTTP {resp.status_code}")
        if resp.status_code >= 400:
            raise CompletionError(f"HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            body = resp.json()
        except ValueError:
            return resp.text
        if isinstance(body, dict) and isinstance(body.get("text"), str):
            return body["text"]
        if isinstance(body, str):
            return body
        raise CompletionError("response body holds no generated text")
