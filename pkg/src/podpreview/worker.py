"""Batch extraction: per-episode jobs with isolation, concurrency, timings.

Each episode becomes a Job that runs the gate, the chosen extraction mode(s),
and persistence. A job failure is recorded on the job and never aborts the
worker. Reprocessing an episode supersedes its stored record, so the worker
is safely at-least-once.
"""

from __future__ import annotations

import time
import uuid
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .baseline import (
    SentimentScorer,
    SignalDetector,
    default_detectors,
    default_scorers,
    extract_baseline_preview,
)
from .config import AppConfig
from .errors import CompletionError, IneligibleLanguage
from .gate import LanguageDetector, filter_combined, filter_metadata
from .llmbridge import AdmissionGate, CompletionClient, CompletionRequest, complete, parse_llm_output
from .promptkit import assemble_prompts
from .selector import select_llm_preview, span_to_record
from .store import PreviewStore
from .transcript import Episode, transcript_for

MODE_LLM = "llm"
MODE_BASELINE = "baseline"
MODE_BOTH = "both"
_MODES = (MODE_LLM, MODE_BASELINE, MODE_BOTH)

_STATES = ("queued", "running", "done", "failed")
_TRANSITIONS = {("queued", "running"), ("running", "done"), ("running", "failed")}


@dataclass
class Job:
    """One episode's trip through the pipeline."""

    job_id: str
    episode_id: str
    mode: str
    state: str = "queued"
    timings: dict | None = None
    error: str | None = None
    records: list[dict] = field(default_factory=list)

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}, got {self.mode!r}")

    def transition(self, state: str) -> None:
        if (self.state, state) not in _TRANSITIONS:
            raise ValueError(f"illegal job transition {self.state} -> {state}")
        self.state = state

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "episode_id": self.episode_id,
            "mode": self.mode,
            "state": self.state,
            "timings": self.timings,
            "error": self.error,
            "records": self.records,
        }


def new_job(episode_id: str, mode: str) -> Job:
    return Job(job_id=uuid.uuid4().hex[:12], episode_id=episode_id, mode=mode)


def process_episode(
    episode: Episode,
    mode: str = MODE_LLM,
    config: AppConfig | None = None,
    *,
    client: CompletionClient | None = None,
    store: PreviewStore | None = None,
    scorers: Sequence[SentimentScorer] | None = None,
    detectors: Sequence[SignalDetector] | None = None,
    language_detector: LanguageDetector | None = None,
    admission: AdmissionGate | None = None,
    job: Job | None = None,
) -> Job:
    """Run one episode end to end; failures land on the job, not the caller.

    Timings cover the whole job plus the LLM call and parse stages (zero for
    baseline-only jobs). Records are persisted only when the job succeeds.
    """
    config = config if config is not None else AppConfig()
    job = job if job is not None else new_job(episode.episode_id, mode)
    job.transition("running")
    started = time.perf_counter()
    try:
        if language_detector is not None:
            decision = filter_combined(episode, language_detector, config.gate.detector_threshold)
        else:
            decision = filter_metadata(episode)
        if not decision.eligible:
            raise IneligibleLanguage(episode.episode_id)

        t = transcript_for(episode)
        spans = []
        llm_call_s = parse_s = 0.0
        if mode in (MODE_LLM, MODE_BOTH):
            if client is None:
                raise CompletionError("llm mode needs a completion client (endpoint or mock)")
            bundle = assemble_prompts(episode, t, config.prompts)
            request = CompletionRequest(system=bundle.system_prompt, user=bundle.user_prompt)
            call_started = time.perf_counter()
            result = complete(
                client,
                request,
                config.retry,
                gate=admission,
                token_budget=config.worker.token_budget,
                strict_budget=config.worker.strict_budget,
            )
            llm_call_s = time.perf_counter() - call_started
            parse_started = time.perf_counter()
            choice = parse_llm_output(result.text)
            parse_s = time.perf_counter() - parse_started
            spans.append(select_llm_preview(t, choice, config.window_s))
        if mode in (MODE_BASELINE, MODE_BOTH):
            spans.append(
                extract_baseline_preview(
                    episode,
                    scorers if scorers is not None else default_scorers(),
                    detectors if detectors is not None else default_detectors(),
                    config.baseline,
                )
            )

        job.timings = {
            "total_s": time.perf_counter() - started,
            "llm_call_s": llm_call_s,
            "parse_s": parse_s,
        }
        for span in spans:
            if store is not None:
                job.records.append(store.put_span(span, timings=job.timings))
            else:
                job.records.append(span_to_record(span))
        job.transition("done")
    except Exception as exc:
        job.timings = None
        job.error = f"{type(exc).__name__}: {exc}"
        job.transition("failed")
    return job


def run_worker(
    episodes: Iterable[Episode],
    config: AppConfig | None = None,
    *,
    client: CompletionClient | None = None,
    store: PreviewStore | None = None,
    mode: str = MODE_LLM,
    scorers: Sequence[SentimentScorer] | None = None,
    detectors: Sequence[SignalDetector] | None = None,
    language_detector: LanguageDetector | None = None,
) -> Iterator[Job]:
    """Process episodes concurrently, yielding jobs as they finish.

    Concurrency is capped twice: worker threads, and an admission gate on
    in-flight completion calls, both at config.worker.concurrency.
    """
    config = config if config is not None else AppConfig()
    concurrency = max(1, config.worker.concurrency)
    admission = AdmissionGate(concurrency)
    with ThreadPoolExecutor(max_workers=concurrency) as pool:
        futures = [
            pool.submit(
                process_episode,
                episode,
                mode,
                config,
                client=client,
                store=store,
                scorers=scorers,
                detectors=detectors,
                language_detector=language_detector,
                admission=admission,
            )
            for episode in episodes
        ]
        for future in as_completed(futures):
            yield future.result()
