"""HTTP facade over the extraction pipeline.

POST /episodes accepts episode JSON, queues a background job, and returns its
id immediately; jobs and finished previews are polled via GET. All bodies
are the package's JSON formats; schema problems map to 422 and unknown ids
to 404.
"""

from __future__ import annotations

import threading

from fastapi import BackgroundTasks, Body, FastAPI, HTTPException, Query

from .baseline import SentimentScorer, SignalDetector
from .config import AppConfig
from .errors import PodPreviewError
from .gate import LanguageDetector
from .llmbridge import AdmissionGate, CompletionClient, HttpCompletionClient
from .selector import SYSTEM_BASELINE, SYSTEM_LLM
from .store import PreviewStore
from .transcript import episode_from_dict
from .worker import _MODES, MODE_LLM, new_job, process_episode


def client_from_config(config: AppConfig) -> CompletionClient | None:
    """Build the HTTP completion client, or None when no endpoint is set."""
    if not config.client.endpoint:
        return None
    return HttpCompletionClient(
        endpoint=config.client.endpoint,
        model=config.client.model,
        credential_env=config.client.credential_env,
        timeout_s=config.client.timeout_s,
    )


def create_app(
    config: AppConfig | None = None,
    *,
    client: CompletionClient | None = None,
    store: PreviewStore | None = None,
    scorers: list[SentimentScorer] | None = None,
    detectors: list[SignalDetector] | None = None,
    language_detector: LanguageDetector | None = None,
) -> FastAPI:
    """Assemble the service; injected client/store override the config."""
    config = config if config is not None else AppConfig()
    store = store if store is not None else PreviewStore(config.store_path)
    client = client if client is not None else client_from_config(config)
    admission = AdmissionGate(max(1, config.worker.concurrency))

    app = FastAPI(title="podpreview")
    jobs: dict[str, dict] = {}
    jobs_lock = threading.Lock()
    app.state.store = store

    @app.post("/episodes", status_code=202)
    def submit_episode(background: BackgroundTasks, payload: dict = Body(...)):
        body = dict(payload)
        mode = body.pop("mode", MODE_LLM)
        if mode not in _MODES:
            raise HTTPException(status_code=422, detail=f"mode must be one of {_MODES}")
        try:
            episode = episode_from_dict(body)
        except (PodPreviewError, ValueError, TypeError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        job = new_job(episode.episode_id, mode)
        with jobs_lock:
            jobs[job.job_id] = job.to_dict()

        def run() -> None:
            process_episode(
                episode,
                mode,
                config,
                client=client,
                store=store,
                scorers=scorers,
                detectors=detectors,
                language_detector=language_detector,
                admission=admission,
                job=job,
            )
            with jobs_lock:
                jobs[job.job_id] = job.to_dict()

        background.add_task(run)
        return {"job_id": job.job_id, "episode_id": episode.episode_id, "state": job.state}

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str):
        with jobs_lock:
            job = jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"unknown job {job_id!r}")
        return job

    @app.get("/previews/{episode_id}")
    def get_preview(episode_id: str, system: str = Query(default=SYSTEM_LLM)):
        if system not in (SYSTEM_LLM, SYSTEM_BASELINE):
            raise HTTPException(
                status_code=422, detail=f"system must be {SYSTEM_LLM!r} or {SYSTEM_BASELINE!r}"
            )
        record = store.active(episode_id, system)
        if record is None:
            raise HTTPException(
                status_code=404, detail=f"no {system} preview for episode {episode_id!r}"
            )
        return record

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "active_records": store.active_count()}

    return app


def serve(config: AppConfig | None = None, host: str = "127.0.0.1", port: int = 8000) -> None:
    """Run the service under uvicorn (blocking)."""
    import uvicorn

    uvicorn.run(create_app(config), host=host, port=port)
