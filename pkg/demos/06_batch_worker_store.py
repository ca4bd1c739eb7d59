"""
Batch processing into an append-only store
==========================================

"""

# run_worker pushes a batch of episodes through the whole pipeline with a
# bounded thread pool. Per-episode failures stay contained; reprocessing an
# episode supersedes its old record instead of duplicating it.

import json
import tempfile
from pathlib import Path

from podpreview import (
    AppConfig,
    Episode,
    MockClient,
    PreviewStore,
    ScriptedResponse,
    Sentence,
    WorkerConfig,
    run_worker,
)

reply = json.dumps(
    {
        "preview_start_s": 36.0,
        "preview_end_s": 96.0,
        "episode_theme": "Batch processing",
        "preview_title": "A Scripted Preview",
        "preview_explanation": "Same reply for every episode.",
        "hashtags": ["#Batch"],
    }
)

# The first call fails with a transient error. The retry policy absorbs it,
# and since a script sticks on its final entry once exhausted, every later
# call succeeds: all episodes come out done. The 50 ms latency keeps several
# calls in flight at once so the concurrency counters have something to see.
script = [
    ScriptedResponse(error="transient"),
    ScriptedResponse(text=reply, latency_s=0.05),
]

def episode(i):
    sentences = tuple(
        Sentence(index=j, text=f"Sentence {j}.", start_s=7.0 * j, end_s=7.0 * j + 6.0) for j in range(30)
    )
    return Episode(episode_id=f"batch-{i:03d}", title=f"Episode {i}", language_tags=("en",), sentences=sentences)

episodes = [episode(i) for i in range(12)]
config = AppConfig(worker=WorkerConfig(concurrency=4))

with tempfile.TemporaryDirectory() as tmp:
    store = PreviewStore(Path(tmp) / "previews.jsonl")
    client = MockClient(script)

    for job in run_worker(episodes, config, client=client, store=store):
        timing = f"{job.timings['total_s']:.3f}s" if job.timings else "-"
        print(f"{job.episode_id}  {job.state:6}  {timing}")

    print(f"\nactive records: {store.active_count()}  appended lines: {store.appended_count}")
    print(f"peak concurrent completion calls: {client.max_in_flight} (cap {config.worker.concurrency})")

    # Rerun two episodes: the log grows, the active view does not.
    list(run_worker(episodes[:2], config, client=client, store=store))
    print(f"after rerun:    {store.active_count()}  appended lines: {store.appended_count}")

    # A fresh handle on the same file rebuilds the same view, last write wins.
    reopened = PreviewStore(store.path)
    record = reopened.active("batch-000", "llm")
    print(f"reopened store sees {reopened.active_count()} records; batch-000 spans [{record['start_s']}, {record['end_s']}]")
