"""Append-only JSONL preview store with a last-wins in-memory index.

Every record ever written stays in the log file; the index keeps only the
newest record per (episode_id, system). Rebuilding the index from the file
on open makes restarts reach the same active set, and reprocessing an
episode simply supersedes its record.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path

from .selector import PreviewSpan, span_to_record


class PreviewStore:
    """Single-writer JSONL log of persisted preview records."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._active: dict[tuple[str, str], dict] = {}
        self._appended = 0
        if self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    record = json.loads(line)
                    self._index(record)
                    self._appended += 1

    def _index(self, record: dict) -> None:
        self._active[(record["episode_id"], record["system"])] = record

    def append(self, record: dict) -> dict:
        """Persist one preview record; the newest write wins the index slot."""
        for key in ("episode_id", "system"):
            if key not in record:
                raise ValueError(f"preview record is missing {key!r}")
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")
            self._index(record)
            self._appended += 1
        return record

    def put_span(self, span: PreviewSpan, timings: dict | None = None) -> dict:
        """Serialize and persist a span, attaching job timings when given."""
        record = span_to_record(span)
        if timings is not None:
            record["timings"] = timings
        return self.append(record)

    def active(self, episode_id: str, system: str) -> dict | None:
        """The current record for one (episode, system), or None."""
        with self._lock:
            return self._active.get((episode_id, system))

    def active_records(self) -> list[dict]:
        """All current records, one per (episode, system) pair."""
        with self._lock:
            return list(self._active.values())

    def active_count(self) -> int:
        with self._lock:
            return len(self._active)

    @property
    def appended_count(self) -> int:
        """Total records ever written, superseded ones included."""
        with self._lock:
            return self._appended
