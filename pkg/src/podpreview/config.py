"""Runtime configuration: one file (TOML or JSON) wires the whole pipeline.

Sections map onto the subsystems: [gate], [client], [retry], [selector],
[baseline] (with nested [baseline.adjustments] and [baseline.weights]),
[worker], [store], plus a prompt_config path at top level. Every key is
optional; omitted keys keep library defaults.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .baseline import AdjustmentTable, BaselineConfig, RankWeights
from .gate import DEFAULT_DETECTOR_THRESHOLD
from .llmbridge import DEFAULT_MAX_IN_FLIGHT, RetryPolicy
from .promptkit import PromptConfig, load_prompt_config
from .selector import DEFAULT_WINDOW_S


@dataclass(frozen=True)
class ClientConfig:
    endpoint: str = ""
    model: str | None = None
    credential_env: str = "PODPREVIEW_API_KEY"
    timeout_s: float = 60.0


@dataclass(frozen=True)
class GateConfig:
    detector_threshold: float = DEFAULT_DETECTOR_THRESHOLD


@dataclass(frozen=True)
class WorkerConfig:
    concurrency: int = DEFAULT_MAX_IN_FLIGHT
    token_budget: int | None = None
    strict_budget: bool = False


@dataclass(frozen=True)
class AppConfig:
    gate: GateConfig = field(default_factory=GateConfig)
    client: ClientConfig = field(default_factory=ClientConfig)
    retry: RetryPolicy = field(default_factory=RetryPolicy)
    window_s: float = DEFAULT_WINDOW_S
    baseline: BaselineConfig = field(default_factory=BaselineConfig)
    worker: WorkerConfig = field(default_factory=WorkerConfig)
    prompts: PromptConfig = field(default_factory=PromptConfig)
    store_path: str = "previews.jsonl"


def _read_config_file(path: Path) -> dict:
    if path.suffix.lower() == ".toml":
        if sys.version_info >= (3, 11):
            import tomllib
        else:
            import tomli as tomllib
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def config_from_dict(raw: dict, base_dir: Path | None = None) -> AppConfig:
    """Build an AppConfig from parsed file content; unknown keys are errors."""

    def section(name: str, allowed: tuple[str, ...]) -> dict:
        data = raw.get(name, {})
        if not isinstance(data, dict):
            raise ValueError(f"config section {name!r} must be a table/object")
        unknown = set(data) - set(allowed)
        if unknown:
            raise ValueError(f"unknown keys in config section {name!r}: {sorted(unknown)}")
        return data

    gate_raw = section("gate", ("detector_threshold",))
    client_raw = section("client", ("endpoint", "model", "credential_env", "timeout_s"))
    retry_raw = section("retry", ("max_attempts", "base_delay_s", "multiplier", "jitter_frac"))
    selector_raw = section("selector", ("window_s",))
    worker_raw = section("worker", ("concurrency", "token_budget", "strict_budget"))
    store_raw = section("store", ("path",))

    baseline_raw = dict(raw.get("baseline", {}))
    adjustments_raw = baseline_raw.pop("adjustments", {})
    weights_raw = baseline_raw.pop("weights", {})
    allowed_baseline = ("resolution_s", "smoothing_w", "window_s", "top_k")
    unknown = set(baseline_raw) - set(allowed_baseline)
    if unknown:
        raise ValueError(f"unknown keys in config section 'baseline': {sorted(unknown)}")

    prompts = PromptConfig()
    if "prompt_config" in raw:
        prompt_path = Path(raw["prompt_config"])
        if base_dir is not None and not prompt_path.is_absolute():
            prompt_path = base_dir / prompt_path
        prompts = load_prompt_config(prompt_path)

    return AppConfig(
        gate=GateConfig(**gate_raw),
        client=ClientConfig(**client_raw),
        retry=RetryPolicy(**retry_raw),
        window_s=float(selector_raw.get("window_s", DEFAULT_WINDOW_S)),
        baseline=BaselineConfig(
            table=AdjustmentTable(**adjustments_raw),
            weights=RankWeights(**weights_raw),
            **baseline_raw,
        ),
        worker=WorkerConfig(**worker_raw),
        prompts=prompts,
        store_path=str(store_raw.get("path", "previews.jsonl")),
    )


def load_config(path: str | Path | None = None) -> AppConfig:
    """Load configuration from a TOML/JSON file, or defaults when no path."""
    if path is None:
        return AppConfig()
    path = Path(path)
    return config_from_dict(_read_config_file(path), base_dir=path.parent)
