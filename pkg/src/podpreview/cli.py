"""Command-line entry points.

Subcommands: extract (LLM preview for one episode), baseline (signal-fusion
preview), batch (directory or JSONL of episodes into the store), eval build /
eval stats (blind campaign export and statistics), serve (HTTP service).
Exit codes: 0 success, 1 any job failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import AppConfig, load_config
from .errors import PodPreviewError
from .evallab import (
    TIES_EXCLUDED,
    TIES_INCLUDED,
    build_campaign,
    export_campaign,
    format_stats_table,
    import_campaign,
    read_judgments,
    stats_to_dict,
    summarize_campaign,
)
from .llmbridge import CompletionClient, MockClient, load_mock_script
from .selector import SYSTEM_BASELINE, SYSTEM_LLM, span_from_record
from .service import client_from_config, serve
from .store import PreviewStore
from .transcript import Episode, episode_from_dict, load_episode
from .worker import MODE_BASELINE, MODE_LLM, _MODES, process_episode, run_worker


class _UsageError(Exception):
    pass


def _resolve_client(args, config: AppConfig, required: bool) -> CompletionClient | None:
    mock_path = getattr(args, "mock_llm", None)
    if mock_path:
        return MockClient(load_mock_script(mock_path))
    client = client_from_config(config)
    if client is None and required:
        raise _UsageError("no completion endpoint configured; pass --mock-llm or set [client] endpoint")
    return client


def _load_episodes(path: Path) -> list[Episode]:
    if path.is_dir():
        files = sorted(path.glob("*.json"))
        if not files:
            raise _UsageError(f"no *.json episode files in {path}")
        return [load_episode(p) for p in files]
    if path.suffix == ".jsonl":
        episodes = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    episodes.append(episode_from_dict(json.loads(line)))
        if not episodes:
            raise _UsageError(f"no episodes in {path}")
        return episodes
    return [load_episode(path)]


def _print_failed(job) -> None:
    print(f"episode {job.episode_id}: {job.error}", file=sys.stderr)


def _cmd_single(args, mode: str) -> int:
    config = load_config(args.config)
    episode = load_episode(args.episode)
    client = _resolve_client(args, config, required=mode == MODE_LLM)
    job = process_episode(episode, mode, config, client=client)
    if job.state != "done":
        _print_failed(job)
        return 1
    print(json.dumps(job.records[0], indent=2, ensure_ascii=False))
    return 0


def _cmd_extract(args) -> int:
    return _cmd_single(args, MODE_LLM)


def _cmd_baseline(args) -> int:
    return _cmd_single(args, MODE_BASELINE)


def _cmd_batch(args) -> int:
    config = load_config(args.config)
    client = _resolve_client(args, config, required=args.mode in (MODE_LLM, "both"))
    episodes = _load_episodes(Path(args.input))
    store = PreviewStore(args.store if args.store else config.store_path)
    done = failed = 0
    for job in run_worker(episodes, config, client=client, store=store, mode=args.mode):
        if job.state == "done":
            done += 1
        else:
            failed += 1
            _print_failed(job)
    print(f"{done} done, {failed} failed, {store.active_count()} active records in {store.path}")
    return 1 if failed else 0


def _cmd_eval_build(args) -> int:
    config = load_config(args.config)
    store = PreviewStore(args.store if args.store else config.store_path)
    by_episode: dict[str, dict[str, dict]] = {}
    for record in store.active_records():
        by_episode.setdefault(record["episode_id"], {})[record["system"]] = record
    pairs = []
    for episode_id in sorted(by_episode):
        records = by_episode[episode_id]
        if SYSTEM_LLM in records and SYSTEM_BASELINE in records:
            pairs.append((span_from_record(records[SYSTEM_LLM]), span_from_record(records[SYSTEM_BASELINE])))
    if not pairs:
        raise _UsageError(f"store {store.path} holds no episodes with both llm and baseline previews")
    episodes = None
    if args.episodes:
        episodes = {e.episode_id: e for e in _load_episodes(Path(args.episodes))}
    items = build_campaign(pairs, seed=args.seed, episodes=episodes)
    export_campaign(items, args.out, args.key)
    print(f"{len(items)} items -> {args.out} (key: {args.key})")
    return 0


def _cmd_eval_stats(args) -> int:
    items = import_campaign(args.items, args.key)
    judgments = read_judgments(args.judgments)
    stats = summarize_campaign(items, judgments, convention=args.convention)
    if args.json:
        print(json.dumps(stats_to_dict(stats), indent=2))
    else:
        print(format_stats_table(stats, alpha=args.alpha))
    return 0


def _cmd_serve(args) -> int:
    serve(load_config(args.config), host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="podpreview", description="Podcast preview extraction")
    parser.add_argument("--config", help="TOML or JSON configuration file")
    sub = parser.add_subparsers(dest="command", required=True)

    p_extract = sub.add_parser("extract", help="LLM preview for one episode file")
    p_extract.add_argument("episode", help="episode JSON file")
    p_extract.add_argument("--mock-llm", help="scripted completion responses (JSON file)")
    p_extract.set_defaults(func=_cmd_extract)

    p_baseline = sub.add_parser("baseline", help="signal-fusion preview for one episode file")
    p_baseline.add_argument("episode", help="episode JSON file")
    p_baseline.set_defaults(func=_cmd_baseline)

    p_batch = sub.add_parser("batch", help="process many episodes into the store")
    p_batch.add_argument("input", help="directory of *.json episodes, a .jsonl file, or one .json file")
    p_batch.add_argument("--mode", choices=_MODES, default=MODE_LLM)
    p_batch.add_argument("--mock-llm", help="scripted completion responses (JSON file)")
    p_batch.add_argument("--store", help="store path (default from config)")
    p_batch.set_defaults(func=_cmd_batch)

    p_eval = sub.add_parser("eval", help="evaluation campaigns and statistics")
    eval_sub = p_eval.add_subparsers(dest="eval_command", required=True)

    p_build = eval_sub.add_parser("build", help="export a blind A/B campaign from the store")
    p_build.add_argument("--store", help="store path (default from config)")
    p_build.add_argument("--out", default="campaign_items.jsonl", help="blind items JSONL")
    p_build.add_argument("--key", default="campaign_key.json", help="unblinding key JSON")
    p_build.add_argument("--seed", type=int, default=0, help="shuffle seed")
    p_build.add_argument("--episodes", help="episode files to fill item metadata from")
    p_build.set_defaults(func=_cmd_eval_build)

    p_stats = eval_sub.add_parser("stats", help="summarize judgments for a campaign")
    p_stats.add_argument("judgments", help="judgments JSONL file")
    p_stats.add_argument("--items", default="campaign_items.jsonl", help="blind items JSONL")
    p_stats.add_argument("--key", default="campaign_key.json", help="unblinding key JSON")
    p_stats.add_argument(
        "--convention", choices=(TIES_EXCLUDED, TIES_INCLUDED), default=TIES_EXCLUDED,
        help="tie handling for the binomial test",
    )
    p_stats.add_argument("--alpha", type=float, default=0.001, help="significance level")
    p_stats.add_argument("--json", action="store_true", help="emit JSON instead of the table")
    p_stats.set_defaults(func=_cmd_eval_stats)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename or exc}", file=sys.stderr)
        return 2
    except (json.JSONDecodeError, ValueError) as exc:
        print(f"error: bad input: {exc}", file=sys.stderr)
        return 2
    except PodPreviewError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
