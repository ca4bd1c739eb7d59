"""Prompt assembly for the LLM preview selector.

Builds the system prompt (role, step-by-step task, requirement list, numbered
few-shot examples) and the user prompt (output format, episode name and
description, timestamped transcript). Both templates are pure string
expansion, so identical inputs always produce byte-identical prompts.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .errors import (
    DuplicateRequirement,
    EmptyRequirements,
    InvalidFewShotExample,
    MissingTranscript,
    NoJsonFound,
    OutputParseError,
)
from .llmbridge import parse_llm_output
from .transcript import Episode, SentencizedTranscript, render_timestamped

DEFAULT_TARGET_DURATION_S = 60.0

DEFAULT_TASK_DESCRIPTION = (
    "selecting short, engaging preview segments from podcast episode transcripts"
)

DEFAULT_REASONING_TASK = (
    "to follow a step-by-step reasoning process: first identify the main topic "
    "of the episode from its name, description, and transcript; then evaluate "
    "candidate transcript segments for relevance to that topic and for listener "
    "engagement; then select the single best segment and report its start and "
    "end timestamps together with the requested metadata"
)

DEFAULT_FEW_SHOT_DESCRIPTION = "episodes together with a well-chosen preview"

DEFAULT_REQUIREMENT_TEXTS = (
    "The segment opens with an engaging introduction or hook.",
    "The segment follows a logical progression of ideas.",
    "The segment excludes ad content.",
    "The segment starts and concludes with complete thoughts.",
    "The segment aligns with the central theme of the episode.",
    "The segment is approximately one minute long.",
)

DEFAULT_OUTPUT_SPEC = """\
{
  "preview_start_s": "<number: start of the preview in seconds>",
  "preview_end_s": "<number: end of the preview in seconds>",
  "episode_theme": "<string: the central theme of the episode>",
  "preview_title": "<string: a short title for the preview>",
  "preview_explanation": "<string: why this segment works as a preview>",
  "hashtags": ["<string: hashtag starting with '#'>"]
}"""

TIMESTAMP_HEADER = "Start and end timestamps are in seconds."

# Line-leading tokens that delimit prompt sections; free text is escaped so
# these can never occur more than once per section.
SECTION_MARKERS = (
    "EPISODE NAME:",
    "EPISODE DESCRIPTION:",
    "TRANSCRIPT:",
    "OUTPUT:",
    "Example #",
)


@dataclass(frozen=True)
class PreviewRequirements:
    """Ordered requirement list handed to the model, plus the duration target."""

    texts: tuple[str, ...] = DEFAULT_REQUIREMENT_TEXTS
    target_duration_s: float = DEFAULT_TARGET_DURATION_S

    def __post_init__(self):
        object.__setattr__(self, "texts", tuple(self.texts))
        if not self.texts:
            raise EmptyRequirements("requirement list must be non-empty")
        for text in self.texts:
            if not text.strip():
                raise EmptyRequirements("requirement strings must be non-empty")
        seen = set()
        for text in self.texts:
            if text in seen:
                raise DuplicateRequirement(f"duplicate requirement: {text!r}")
            seen.add(text)
        if self.target_duration_s <= 0:
            raise ValueError(f"target_duration_s must be positive, got {self.target_duration_s}")

    def __iter__(self):
        return iter(self.texts)


@dataclass(frozen=True)
class FewShotExample:
    """A curated episode plus the preview output the model should imitate."""

    episode_title: str
    episode_description: str
    transcript_excerpt: str
    expected_output: str

    def __post_init__(self):
        try:
            parse_llm_output(self.expected_output)
        except OutputParseError as exc:
            raise InvalidFewShotExample(
                f"expected_output for {self.episode_title!r} does not parse: {exc}"
            ) from exc


@dataclass(frozen=True)
class PromptBundle:
    """Assembled prompts; token_estimate covers system and user together."""

    system_prompt: str
    user_prompt: str
    token_estimate: int


@dataclass(frozen=True)
class PromptConfig:
    """Operator-tunable prompt content, loadable from JSON or TOML."""

    task_description: str = DEFAULT_TASK_DESCRIPTION
    reasoning_task: str = DEFAULT_REASONING_TASK
    requirements: PreviewRequirements = field(default_factory=PreviewRequirements)
    few_shot: tuple[FewShotExample, ...] = ()
    output_spec: str = DEFAULT_OUTPUT_SPEC

    def __post_init__(self):
        object.__setattr__(self, "few_shot", tuple(self.few_shot))


def contain_markers(text: str) -> str:
    """Escape lines of free text that would read as prompt section markers."""
    lines = text.split("\n")
    out = []
    for line in lines:
        if any(line.lstrip().startswith(marker) for marker in SECTION_MARKERS):
            out.append("\\" + line)
        else:
            out.append(line)
    return "\n".join(out)


def estimate_tokens(text: str) -> int:
    """Coarse token count: one token per four characters, rounded up."""
    return (len(text) + 3) // 4


def _render_example(example: FewShotExample) -> str:
    return (
        "EPISODE NAME:\n"
        f"{contain_markers(example.episode_title)}\n"
        "\n"
        "EPISODE DESCRIPTION:\n"
        f"{contain_markers(example.episode_description)}\n"
        "\n"
        "TRANSCRIPT:\n"
        f"{TIMESTAMP_HEADER}\n"
        "\n"
        f"{example.transcript_excerpt}\n"
        "\n"
        "OUTPUT:\n"
        f"{example.expected_output}"
    )


def build_system_prompt(
    task_description: str,
    requirements: PreviewRequirements | Sequence[str],
    examples: Sequence[FewShotExample] = (),
    *,
    reasoning_task: str = DEFAULT_REASONING_TASK,
    few_shot_description: str = DEFAULT_FEW_SHOT_DESCRIPTION,
) -> str:
    """Expand the system-prompt template.

    Sections appear in order: role statement, step-by-step task statement,
    bulleted requirements, then numbered "Example #N:" blocks (omitted
    entirely when there are no examples).
    """
    if not isinstance(requirements, PreviewRequirements):
        requirements = PreviewRequirements(texts=tuple(requirements))
    bullets = "\n".join(f"- {text}" for text in requirements)
    parts = [
        f"You are an expert in {task_description}.",
        "",
        f"Your task is {reasoning_task}.",
        "",
        "Below are requirements on the segment to be selected:",
        bullets,
    ]
    if examples:
        parts += ["", f"Below are examples of {few_shot_description}:"]
        for n, example in enumerate(examples, start=1):
            parts += ["", f"Example #{n}:", _render_example(example)]
    return "\n".join(parts)


def build_user_prompt(episode: Episode, transcript_text: str, output_spec: str) -> str:
    """Expand the user-prompt template around a rendered transcript.

    Every section marker appears exactly once; episode name and description
    are escaped so adversarial metadata cannot fabricate extra sections. The
    prompt ends with the final transcript line.
    """
    if not transcript_text.strip():
        raise MissingTranscript(f"episode {episode.episode_id!r} has no transcript text")
    return (
        "Provide the output in the following JSON format:\n"
        "\n"
        "```json\n"
        f"{output_spec}\n"
        "```\n"
        "\n"
        "EPISODE NAME:\n"
        f"{contain_markers(episode.title)}\n"
        "\n"
        "EPISODE DESCRIPTION:\n"
        f"{contain_markers(episode.description)}\n"
        "\n"
        "TRANSCRIPT:\n"
        f"{TIMESTAMP_HEADER}\n"
        "\n"
        f"{transcript_text}"
    )


def assemble_prompts(
    episode: Episode,
    transcript: SentencizedTranscript,
    config: PromptConfig = PromptConfig(),
) -> PromptBundle:
    """Build both prompts for an episode and estimate their size."""
    system = build_system_prompt(
        config.task_description,
        config.requirements,
        config.few_shot,
        reasoning_task=config.reasoning_task,
    )
    user = build_user_prompt(episode, render_timestamped(transcript), config.output_spec)
    return PromptBundle(
        system_prompt=system,
        user_prompt=user,
        token_estimate=estimate_tokens(system) + estimate_tokens(user),
    )


def load_prompt_config(path: str | Path) -> PromptConfig:
    """Load prompt content from a JSON or TOML file.

    Recognized keys (all optional): task_description, reasoning_task,
    requirements (list of strings), target_duration_s, few_shot (list of
    objects with episode_title, episode_description, transcript_excerpt,
    expected_output), output_spec.
    """
    path = Path(path)
    if path.suffix.lower() == ".toml":
        if sys.version_info >= (3, 11):
            import tomllib
        else:
            import tomli as tomllib
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    else:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    if not isinstance(raw, dict):
        raise NoJsonFound(f"{path} must hold a single configuration object")

    kwargs: dict = {}
    if "task_description" in raw:
        kwargs["task_description"] = raw["task_description"]
    if "reasoning_task" in raw:
        kwargs["reasoning_task"] = raw["reasoning_task"]
    req_kwargs: dict = {}
    if "requirements" in raw:
        req_kwargs["texts"] = tuple(raw["requirements"])
    if "target_duration_s" in raw:
        req_kwargs["target_duration_s"] = float(raw["target_duration_s"])
    if req_kwargs:
        kwargs["requirements"] = PreviewRequirements(**req_kwargs)
    if "few_shot" in raw:
        kwargs["few_shot"] = tuple(
            FewShotExample(
                episode_title=entry["episode_title"],
                episode_description=entry["episode_description"],
                transcript_excerpt=entry["transcript_excerpt"],
                expected_output=entry["expected_output"],
            )
            for entry in raw["few_shot"]
        )
    if "output_spec" in raw:
        kwargs["output_spec"] = raw["output_spec"]
    return PromptConfig(**kwargs)
