"""Blind A/B evaluation campaigns and their significance statistics.

A campaign pairs two previews per episode, hides which system produced which
slot behind a seeded coin flip, and exports the items without the assignment
(kept in a separate key file). Ingested judgments are unblinded and reduced
to win/tie/loss counts, an exact binomial preference test, and per-question
two-proportion z-tests.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

from .errors import InvalidCounts, MismatchedEpisode, UnknownItem
from .selector import SYSTEM_BASELINE, SYSTEM_LLM, PreviewSpan
from .transcript import Episode

PREFER_PREVIEW_1 = "preview_1"
PREFER_PREVIEW_2 = "preview_2"
PREFER_TIE = "tie"
_PREFERRED_VALUES = (PREFER_PREVIEW_1, PREFER_PREVIEW_2, PREFER_TIE)

TIES_EXCLUDED = "exclude"
TIES_INCLUDED = "include"
_TIE_CONVENTIONS = (TIES_EXCLUDED, TIES_INCLUDED)

QUESTION_LABELS = (
    "Q1: Understandability",
    "Q2: Contextual clarity",
    "Q3: Interest level",
)

DEFAULT_ALPHA = 0.001


# -- domain types ---------------------------------------------------------------


@dataclass(frozen=True)
class EvaluationItem:
    """One blind A/B comparison: two previews of the same episode."""

    item_id: str
    title: str
    description: str
    show_name: str
    preview_1: PreviewSpan
    preview_2: PreviewSpan
    hidden_assignment: int  # slot (1 or 2) holding the llm preview
    shuffle_seed: int

    def __post_init__(self):
        if self.hidden_assignment not in (1, 2):
            raise ValueError(f"hidden_assignment must be 1 or 2, got {self.hidden_assignment}")
        if self.preview_1.episode_id != self.preview_2.episode_id:
            raise MismatchedEpisode(
                f"item {self.item_id!r} pairs previews from different episodes: "
                f"{self.preview_1.episode_id!r} vs {self.preview_2.episode_id!r}"
            )

    @property
    def episode_id(self) -> str:
        return self.preview_1.episode_id


@dataclass(frozen=True)
class Judgment:
    """An evaluator's verdict on one item; answers are per-slot yes/no triples."""

    item_id: str
    preferred: str
    answers_1: tuple[bool, bool, bool] = (False, False, False)
    answers_2: tuple[bool, bool, bool] = (False, False, False)

    def __post_init__(self):
        if self.preferred not in _PREFERRED_VALUES:
            raise ValueError(f"preferred must be one of {_PREFERRED_VALUES}, got {self.preferred!r}")
        for name in ("answers_1", "answers_2"):
            answers = tuple(bool(a) for a in getattr(self, name))
            if len(answers) != 3:
                raise ValueError(f"{name} needs exactly 3 booleans, got {len(answers)}")
            object.__setattr__(self, name, answers)


@dataclass(frozen=True)
class ZTestResult:
    z: float
    p: float
    degenerate: bool = False


@dataclass(frozen=True)
class CampaignStats:
    """Unblinded campaign counts plus the significance tests over them."""

    n_items: int
    llm_wins: int
    ml_wins: int
    ties: int
    win_rate: float
    win_or_tie_rate: float
    binomial_p: float | None
    questions: tuple[ZTestResult, ZTestResult, ZTestResult]
    tie_convention: str = TIES_EXCLUDED
    unanswered: int = 0
    duplicate_judgments: int = 0
    no_informative: bool = False

    def __post_init__(self):
        if self.llm_wins + self.ml_wins + self.ties != self.n_items:
            raise InvalidCounts(
                f"wins {self.llm_wins} + losses {self.ml_wins} + ties {self.ties} "
                f"must equal n_items {self.n_items}"
            )


# -- campaign construction ----------------------------------------------------------


def build_campaign(
    pairs: Sequence[tuple[PreviewSpan, PreviewSpan]],
    seed: int,
    episodes: Mapping[str, Episode] | None = None,
) -> list[EvaluationItem]:
    """Assign each (llm, ml) pair to shuffled slots with a seeded fair coin.

    Deterministic given the seed. Episode title/description/show_name are
    filled from the optional episodes mapping.
    """
    rng = random.Random(seed)
    items = []
    for i, (llm_span, ml_span) in enumerate(pairs):
        if llm_span.episode_id != ml_span.episode_id:
            raise MismatchedEpisode(
                f"pair {i} mixes episodes {llm_span.episode_id!r} and {ml_span.episode_id!r}"
            )
        assignment = 1 if rng.random() < 0.5 else 2
        preview_1, preview_2 = (llm_span, ml_span) if assignment == 1 else (ml_span, llm_span)
        episode = (episodes or {}).get(llm_span.episode_id)
        items.append(
            EvaluationItem(
                item_id=f"item-{i:05d}",
                title=episode.title if episode else "",
                description=episode.description if episode else "",
                show_name=episode.show_name if episode else "",
                preview_1=preview_1,
                preview_2=preview_2,
                hidden_assignment=assignment,
                shuffle_seed=seed,
            )
        )
    return items


# -- statistics ---------------------------------------------------------------------


def _check_counts(k: int, n: int) -> None:
    if n < 1:
        raise InvalidCounts(f"need n >= 1, got {n}")
    if not 0 <= k <= n:
        raise InvalidCounts(f"need 0 <= k <= n, got k={k}, n={n}")


def binomial_two_sided(k: int, n: int) -> float:
    """Exact two-sided binomial p-value against a fair coin.

    Sums the probability of every outcome whose point mass does not exceed
    that of k, in exact rational arithmetic, so no floating error enters
    before the final division.
    """
    _check_counts(k, n)
    target = math.comb(n, k)
    mass = sum(math.comb(n, j) for j in range(n + 1) if math.comb(n, j) <= target)
    return min(1.0, float(Fraction(mass, 2**n)))


def binomial_two_sided_normal(k: int, n: int) -> float:
    """Normal approximation of binomial_two_sided, with continuity correction."""
    _check_counts(k, n)
    deviation = abs(k - n / 2.0) - 0.5
    if deviation <= 0:
        return 1.0
    z = deviation / math.sqrt(n / 4.0)
    return min(1.0, math.erfc(z / math.sqrt(2.0)))


def two_proportion_z(k1: int, n1: int, k2: int, n2: int) -> ZTestResult:
    """Pooled two-proportion z-test, two-sided.

    A pooled proportion of exactly 0 or 1 has no variance to test against;
    the result is flagged degenerate with z = 0, p = 1.
    """
    _check_counts(k1, n1)
    _check_counts(k2, n2)
    pooled = (k1 + k2) / (n1 + n2)
    if pooled <= 0.0 or pooled >= 1.0:
        return ZTestResult(z=0.0, p=1.0, degenerate=True)
    se = math.sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2))
    z = (k1 / n1 - k2 / n2) / se
    return ZTestResult(z=z, p=min(1.0, math.erfc(abs(z) / math.sqrt(2.0))), degenerate=False)


def summarize_campaign(
    items: Sequence[EvaluationItem],
    judgments: Sequence[Judgment],
    convention: str = TIES_EXCLUDED,
) -> CampaignStats:
    """Unblind judgments and compute campaign statistics.

    Duplicate judgments for an item keep the first and are counted; items
    without any judgment are excluded and counted as unanswered. Under the
    default convention ties are excluded from the binomial test (wins vs
    losses); "include" tests wins against all judged items.
    """
    if convention not in _TIE_CONVENTIONS:
        raise ValueError(f"convention must be one of {_TIE_CONVENTIONS}, got {convention!r}")
    index = {item.item_id: item for item in items}
    judged: dict[str, Judgment] = {}
    duplicates = 0
    for judgment in judgments:
        if judgment.item_id not in index:
            raise UnknownItem(f"judgment references unknown item {judgment.item_id!r}")
        if judgment.item_id in judged:
            duplicates += 1
            continue
        judged[judgment.item_id] = judgment

    wins = losses = ties = 0
    llm_yes = [0, 0, 0]
    ml_yes = [0, 0, 0]
    for item_id, judgment in judged.items():
        item = index[item_id]
        llm_in_slot_1 = item.hidden_assignment == 1
        if judgment.preferred == PREFER_TIE:
            ties += 1
        elif (judgment.preferred == PREFER_PREVIEW_1) == llm_in_slot_1:
            wins += 1
        else:
            losses += 1
        llm_answers = judgment.answers_1 if llm_in_slot_1 else judgment.answers_2
        ml_answers = judgment.answers_2 if llm_in_slot_1 else judgment.answers_1
        for q in range(3):
            llm_yes[q] += llm_answers[q]
            ml_yes[q] += ml_answers[q]

    n_items = len(judged)
    n_binomial = wins + losses if convention == TIES_EXCLUDED else n_items
    no_informative = n_binomial == 0
    binomial_p = None if no_informative else binomial_two_sided(wins, n_binomial)
    if n_items == 0:
        questions = tuple(ZTestResult(z=0.0, p=1.0, degenerate=True) for _ in range(3))
    else:
        questions = tuple(
            two_proportion_z(llm_yes[q], n_items, ml_yes[q], n_items) for q in range(3)
        )
    return CampaignStats(
        n_items=n_items,
        llm_wins=wins,
        ml_wins=losses,
        ties=ties,
        win_rate=wins / n_items if n_items else 0.0,
        win_or_tie_rate=(wins + ties) / n_items if n_items else 0.0,
        binomial_p=binomial_p,
        questions=questions,  # type: ignore[arg-type]
        tie_convention=convention,
        unanswered=len(items) - n_items,
        duplicate_judgments=duplicates,
        no_informative=no_informative,
    )


# -- blind export / import -----------------------------------------------------------


def _neutral_preview_view(span: PreviewSpan) -> dict:
    """Only fields safe to show an evaluator: offsets and sentence range."""
    return {
        "start_s": span.start_s,
        "end_s": span.end_s,
        "first_sentence": span.first_sentence,
        "last_sentence": span.last_sentence,
    }


def export_campaign(items: Sequence[EvaluationItem], items_path: str | Path, key_path: str | Path) -> None:
    """Write blind items as JSONL and the unblinding key as a separate JSON file.

    The items file carries no hidden_assignment, no seed, and no per-system
    fields (system label, preview metadata, snap drift), since any of those
    would reveal which slot came from which pipeline.
    """
    items_path, key_path = Path(items_path), Path(key_path)
    with open(items_path, "w", encoding="utf-8") as fh:
        for item in items:
            fh.write(
                json.dumps(
                    {
                        "item_id": item.item_id,
                        "episode_id": item.episode_id,
                        "title": item.title,
                        "description": item.description,
                        "show_name": item.show_name,
                        "preview_1": _neutral_preview_view(item.preview_1),
                        "preview_2": _neutral_preview_view(item.preview_2),
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
    key = {
        "seed": items[0].shuffle_seed if items else None,
        "assignments": {item.item_id: item.hidden_assignment for item in items},
    }
    with open(key_path, "w", encoding="utf-8") as fh:
        json.dump(key, fh, indent=2)


def import_campaign(items_path: str | Path, key_path: str | Path) -> list[EvaluationItem]:
    """Rebuild evaluation items from a blind export plus its key file."""
    with open(key_path, encoding="utf-8") as fh:
        key = json.load(fh)
    assignments = key.get("assignments", {})
    seed = key.get("seed") or 0
    items = []
    with open(items_path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            item_id = record["item_id"]
            if item_id not in assignments:
                raise UnknownItem(f"key file has no assignment for item {item_id!r}")
            assignment = int(assignments[item_id])
            spans = {}
            for slot in (1, 2):
                view = record[f"preview_{slot}"]
                spans[slot] = PreviewSpan(
                    episode_id=record["episode_id"],
                    start_s=float(view["start_s"]),
                    end_s=float(view["end_s"]),
                    first_sentence=int(view["first_sentence"]),
                    last_sentence=int(view["last_sentence"]),
                    system=SYSTEM_LLM if slot == assignment else SYSTEM_BASELINE,
                )
            items.append(
                EvaluationItem(
                    item_id=item_id,
                    title=record.get("title", ""),
                    description=record.get("description", ""),
                    show_name=record.get("show_name", ""),
                    preview_1=spans[1],
                    preview_2=spans[2],
                    hidden_assignment=assignment,
                    shuffle_seed=int(seed),
                )
            )
    return items


def read_judgments(path: str | Path) -> list[Judgment]:
    """Read judgments from JSONL; unknown extra fields are ignored."""
    judgments = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            judgments.append(
                Judgment(
                    item_id=record["item_id"],
                    preferred=record["preferred"],
                    answers_1=tuple(record.get("preview_1_answers", (False, False, False))),
                    answers_2=tuple(record.get("preview_2_answers", (False, False, False))),
                )
            )
    return judgments


# -- reporting ----------------------------------------------------------------------


def stats_to_dict(stats: CampaignStats) -> dict:
    return {
        "n_items": stats.n_items,
        "llm_wins": stats.llm_wins,
        "ml_wins": stats.ml_wins,
        "ties": stats.ties,
        "win_rate": stats.win_rate,
        "win_or_tie_rate": stats.win_or_tie_rate,
        "binomial_p": stats.binomial_p,
        "tie_convention": stats.tie_convention,
        "unanswered": stats.unanswered,
        "duplicate_judgments": stats.duplicate_judgments,
        "no_informative": stats.no_informative,
        "questions": [
            {"label": label, "z": q.z, "p": q.p, "degenerate": q.degenerate}
            for label, q in zip(QUESTION_LABELS, stats.questions)
        ],
    }


def format_stats_table(stats: CampaignStats, alpha: float = DEFAULT_ALPHA) -> str:
    """Aligned plain-text report: counts, then one row per significance test."""
    lines = [
        "Campaign summary",
        f"  items judged     {stats.n_items}",
        f"  llm wins         {stats.llm_wins}",
        f"  ml wins          {stats.ml_wins}",
        f"  ties             {stats.ties}",
        f"  unanswered       {stats.unanswered}",
        f"  win rate         {stats.win_rate * 100:.1f}%",
        f"  win-or-tie rate  {stats.win_or_tie_rate * 100:.2f}%",
        "",
        f"{'Test':<28}{'Statistic':>12}{'P-value':>12}  LLM better",
        "-" * 64,
    ]
    if stats.binomial_p is None:
        binom_stat, binom_p, binom_better = "n/a", "n/a", "n/a"
    else:
        n_binomial = (
            stats.llm_wins + stats.ml_wins
            if stats.tie_convention == TIES_EXCLUDED
            else stats.n_items
        )
        binom_stat = f"{stats.llm_wins}/{n_binomial}"
        binom_p = f"{stats.binomial_p:.3g}"
        binom_better = "Yes" if stats.binomial_p < alpha and stats.llm_wins > stats.ml_wins else "No"
    lines.append(f"{'Preference (binomial)':<28}{binom_stat:>12}{binom_p:>12}  {binom_better}")
    for label, q in zip(QUESTION_LABELS, stats.questions):
        if q.degenerate:
            lines.append(f"{label:<28}{'n/a':>12}{'n/a':>12}  n/a")
        else:
            better = "Yes" if q.p < alpha and q.z > 0 else "No"
            lines.append(f"{label:<28}{q.z:>12.2f}{q.p:>12.3g}  {better}")
    return "\n".join(lines)
