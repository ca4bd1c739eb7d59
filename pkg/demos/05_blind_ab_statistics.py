"""
Blind A/B campaigns and their statistics
========================================

"""

# To compare two preview systems fairly, annotators must not know which
# system produced which clip. evallab shuffles each pair into anonymous
# slots with a seeded coin, exports only neutral fields, and unblinds at
# summary time.

import random
import tempfile
from pathlib import Path

from podpreview import (
    PreviewSpan,
    binomial_two_sided,
    build_campaign,
    export_campaign,
    format_stats_table,
    summarize_campaign,
    two_proportion_z,
)
from podpreview.evallab import Judgment

rng = random.Random(7)
pairs = []
for i in range(200):
    eid = f"ep{i:03d}"
    a = 60.0 * rng.randrange(0, 5)
    b = 60.0 * rng.randrange(5, 10)
    pairs.append(
        (
            PreviewSpan(episode_id=eid, start_s=a, end_s=a + 60.0, first_sentence=0, last_sentence=9, system="llm"),
            PreviewSpan(episode_id=eid, start_s=b, end_s=b + 60.0, first_sentence=10, last_sentence=19, system="baseline"),
        )
    )

items = build_campaign(pairs, seed=99)

# What annotators see: two slots, no system names, no seed. The unblinding
# key goes in a separate file that never leaves the operator's machine.
with tempfile.TemporaryDirectory() as tmp:
    items_path = Path(tmp) / "items.jsonl"
    export_campaign(items, items_path, Path(tmp) / "key.json")
    print("first exported item:")
    print(items_path.read_text().splitlines()[0])
print()

# Simulate annotators who genuinely like the llm clips better. Note the
# simulation has to look up the hidden assignment to express that taste,
# exactly the lookup a human rater cannot perform.
judgments = []
for item in items:
    roll = rng.random()
    if roll < 0.50:
        preferred = f"preview_{item.hidden_assignment}"
    elif roll < 0.77:
        preferred = f"preview_{3 - item.hidden_assignment}"
    else:
        preferred = "tie"
    yes_prob = {item.hidden_assignment: 0.82, 3 - item.hidden_assignment: 0.55}
    answers = {slot: tuple(rng.random() < p for _ in range(3)) for slot, p in yes_prob.items()}
    judgments.append(
        Judgment(item_id=item.item_id, preferred=preferred, answers_1=answers[1], answers_2=answers[2])
    )

stats = summarize_campaign(items, judgments)
print(format_stats_table(stats))

# The pieces are available on their own as well. The win/loss test is an
# exact two-sided binomial against a fair coin, computed in rational
# arithmetic; the per-question tests are pooled two-proportion z-tests.
p = binomial_two_sided(stats.llm_wins, stats.llm_wins + stats.ml_wins)
print(f"exact binomial, ties excluded: p = {p:.3g}")

z = two_proportion_z(140, 200, 110, 200)
print(f"two-proportion z for 140/200 vs 110/200: z = {z.z:.3f}, p = {z.p:.3g}")
