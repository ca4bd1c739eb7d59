"""
Prompt assembly for preview extraction
======================================

"""

# The promptkit module turns an episode and its sentencized transcript into
# the two prompts sent to a completion model: a system prompt holding the
# task, the requirements checklist, and optional few-shot examples, and a
# user prompt holding the episode metadata plus the timestamped transcript.

import json

from podpreview import (
    Episode,
    FewShotExample,
    PromptConfig,
    Sentence,
    assemble_prompts,
    transcript_for,
)

sentences = tuple(
    Sentence(index=i, text=text, start_s=10.0 * i, end_s=10.0 * i + 8.0)
    for i, text in enumerate(
        [
            "Welcome to Deep Currents, the show about ocean science.",
            "This episode is brought to you by Wavely, use code CURRENT.",
            "Our guest this week mapped a reef nobody knew existed.",
            "She found it by listening for snapping shrimp.",
            "The payoff comes later: a whale call no database matched.",
        ]
    )
)
episode = Episode(
    episode_id="reef-042",
    title="The Reef That Wasn't on Any Map",
    description="Acoustic surveys, accidental discoveries, and one strange whale.",
    show_name="Deep Currents",
    language_tags=("en",),
    sentences=sentences,
)

# A few-shot example is a trimmed episode plus the exact output the model
# should imitate. Examples are validated at construction: expected_output
# must itself parse as a preview selection.
example_output = json.dumps(
    {
        "preview_start_s": 20.0,
        "preview_end_s": 80.0,
        "episode_theme": "Finding hidden reefs with sound",
        "preview_title": "The Reef Nobody Mapped",
        "preview_explanation": "A discovery story with a mystery sound at the end.",
        "hashtags": ["#OceanScience", "#ReefDiscovery"],
    }
)
config = PromptConfig(
    few_shot=(
        FewShotExample(
            episode_title="A Lake Under the Ice",
            episode_description="Drilling into subglacial water.",
            transcript_excerpt="[20.00 - 28.00] The drill hit water two days early.",
            expected_output=example_output,
        ),
    )
)

bundle = assemble_prompts(episode, transcript_for(episode), config)

print("system prompt")
print("-" * 60)
print(bundle.system_prompt)
print()
print("user prompt")
print("-" * 60)
print(bundle.user_prompt)
print()
print(f"token estimate for both prompts: {bundle.token_estimate}")
