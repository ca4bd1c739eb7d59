"""
Preview extraction with a scripted model
========================================

"""

# End to end, one episode: assemble the prompts, call a completion client,
# parse the structured output, and snap the chosen segment to sentence
# boundaries. A MockClient stands in for the real endpoint, so this runs
# offline and deterministically.

import json

from podpreview import (
    CompletionRequest,
    Episode,
    MockClient,
    ScriptedResponse,
    Sentence,
    assemble_prompts,
    parse_llm_output,
    select_llm_preview,
    span_to_record,
    transcript_for,
)

sentences = tuple(
    Sentence(index=i, text=f"Sentence {i} of the interview.", start_s=6.5 * i, end_s=6.5 * i + 6.0)
    for i in range(40)
)
episode = Episode(episode_id="demo-140", title="A Long Interview", language_tags=("en",), sentences=sentences)
t = transcript_for(episode)

bundle = assemble_prompts(episode, t)

# The scripted reply wraps its JSON in a code fence, as real models tend to.
# Note the start timestamp 121.9: it is NOT a sentence boundary.
reply = {
    "preview_start_s": 121.9,
    "preview_end_s": 185.0,
    "episode_theme": "A winding conversation that finds its hook late",
    "preview_title": "The Part Worth Hearing",
    "preview_explanation": "The guest finally says the quiet part out loud.",
    "hashtags": ["#Interviews", "#Podcasting"],
}
client = MockClient([ScriptedResponse(text="```json\n" + json.dumps(reply) + "\n```")])

text = client.send(CompletionRequest(system=bundle.system_prompt, user=bundle.user_prompt))
choice = parse_llm_output(text)
print(f"model chose [{choice.preview_start_s}, {choice.preview_end_s}]  title={choice.metadata.preview_title!r}")

# select_llm_preview snaps the start to the nearest sentence start (123.5
# here, a drift of 1.6 s) and re-derives the end from the window rule; the
# model's own end timestamp is ignored on purpose.
span = select_llm_preview(t, choice)
print(f"aligned span  [{span.start_s}, {span.end_s}]  sentences {span.first_sentence}..{span.last_sentence}")
print(f"snap drift    {span.snap_drift_s:.2f} s (warning: {span.drift_warning})")

# The persisted record carries the span, the drift, and the metadata.
print()
print(json.dumps(span_to_record(span, created_at=0.0), indent=2))
