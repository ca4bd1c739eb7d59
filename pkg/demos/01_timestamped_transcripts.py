"""
Timestamped transcripts: sentencize, render, parse
==================================================

"""

# Transcription services hand back word-level timings. The transcript module
# groups those words into sentences and renders them in the bracketed line
# format the rest of the toolkit consumes.

from podpreview import Word, parse_timestamped, render_timestamped, sentencize

words = []
cursor = 0.4
for token in (
    "Welcome back to the show. I'm here with Dr. Alvarez. "
    "Today we ask: can anyone learn to notice they are dreaming? "
    "Stick around!"
).split():
    words.append(Word(text=token, start_s=cursor, end_s=cursor + 0.3))
    cursor += 0.35

t = sentencize(words, episode_id="demo-001")

# Boundaries fall after '.', '!' or '?', but honorifics like "Dr." are kept
# inside their sentence, so the greeting splits into three sentences, not four.
for sentence in t.sentences:
    print(f"{sentence.index}: [{sentence.start_s:.2f} .. {sentence.end_s:.2f}] {sentence.text}")

# The wire format puts both timestamps, rounded to hundredths, in front of
# each sentence.
rendered = render_timestamped(t)
print()
print(rendered)

# Rounding is half-up at the second decimal, the convention the rest of the
# pipeline (and the prompt the model sees) relies on.
from podpreview import Sentence, SentencizedTranscript

tricky = SentencizedTranscript(
    episode_id="demo-rounding",
    sentences=(Sentence(index=0, text="Half a hundredth rounds up.", start_s=130.125, end_s=133.0),),
)
print()
print(render_timestamped(tricky))

# Parsing the rendered text recovers the transcript to the 0.01 s the format
# encodes; a render/parse/render cycle is byte stable.
recovered = parse_timestamped(rendered, "demo-001")
assert render_timestamped(recovered) == rendered
print()
print(f"round trip preserved {len(recovered)} sentences byte for byte")
