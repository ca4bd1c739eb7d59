"""Builders shared across test modules."""

from __future__ import annotations

import json

from podpreview import Episode, MockClient, Sentence, SentencizedTranscript
from podpreview.errors import CompletionError

REALITY_PAYLOAD = {
    "preview_start_s": 120.5,
    "preview_end_s": 181.0,
    "episode_theme": "Unlocking Lucid Dreaming: Methods, Science, and Benefits",
    "preview_title": "Does Reality Testing Work?",
    "preview_explanation": (
        'Learn how Australian psychologist Dr. Denham Adventure-Heart uses "reality testing" '
        "to induce lucid dreaming and the surprising results of his 350-person study."
    ),
    "hashtags": ["#LucidDreamingHacks", "#RealityTestingDreams", "#DreamScience"],
}


def transcript_from(bounds, episode_id="ep"):
    sentences = tuple(
        Sentence(index=i, text=f"Sentence number {i}.", start_s=float(s), end_s=float(e))
        for i, (s, e) in enumerate(bounds)
    )
    return SentencizedTranscript(episode_id=episode_id, sentences=sentences)


def uniform_bounds(n, length_s=6.0, gap_s=0.5, start_s=0.0):
    bounds = []
    t = start_s
    for _ in range(n):
        bounds.append((t, t + length_s))
        t += length_s + gap_s
    return bounds


def make_episode(
    n_sentences=40,
    episode_id="ep",
    length_s=6.0,
    gap_s=0.5,
    texts=None,
    language_tags=("en",),
    title="A Test Episode",
    description="About testing.",
    show_name="Testing Show",
):
    bounds = uniform_bounds(n_sentences, length_s, gap_s)
    sentences = tuple(
        Sentence(
            index=i,
            text=texts[i] if texts else f"Sentence number {i}.",
            start_s=s,
            end_s=e,
        )
        for i, (s, e) in enumerate(bounds)
    )
    return Episode(
        episode_id=episode_id,
        title=title,
        description=description,
        show_name=show_name,
        language_tags=tuple(language_tags),
        sentences=sentences,
    )


def choice_payload(start_s=60.0, end_s=120.0, **overrides):
    payload = {
        "preview_start_s": start_s,
        "preview_end_s": end_s,
        "episode_theme": "Testing",
        "preview_title": "A Preview",
        "preview_explanation": "Because.",
        "hashtags": ["#testing"],
    }
    payload.update(overrides)
    return payload


def fenced(payload):
    return "```json\n" + json.dumps(payload) + "\n```"


class KeyedClient(MockClient):
    """Mock that fails any request whose prompt carries a marked episode title."""

    def __init__(self, script, marker="FAIL-ME"):
        super().__init__(script)
        self.marker = marker

    def send(self, request):
        text = super().send(request)
        if self.marker in request.user:
            raise CompletionError("scripted failure for marked episode")
        return text
