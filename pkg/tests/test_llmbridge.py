import json
import math
import threading
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import REALITY_PAYLOAD, choice_payload, fenced
from podpreview import (
    AdmissionGate,
    CompletionRequest,
    MockClient,
    PreviewChoice,
    PreviewMetadata,
    RetryPolicy,
    ScriptedResponse,
    complete,
    load_mock_script,
    mock_client,
    parse_llm_output,
    serialize_choice,
)
from podpreview.errors import (
    AuthError,
    BudgetExceeded,
    Exhausted,
    InvalidSpan,
    NoJsonFound,
    OutputParseError,
    SchemaViolation,
)

OK = ScriptedResponse(text=fenced(choice_payload()))
FAIL = ScriptedResponse(error="transient")


def no_sleep(_):
    pass


# -- parsing ------------------------------------------------------------------


def test_parse_fenced_block():
    choice = parse_llm_output(fenced(REALITY_PAYLOAD))
    assert choice.preview_start_s == 120.5
    assert choice.preview_end_s == 181.0
    assert choice.metadata.episode_theme == REALITY_PAYLOAD["episode_theme"]
    assert choice.metadata.preview_title == "Does Reality Testing Work?"
    assert choice.metadata.hashtags == (
        "#LucidDreamingHacks",
        "#RealityTestingDreams",
        "#DreamScience",
    )


def test_parse_bare_json():
    assert parse_llm_output(json.dumps(choice_payload())).preview_start_s == 60.0


def test_parse_json_embedded_in_prose():
    text = "Sure! Here is my selection: " + json.dumps(choice_payload()) + " Hope that helps."
    assert parse_llm_output(text).preview_end_s == 120.0


def test_parse_prefers_first_fenced_block():
    text = fenced(choice_payload(start_s=10.0)) + "\n" + fenced(choice_payload(start_s=99.0))
    assert parse_llm_output(text).preview_start_s == 10.0


def test_parse_no_json():
    with pytest.raises(NoJsonFound):
        parse_llm_output("I could not find a good preview, sorry.")


def test_parse_missing_field_names_it():
    payload = choice_payload()
    del payload["preview_title"]
    with pytest.raises(SchemaViolation) as err:
        parse_llm_output(fenced(payload))
    assert err.value.field == "preview_title"


def test_parse_rejects_bool_as_number():
    with pytest.raises(SchemaViolation) as err:
        parse_llm_output(fenced(choice_payload(start_s=True)))
    assert err.value.field == "preview_start_s"


def test_parse_rejects_non_finite():
    text = fenced(choice_payload()).replace("60.0", "NaN")
    with pytest.raises(SchemaViolation):
        parse_llm_output(text)


def test_parse_rejects_string_timestamps():
    with pytest.raises(SchemaViolation):
        parse_llm_output(fenced(choice_payload(end_s="120")))


def test_parse_inverted_span():
    with pytest.raises(InvalidSpan):
        parse_llm_output(fenced(choice_payload(start_s=200.0, end_s=100.0)))


def test_parse_normalizes_hashtags():
    payload = choice_payload(hashtags=["NoHash", "# spaced out", "#fine", "#"])
    choice = parse_llm_output(fenced(payload))
    assert choice.metadata.hashtags == ("#NoHash", "#spacedout", "#fine")


def test_parse_hashtags_must_be_list_of_strings():
    with pytest.raises(SchemaViolation):
        parse_llm_output(fenced(choice_payload(hashtags="nope")))
    with pytest.raises(SchemaViolation):
        parse_llm_output(fenced(choice_payload(hashtags=[1, 2])))


def test_serialize_parse_identity():
    choice = parse_llm_output(fenced(REALITY_PAYLOAD))
    assert parse_llm_output(serialize_choice(choice)) == choice


@given(
    start=st.floats(min_value=0, max_value=10_000, allow_nan=False),
    dur=st.floats(min_value=0.01, max_value=600, allow_nan=False),
    theme=st.text(max_size=40),
    title=st.text(min_size=1, max_size=40).filter(str.strip),
    tags=st.lists(st.from_regex(r"#[A-Za-z0-9]{1,12}", fullmatch=True), max_size=4),
)
@settings(deadline=None, max_examples=150)
def test_serialize_parse_identity_property(start, dur, theme, title, tags):
    choice = PreviewChoice(
        preview_start_s=start,
        preview_end_s=start + dur,
        metadata=PreviewMetadata(
            episode_theme=theme,
            preview_title=title,
            preview_explanation="x",
            hashtags=tuple(tags),
        ),
    )
    assert parse_llm_output(serialize_choice(choice)) == choice


@given(st.text(max_size=300))
@settings(deadline=None, max_examples=300)
def test_parse_is_total(text):
    try:
        choice = parse_llm_output(text)
    except OutputParseError:
        return
    assert choice.preview_start_s < choice.preview_end_s


def test_metadata_validation():
    with pytest.raises(SchemaViolation):
        PreviewMetadata(episode_theme="t", preview_title="", preview_explanation="e")
    with pytest.raises(SchemaViolation):
        PreviewMetadata(episode_theme="t", preview_title="T", preview_explanation="e", hashtags=("bad tag",))


# -- completion & retry -------------------------------------------------------------


def make_request():
    return CompletionRequest(system="sys", user="user")


def test_complete_first_try():
    client = MockClient([OK])
    result = complete(client, make_request(), sleep=no_sleep)
    assert result.attempt == 1
    assert client.calls == 1


def test_complete_retries_then_succeeds():
    client = MockClient([FAIL, FAIL, OK])
    result = complete(client, make_request(), RetryPolicy(max_attempts=3), sleep=no_sleep)
    assert result.attempt == 3
    assert client.calls == 3


def test_complete_exhausts():
    client = MockClient([FAIL])
    with pytest.raises(Exhausted) as err:
        complete(client, make_request(), RetryPolicy(max_attempts=2), sleep=no_sleep)
    assert err.value.attempts == 2
    assert client.calls == 2
    assert "transient" in str(err.value.cause)


def test_auth_error_not_retried():
    client = MockClient([ScriptedResponse(error="auth"), OK])
    with pytest.raises(AuthError):
        complete(client, make_request(), sleep=no_sleep)
    assert client.calls == 1


def test_permanent_error_not_retried():
    client = MockClient([ScriptedResponse(error="permanent"), OK])
    with pytest.raises(Exception) as err:
        complete(client, make_request(), sleep=no_sleep)
    assert "permanent" in str(err.value)
    assert client.calls == 1


def test_retry_call_count_matches_first_success():
    for first_success in range(1, 4):
        script = [FAIL] * (first_success - 1) + [OK]
        client = MockClient(script)
        complete(client, make_request(), RetryPolicy(max_attempts=5), sleep=no_sleep)
        assert client.calls == first_success


def test_backoff_delays_grow():
    delays = []
    client = MockClient([FAIL, FAIL, OK])
    policy = RetryPolicy(max_attempts=3, base_delay_s=0.5, multiplier=2.0, jitter_frac=0.0)
    complete(client, make_request(), policy, sleep=delays.append)
    assert delays == [0.5, 1.0]


def test_scripted_latency_is_honored():
    client = MockClient([ScriptedResponse(text=OK.text, latency_s=0.01)])
    result = complete(client, make_request(), sleep=no_sleep)
    assert result.latency_s >= 0.01


def test_mock_repeats_last_entry():
    client = mock_client([OK])
    for _ in range(3):
        assert client.send(make_request()) == OK.text
    assert client.calls == 3


def test_budget_strict():
    client = MockClient([OK])
    with pytest.raises(BudgetExceeded):
        complete(client, make_request(), token_budget=1, strict_budget=True, sleep=no_sleep)
    assert client.calls == 0


def test_budget_lenient_warns_but_proceeds(caplog):
    client = MockClient([OK])
    result = complete(client, make_request(), token_budget=1, strict_budget=False, sleep=no_sleep)
    assert result.attempt == 1


def test_temperature_bounds():
    with pytest.raises(ValueError):
        CompletionRequest(system="s", user="u", temperature=2.5)


def test_admission_gate_caps_in_flight():
    gate = AdmissionGate(limit=3)
    client = MockClient([ScriptedResponse(text=OK.text, latency_s=0.02)])
    threads = [
        threading.Thread(target=lambda: complete(client, make_request(), gate=gate, sleep=no_sleep))
        for _ in range(12)
    ]
    for thread in threads:
        thread.start()
    for thread in threads:
        thread.join()
    assert client.calls == 12
    assert client.max_in_flight <= 3


def test_load_mock_script(tmp_path):
    path = tmp_path / "script.json"
    path.write_text(json.dumps([{"text": "hello"}, {"error": "transient", "latency_s": 0.5}]))
    script = load_mock_script(path)
    assert script[0] == ScriptedResponse(text="hello")
    assert script[1].error == "transient"
    assert script[1].latency_s == 0.5
