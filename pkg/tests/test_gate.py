import pytest

from helpers import make_episode
from podpreview import filter_combined, filter_metadata, normalize_tag
from podpreview.errors import DetectorFailure


class StubDetector:
    def __init__(self, code="en", confidence=0.9, error=None):
        self.code = code
        self.confidence = confidence
        self.error = error
        self.calls = 0

    def detect(self, episode):
        self.calls += 1
        if self.error is not None:
            raise self.error
        return self.code, self.confidence


def test_normalize_tag():
    assert normalize_tag("en") == "en"
    assert normalize_tag("EN-us") == "en"
    assert normalize_tag(" en-GB ") == "en"
    assert normalize_tag("de-DE") == "de"
    assert normalize_tag("") == ""


def test_metadata_filter_accepts_english_variants():
    for tag in ("en", "en-US", "EN", "en-gb"):
        decision = filter_metadata(make_episode(language_tags=(tag,)))
        assert decision.eligible
        assert decision.matched_tag == tag


def test_metadata_filter_rejects_other_languages():
    decision = filter_metadata(make_episode(language_tags=("de", "fr-FR")))
    assert not decision.eligible
    assert decision.matched_tag is None


def test_metadata_filter_no_tags():
    assert not filter_metadata(make_episode(language_tags=())).eligible


def test_combined_short_circuits_on_metadata():
    detector = StubDetector()
    decision = filter_combined(make_episode(language_tags=("en-AU",)), detector)
    assert decision.eligible
    assert detector.calls == 0


def test_combined_falls_back_to_detector():
    detector = StubDetector(code="en", confidence=0.95)
    decision = filter_combined(make_episode(language_tags=("de",)), detector)
    assert decision.eligible
    assert detector.calls == 1


def test_combined_threshold_boundary():
    episode = make_episode(language_tags=())
    assert filter_combined(episode, StubDetector(confidence=0.8)).eligible
    assert not filter_combined(episode, StubDetector(confidence=0.79)).eligible


def test_combined_detector_language_must_be_english():
    decision = filter_combined(make_episode(language_tags=()), StubDetector(code="sv", confidence=0.99))
    assert not decision.eligible


def test_combined_detector_called_once():
    detector = StubDetector(code="de", confidence=0.9)
    filter_combined(make_episode(language_tags=()), detector)
    assert detector.calls == 1


def test_detector_exception_wrapped():
    detector = StubDetector(error=RuntimeError("model fell over"))
    with pytest.raises(DetectorFailure) as err:
        filter_combined(make_episode(episode_id="ep-3", language_tags=()), detector)
    assert err.value.episode_id == "ep-3"
    assert "model fell over" in str(err.value)


def test_detector_confidence_out_of_range():
    with pytest.raises(DetectorFailure):
        filter_combined(make_episode(language_tags=()), StubDetector(confidence=1.5))


def test_detector_region_suffix_normalized():
    decision = filter_combined(make_episode(language_tags=()), StubDetector(code="en-US", confidence=0.9))
    assert decision.eligible
