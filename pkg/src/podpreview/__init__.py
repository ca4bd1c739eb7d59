"""Podcast preview extraction: LLM selection, signal-fusion baseline, evaluation."""

from . import errors
from .baseline import (
    DEFAULT_AD_CUES,
    DEFAULT_LEXICON,
    KIND_AD,
    KIND_MUSIC,
    KIND_NON_SPEECH,
    KIND_OTHER,
    KIND_TOPIC_SENTIMENT,
    AdjustmentTable,
    BaselineConfig,
    CandidateFeatures,
    CandidateWindow,
    KeywordAdDetector,
    LexiconScorer,
    PrimaryAggregate,
    RankedCandidate,
    RankWeights,
    SelectivitySeries,
    SignalSpan,
    aggregate_primary,
    apply_secondary,
    default_detectors,
    default_scorers,
    empty_series,
    extract_baseline_preview,
    select_peaks,
    trim_and_rank,
)
from .config import AppConfig, ClientConfig, GateConfig, WorkerConfig, load_config
from .evallab import (
    CampaignStats,
    EvaluationItem,
    Judgment,
    ZTestResult,
    binomial_two_sided,
    binomial_two_sided_normal,
    build_campaign,
    export_campaign,
    format_stats_table,
    import_campaign,
    read_judgments,
    summarize_campaign,
    two_proportion_z,
)
from .gate import LanguageDecision, filter_combined, filter_metadata, normalize_tag
from .llmbridge import (
    AdmissionGate,
    CompletionRequest,
    CompletionResult,
    HttpCompletionClient,
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
from .promptkit import (
    FewShotExample,
    PreviewRequirements,
    PromptBundle,
    PromptConfig,
    assemble_prompts,
    build_system_prompt,
    build_user_prompt,
    estimate_tokens,
    load_prompt_config,
)
from .selector import (
    PreviewSpan,
    SnapResult,
    select_llm_preview,
    snap_start,
    span_from_record,
    span_to_record,
    trim_to_window,
)
from .service import create_app
from .store import PreviewStore
from .transcript import (
    Episode,
    Sentence,
    SentencizedTranscript,
    Word,
    episode_from_dict,
    episode_to_dict,
    format_timestamp,
    load_episode,
    parse_timestamped,
    render_timestamped,
    sentencize,
    transcript_for,
)
from .worker import Job, process_episode, run_worker

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_AD_CUES",
    "DEFAULT_LEXICON",
    "KIND_AD",
    "KIND_MUSIC",
    "KIND_NON_SPEECH",
    "KIND_OTHER",
    "KIND_TOPIC_SENTIMENT",
    "AdjustmentTable",
    "AdmissionGate",
    "AppConfig",
    "BaselineConfig",
    "ClientConfig",
    "GateConfig",
    "CampaignStats",
    "CandidateFeatures",
    "CandidateWindow",
    "CompletionRequest",
    "CompletionResult",
    "Episode",
    "EvaluationItem",
    "FewShotExample",
    "HttpCompletionClient",
    "Job",
    "Judgment",
    "KeywordAdDetector",
    "LanguageDecision",
    "LexiconScorer",
    "MockClient",
    "PreviewChoice",
    "PreviewMetadata",
    "PreviewRequirements",
    "PreviewSpan",
    "PreviewStore",
    "PrimaryAggregate",
    "PromptBundle",
    "PromptConfig",
    "RankWeights",
    "RankedCandidate",
    "RetryPolicy",
    "ScriptedResponse",
    "SelectivitySeries",
    "Sentence",
    "SentencizedTranscript",
    "SignalSpan",
    "SnapResult",
    "Word",
    "WorkerConfig",
    "ZTestResult",
    "aggregate_primary",
    "apply_secondary",
    "assemble_prompts",
    "binomial_two_sided",
    "binomial_two_sided_normal",
    "build_campaign",
    "build_system_prompt",
    "build_user_prompt",
    "complete",
    "create_app",
    "default_detectors",
    "default_scorers",
    "empty_series",
    "episode_from_dict",
    "episode_to_dict",
    "errors",
    "estimate_tokens",
    "export_campaign",
    "extract_baseline_preview",
    "filter_combined",
    "filter_metadata",
    "format_stats_table",
    "format_timestamp",
    "import_campaign",
    "load_config",
    "load_episode",
    "load_mock_script",
    "load_prompt_config",
    "mock_client",
    "normalize_tag",
    "parse_llm_output",
    "parse_timestamped",
    "process_episode",
    "read_judgments",
    "render_timestamped",
    "run_worker",
    "select_llm_preview",
    "select_peaks",
    "sentencize",
    "serialize_choice",
    "snap_start",
    "span_from_record",
    "span_to_record",
    "summarize_campaign",
    "transcript_for",
    "trim_and_rank",
    "trim_to_window",
    "two_proportion_z",
]
