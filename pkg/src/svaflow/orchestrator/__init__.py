"""LLM-driven generate, check and repair loop for assertions."""

from .backends import (
    BackendError,
    BackendUnavailable,
    ContextOverflow,
    FixturesExhausted,
    HttpBackend,
    LlmResponse,
    ReplayBackend,
    make_backend,
)
from .classify import classify_failure, reference_expects_pass
from .config import ConfigError, HttpSettings, SessionConfig, load_config
from .extract import extract_sva
from .prompts import FeedbackPayload, PayloadMismatch, PromptRecord, build_prompt
from .session import (
    AssertionState,
    RefinementSession,
    ResumeMismatch,
    SessionAborted,
    SessionError,
    check_assertion,
    load_session,
    run_session,
    strip_timestamps,
)

__all__ = [
    "AssertionState",
    "BackendError",
    "BackendUnavailable",
    "ConfigError",
    "ContextOverflow",
    "FeedbackPayload",
    "FixturesExhausted",
    "HttpBackend",
    "HttpSettings",
    "LlmResponse",
    "PayloadMismatch",
    "PromptRecord",
    "RefinementSession",
    "ReplayBackend",
    "ResumeMismatch",
    "SessionAborted",
    "SessionConfig",
    "SessionError",
    "build_prompt",
    "check_assertion",
    "classify_failure",
    "extract_sva",
    "load_config",
    "load_session",
    "make_backend",
    "reference_expects_pass",
    "run_session",
    "strip_timestamps",
]
