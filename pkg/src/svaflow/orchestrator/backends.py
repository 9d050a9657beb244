"""LLM backends: a deterministic fixture replayer and a chat-completions client."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

import httpx

from .config import HttpSettings

RESPONSE_GLOB = "*_response.txt"


class BackendError(RuntimeError):
    pass


class BackendUnavailable(BackendError):
    pass


class FixturesExhausted(BackendError):
    pass


class ContextOverflow(BackendError):
    def __init__(self, estimated: int, budget: int):
        self.estimated = estimated
        self.budget = budget
        super().__init__(f"conversation needs about {estimated} tokens, over the budget of {budget}")


@dataclass(frozen=True)
class LlmResponse:
    raw: str
    extracted_blocks: tuple[str, ...]
    backend_id: str

    def __post_init__(self):
        for block in self.extracted_blocks:
            if block not in self.raw:
                raise ValueError("extracted blocks must be substrings of the raw response")


Message = dict  # {"role": ..., "content": ...}


def estimate_tokens(messages: Sequence[Message]) -> int:
    """Rough count at four characters per token, plus a small per-message overhead."""
    return sum(len(m["content"]) // 4 + 4 for m in messages)


class Backend(Protocol):
    backend_id: str

    def complete(self, messages: Sequence[Message]) -> str: ...


class ReplayBackend:
    """Serves ``NNN_response.txt`` files from a directory in lexicographic order."""

    def __init__(self, directory: Path | str):
        self.directory = Path(directory)
        if not self.directory.is_dir():
            raise BackendUnavailable(f"replay directory {self.directory} does not exist")
        self.files = sorted(self.directory.glob(RESPONSE_GLOB))
        self.cursor = 0
        self.backend_id = f"replay:{self.directory.name}"

    def skip(self, n: int):
        self.cursor += n

    def complete(self, messages: Sequence[Message]) -> str:
        if self.cursor >= len(self.files):
            raise FixturesExhausted(f"no replay fixture left in {self.directory} (used {self.cursor})")
        path = self.files[self.cursor]
        self.cursor += 1
        return path.read_text(encoding="utf-8")


class HttpBackend:
    """Single chat-completions endpoint; the credential comes from the environment."""

    def __init__(self, settings: HttpSettings, transport: httpx.BaseTransport | None = None, temperature: float = 0.0):
        key = os.environ.get(settings.api_key_env)
        if not key:
            raise BackendUnavailable(f"environment variable {settings.api_key_env} is not set")
        self.settings = settings
        self.temperature = temperature
        self.backend_id = f"http:{settings.model}"
        self.client = httpx.Client(
            transport=transport,
            timeout=settings.timeout,
            headers={"Authorization": f"Bearer {key}"},
        )

    def complete(self, messages: Sequence[Message]) -> str:
        payload = {"model": self.settings.model, "messages": list(messages), "temperature": self.temperature}
        try:
            resp = self.client.post(self.settings.endpoint, json=payload)
        except httpx.HTTPError as exc:
            raise BackendUnavailable(f"request to {self.settings.endpoint} failed: {exc}") from exc
        if resp.status_code in (401, 403):
            raise BackendUnavailable(f"endpoint rejected the credential (HTTP {resp.status_code})")
        if resp.status_code >= 400:
            raise BackendUnavailable(f"endpoint returned HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise BackendUnavailable(f"unexpected response shape: {exc!r}") from exc

    def close(self):
        self.client.close()


class ResumingBackend:
    """Answers from a previous run's log first, then hands over to ``inner``."""

    def __init__(self, inner: Backend, logged: Sequence[str]):
        self.inner = inner
        self.logged = list(logged)
        self.backend_id = inner.backend_id
        if hasattr(inner, "skip"):
            inner.skip(len(self.logged))

    def complete(self, messages: Sequence[Message]) -> str:
        if self.logged:
            return self.logged.pop(0)
        return self.inner.complete(messages)


def make_backend(config, transport: httpx.BaseTransport | None = None) -> Backend:
    if config.backend == "replay":
        if config.replay_dir is None:
            raise BackendUnavailable("replay backend needs replay_dir")
        return ReplayBackend(config.replay_dir)
    return HttpBackend(config.http, transport=transport)
