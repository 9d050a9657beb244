"""Session configuration, loaded from TOML and overridable from the command line."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any

from ..verilog import RolePatterns

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

BACKENDS = ("replay", "http")
PROBE_KINDS = ("random", "rv_timer")
DEFAULT_TOKEN_BUDGET = 128_000
DEFAULT_KEY_ENV = "SVAFLOW_API_KEY"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class HttpSettings:
    endpoint: str = "https://api.openai.com/v1/chat/completions"
    model: str = "gpt-4"
    api_key_env: str = DEFAULT_KEY_ENV
    timeout: float = 120.0


@dataclass(frozen=True)
class SessionConfig:
    design: str = "design"
    max_iterations: int = 5
    backend: str = "replay"
    interactive_confirm: bool = False
    token_budget: int = DEFAULT_TOKEN_BUDGET
    replay_dir: Path | None = None
    http: HttpSettings = field(default_factory=HttpSettings)
    clock: str | None = None
    roles: RolePatterns = field(default_factory=RolePatterns)
    parameters: dict[str, int] = field(default_factory=dict)
    spec: Path | None = None
    rtl: Path | None = None
    block_diagram: Path | None = None
    context_docs: tuple[Path, ...] = ()
    traces: tuple[Path, ...] = ()
    reference: Path | None = None
    alt: Path | None = None
    probes: str = "random"
    probe_count: int = 24
    probe_cycles: int = 12
    probe_seed: int = 7
    documented: tuple[str, ...] = ()  # assertions whose repair history is documented outside the fixtures

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be >= 1")
        if self.backend not in BACKENDS:
            raise ConfigError(f"backend must be one of {', '.join(BACKENDS)}")
        if self.token_budget < 1:
            raise ConfigError("token_budget must be positive")
        if self.probes not in PROBE_KINDS:
            raise ConfigError(f"probes must be one of {', '.join(PROBE_KINDS)}")
        if self.probe_count < 1 or self.probe_cycles < 1:
            raise ConfigError("probe_count and probe_cycles must be positive")

    def with_overrides(self, **changes: Any) -> "SessionConfig":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready form for the session log."""
        out: dict[str, Any] = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, Path):
                v = v.as_posix()
            elif isinstance(v, tuple) and v and isinstance(v[0], Path):
                v = [p.as_posix() for p in v]
            elif isinstance(v, (HttpSettings, RolePatterns)):
                v = {g.name: (list(x) if isinstance(x := getattr(v, g.name), tuple) else x) for g in fields(v)}
            elif isinstance(v, tuple):
                v = list(v)
            out[f.name] = v
        return out


_PATH_KEYS = ("replay_dir", "spec", "rtl", "block_diagram", "reference", "alt")
_LIST_PATH_KEYS = ("context_docs", "traces")
_SCALARS = {"design": str, "max_iterations": int, "backend": str, "interactive_confirm": bool,
            "token_budget": int, "clock": str, "probes": str, "probe_count": int, "probe_cycles": int,
            "probe_seed": int}


def config_from_dict(data: dict[str, Any], base_dir: Path | str = ".") -> SessionConfig:
    base = Path(base_dir)
    kwargs: dict[str, Any] = {}
    unknown = set(data) - set(_SCALARS) - set(_PATH_KEYS) - set(_LIST_PATH_KEYS) - {"http", "roles", "parameters", "documented"}
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    for key, kind in _SCALARS.items():
        if key in data:
            if not isinstance(data[key], kind) or (kind is int and isinstance(data[key], bool)):
                raise ConfigError(f"{key} must be of type {kind.__name__}")
            kwargs[key] = data[key]
    for key in _PATH_KEYS:
        if key in data:
            kwargs[key] = base / data[key]
    for key in _LIST_PATH_KEYS:
        if key in data:
            kwargs[key] = tuple(base / p for p in data[key])
    if "http" in data:
        try:
            kwargs["http"] = HttpSettings(**data["http"])
        except TypeError as exc:
            raise ConfigError(f"bad [http] table: {exc}") from None
    if "roles" in data:
        roles = data["roles"]
        kwargs["roles"] = RolePatterns(
            clock=tuple(roles.get("clock", RolePatterns().clock)),
            reset=tuple(roles.get("reset", RolePatterns().reset)),
        )
    if "documented" in data:
        kwargs["documented"] = tuple(str(n) for n in data["documented"])
    if "parameters" in data:
        params = data["parameters"]
        if not all(isinstance(v, int) for v in params.values()):
            raise ConfigError("parameter overrides must be integers")
        kwargs["parameters"] = dict(params)
    return SessionConfig(**kwargs)


def load_config(path: Path | str) -> SessionConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return config_from_dict(data, path.parent)
