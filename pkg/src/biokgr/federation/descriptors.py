"""Source descriptors and the default source registry.

Every knowledge-base service is described uniformly: endpoint, protocol,
auth mode, rate limit, retry policy, merge priority. The shipped registry
covers the live-capable core subset plus descriptor stubs for the remaining
services; endpoints are overridable per source via environment variables
(``BIOKGR_<SOURCE>_URL``), which is also how tests point clients at the
bundled mock server.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from importlib import resources

PROTOCOLS = ("rest", "graphql", "flat-file")
AUTH_MODES = ("none", "api-key", "session")


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3
    backoff_seconds: float = 0.5  # exponential: backoff * 2**(attempt-1)

    def validate(self) -> None:
        if self.max_attempts < 1:
            raise ValueError(f"max_attempts must be >= 1, got {self.max_attempts}")
        if self.backoff_seconds < 0:
            raise ValueError("backoff_seconds must be >= 0")


@dataclass(frozen=True)
class SourceDescriptor:
    source_id: str
    base_url: str
    protocol: str = "rest"
    auth: str = "none"
    rate_limit_per_sec: float = 3.0
    retry: RetryPolicy = field(default_factory=RetryPolicy)
    priority: int = 100          # lower merges first
    kinds: tuple[str, ...] = ()  # entity kinds the source serves
    api_key_env: str | None = None
    search_path: str = "/search"
    live: bool = False           # has a real adapter in this build

    def validate(self) -> None:
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if self.auth not in AUTH_MODES:
            raise ValueError(f"unknown auth mode {self.auth!r}")
        if self.rate_limit_per_sec <= 0:
            raise ValueError("rate limit must be > 0 requests/second")
        self.retry.validate()

    def resolved_base_url(self, env=None) -> str:
        env = env if env is not None else os.environ
        override = env.get(f"BIOKGR_{self.source_id.upper()}_URL")
        return (override or self.base_url).rstrip("/")

    @property
    def host(self) -> str:
        url = self.base_url
        return url.split("//", 1)[-1].split("/", 1)[0]


@dataclass(frozen=True)
class QuerySpec:
    kind: str
    text: str
    sources: tuple[str, ...]
    limit: int = 10
    save_dir: str | None = None
    stem: str = "results"

    def validate(self) -> None:
        if not self.text or not self.text.strip():
            raise ValueError("query text is empty")
        if self.limit < 1:
            raise ValueError("result cap must be >= 1")
        if not self.sources:
            raise ValueError("at least one source required")


def load_registry(payload: dict) -> dict[str, SourceDescriptor]:
    registry: dict[str, SourceDescriptor] = {}
    for entry in payload["sources"]:
        retry = RetryPolicy(**entry.get("retry", {}))
        descriptor = SourceDescriptor(
            source_id=entry["source_id"],
            base_url=entry["base_url"],
            protocol=entry.get("protocol", "rest"),
            auth=entry.get("auth", "none"),
            rate_limit_per_sec=entry.get("rate_limit_per_sec", 3.0),
            retry=retry,
            priority=entry.get("priority", 100),
            kinds=tuple(entry.get("kinds", [])),
            api_key_env=entry.get("api_key_env"),
            search_path=entry.get("search_path", "/search"),
            live=entry.get("live", False),
        )
        descriptor.validate()
        registry[descriptor.source_id] = descriptor
    return registry


def default_registry() -> dict[str, SourceDescriptor]:
    path = resources.files("biokgr.data").joinpath("sources.json")
    return load_registry(json.loads(path.read_text(encoding="utf-8")))
