"""Low-level knowledge-base client: auth, rate limiting, retries, parsing.

One `KgClient` wraps one source descriptor. All requests go through
`fetch_with_policy`, which (1) checks credentials for the source's auth mode,
(2) acquires a rate-limit slot for the host, (3) retries transient failures
with exponential backoff, and (4) parses the response body into structured
form (JSON when possible, text otherwise). Every dispatched request is
appended to `call_log` with its granted timestamp so tests and budget
accounting can audit the client's behavior.
"""
from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field

import requests

from biokgr.federation.descriptors import SourceDescriptor
from biokgr.federation.ratelimit import RateLimiter, SystemClock

logger = logging.getLogger(__name__)

TRANSIENT_STATUSES = {429, 500, 502, 503, 504}
DEFAULT_TIMEOUT = 15.0


class FederationError(Exception):
    pass


class AuthMissing(FederationError):
    pass


class RequestFailed(FederationError):
    """Non-transient failure (HTTP 4xx other than 429); not retried."""

    def __init__(self, message: str, status: int | None = None):
        super().__init__(message)
        self.status = status


class SourceUnavailable(FederationError):
    """Attempts exhausted against one host."""

    def __init__(self, host: str, attempts: int, reason: str = ""):
        super().__init__(f"{host} unavailable after {attempts} attempts: {reason}")
        self.host = host
        self.attempts = attempts


class TransportError(FederationError):
    pass


@dataclass
class RawResponse:
    status: int
    body: str
    headers: dict = field(default_factory=dict)
    url: str = ""


@dataclass(frozen=True)
class FetchRequest:
    path: str
    params: dict = field(default_factory=dict)
    method: str = "GET"
    body: str | None = None
    headers: dict = field(default_factory=dict)


@dataclass
class CallRecord:
    url: str
    timestamp: float
    status: int | None = None
    attempt: int = 1


class RequestsTransport:
    """Default transport over a shared `requests.Session`."""

    def __init__(self, session: requests.Session | None = None, timeout: float = DEFAULT_TIMEOUT):
        self._session = session or requests.Session()
        self._session.headers.setdefault("User-Agent", "biokgr/0.1")
        self._timeout = timeout

    def send(self, method: str, url: str, params: dict, headers: dict, body: str | None) -> RawResponse:
        try:
            response = self._session.request(
                method, url, params=params or None, headers=headers or None,
                data=body, timeout=self._timeout,
            )
        except requests.RequestException as exc:
            raise TransportError(str(exc)) from exc
        return RawResponse(
            status=response.status_code,
            body=response.text,
            headers=dict(response.headers),
            url=response.url,
        )


class KgClient:
    def __init__(
        self,
        descriptor: SourceDescriptor,
        transport=None,
        limiter: RateLimiter | None = None,
        clock=None,
        env=None,
    ):
        descriptor.validate()
        self.descriptor = descriptor
        self._clock = clock or SystemClock()
        self._transport = transport or RequestsTransport()
        self._limiter = limiter or RateLimiter(self._clock)
        self._env = env if env is not None else os.environ
        self.call_log: list[CallRecord] = []

    @property
    def source_id(self) -> str:
        return self.descriptor.source_id

    def _auth_params(self) -> dict:
        if self.descriptor.auth == "none":
            return {}
        key_env = self.descriptor.api_key_env or f"{self.source_id.upper()}_API_KEY"
        key = self._env.get(key_env)
        if not key:
            raise AuthMissing(
                f"source {self.source_id!r} uses {self.descriptor.auth} auth; "
                f"set {key_env} in the environment"
            )
        return {"api_key": key}

    def fetch_with_policy(self, request: FetchRequest):
        """Fetch one request under the source's rate/retry policy; returns parsed body."""
        params = dict(request.params)
        params.update(self._auth_params())
        base = self.descriptor.resolved_base_url(self._env)
        url = base + request.path
        host = base.split("//", 1)[-1].split("/", 1)[0]
        min_interval = 1.0 / self.descriptor.rate_limit_per_sec
        policy = self.descriptor.retry

        last_reason = ""
        for attempt in range(1, policy.max_attempts + 1):
            granted = self._limiter.acquire(host, min_interval)
            record = CallRecord(url=url, timestamp=granted, attempt=attempt)
            self.call_log.append(record)
            try:
                response = self._transport.send(
                    request.method, url, params, dict(request.headers), request.body
                )
            except TransportError as exc:
                last_reason = f"transport: {exc}"
                logger.debug("attempt %d against %s failed: %s", attempt, host, exc)
            else:
                record.status = response.status
                if response.status < 400:
                    return parse_body(response)
                if response.status not in TRANSIENT_STATUSES:
                    raise RequestFailed(
                        f"{url} returned HTTP {response.status}", status=response.status
                    )
                last_reason = f"HTTP {response.status}"
            if attempt < policy.max_attempts:
                self._clock.sleep(policy.backoff_seconds * 2 ** (attempt - 1))
        raise SourceUnavailable(host=host, attempts=policy.max_attempts, reason=last_reason)


def parse_body(response: RawResponse):
    """JSON bodies become dicts/lists; anything else stays text."""
    content_type = ""
    for key, value in response.headers.items():
        if key.lower() == "content-type":
            content_type = value.lower()
            break
    body = response.body
    if "json" in content_type or body.lstrip()[:1] in ("{", "["):
        try:
            return json.loads(body)
        except json.JSONDecodeError:
            pass
    return body
