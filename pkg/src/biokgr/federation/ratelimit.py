"""Shared per-host rate limiting with an injectable clock.

The limiter serializes timestamp grants under one lock: a caller only
receives a dispatch slot when `now` has passed the host's next-allowed time,
so the granted timestamps for one host are spaced by at least the configured
minimum interval no matter how many threads contend.
"""
from __future__ import annotations

import threading
import time


class SystemClock:
    def now(self) -> float:
        return time.monotonic()

    def sleep(self, seconds: float) -> None:
        if seconds > 0:
            time.sleep(seconds)


class RateLimiter:
    def __init__(self, clock=None):
        self._clock = clock or SystemClock()
        self._lock = threading.Lock()
        self._next_allowed: dict[str, float] = {}

    def acquire(self, host: str, min_interval: float) -> float:
        """Block until the host's slot opens; returns the granted timestamp."""
        if min_interval < 0:
            raise ValueError("min_interval must be >= 0")
        while True:
            with self._lock:
                now = self._clock.now()
                ready = self._next_allowed.get(host, float("-inf"))
                if now >= ready:
                    self._next_allowed[host] = now + min_interval
                    return now
                wait = ready - now
            self._clock.sleep(wait)
