"""Polite HTTP fetching with exponential back-off and a per-host rate limit."""
from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from urllib.parse import urlparse

import requests

from privlabel.errors import FetchError, NetworkError, RetriesExhausted

RETRYABLE = frozenset({403, 429})


@dataclass(frozen=True)
class RawDocument:
    url: str
    body: bytes
    status: int
    fetched_at: datetime = field(default_factory=lambda: datetime.now(timezone.utc))
    retries: int = 0

    def __post_init__(self):
        if self.status == 200 and not self.body:
            raise ValueError("a 200 response must carry a body")


def is_retryable(status: int) -> bool:
    return status in RETRYABLE or 500 <= status < 600


class HostRateLimiter:
    """Enforces a minimum interval between requests to the same host."""

    def __init__(self, min_interval: float, clock=time.monotonic, sleep=time.sleep):
        self.min_interval = min_interval
        self._clock = clock
        self._sleep = sleep
        self._last: dict[str, float] = {}
        self._lock = threading.Lock()

    def wait(self, host: str) -> None:
        with self._lock:
            now = self._clock()
            last = self._last.get(host)
            if last is not None and now - last < self.min_interval:
                self._sleep(self.min_interval - (now - last))
                now = self._clock()
            self._last[host] = now


def _check_url(url: str) -> str:
    parts = urlparse(url)
    if parts.scheme not in ("http", "https") or not parts.netloc:
        raise ValueError(f"not a fetchable URL: {url!r}")
    return parts.netloc


def fetch_with_backoff(
    url: str,
    max_retries: int = 3,
    base_delay: float = 1.0,
    *,
    session=None,
    sleep=time.sleep,
    rate_limiter: HostRateLimiter | None = None,
    timeout: float = 30.0,
) -> RawDocument:
    """GET ``url``, retrying 403/429/5xx with delays ``base_delay * 2**attempt``.

    Other 4xx statuses raise :class:`FetchError` immediately. ``session`` is
    anything with a ``requests``-style ``get``; ``sleep`` is injectable so
    tests can record waits instead of blocking.
    """
    if max_retries < 0:
        raise ValueError("max_retries must be >= 0")
    host = _check_url(url)
    session = session or requests.Session()

    status = None
    for attempt in range(max_retries + 1):
        if rate_limiter is not None:
            rate_limiter.wait(host)
        try:
            resp = session.get(url, timeout=timeout)
        except requests.ConnectionError as exc:
            raise NetworkError(f"{url}: {exc}") from exc
        status = resp.status_code
        if status == 200:
            return RawDocument(url=url, body=resp.content, status=status, retries=attempt)
        if not is_retryable(status):
            raise FetchError(url, status)
        if attempt < max_retries:
            sleep(base_delay * 2**attempt)
    raise RetriesExhausted(url, max_retries + 1, status)


def load_snapshot(path) -> RawDocument:
    """Wrap a stored ``<policy_id>.html`` file as a successful fetch."""
    path = Path(path)
    return RawDocument(
        url=path.resolve().as_uri(),
        body=path.read_bytes(),
        status=200,
        fetched_at=datetime.fromtimestamp(path.stat().st_mtime, timezone.utc),
    )
