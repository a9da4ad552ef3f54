import pytest
import requests
from hypothesis import given, settings
from hypothesis import strategies as st

from privlabel.errors import FetchError, NetworkError, RetriesExhausted
from privlabel.ingest.fetch import HostRateLimiter, fetch_with_backoff, is_retryable, load_snapshot


class FakeResponse:
    def __init__(self, status, content=b""):
        self.status_code = status
        self.content = content


class ScriptedSession:
    """Returns the scripted statuses in order; 200 carries a body."""

    def __init__(self, statuses):
        self.statuses = list(statuses)
        self.calls = 0

    def get(self, url, timeout=None):
        status = self.statuses[self.calls]
        self.calls += 1
        if isinstance(status, Exception):
            raise status
        return FakeResponse(status, b"<p>policy</p>" if status == 200 else b"")


def run(statuses, **kw):
    waits = []
    session = ScriptedSession(statuses)
    doc = fetch_with_backoff("https://example.com/privacy", session=session, sleep=waits.append, **kw)
    return doc, waits, session


def test_first_try_success():
    doc, waits, _ = run([200])
    assert doc.status == 200 and doc.body == b"<p>policy</p>"
    assert doc.retries == 0 and waits == []


def test_two_forbidden_then_success_waits_one_then_two_seconds():
    doc, waits, _ = run([403, 403, 200], base_delay=1.0)
    assert waits == [1.0, 2.0]
    assert doc.retries == 2


def test_exhaustion_raises():
    with pytest.raises(RetriesExhausted) as info:
        run([403] * 4, max_retries=3)
    assert info.value.attempts == 4 and info.value.status == 403


def test_non_retryable_status_fails_fast():
    with pytest.raises(FetchError) as info:
        run([404, 200])
    assert info.value.status == 404


def test_connection_error_maps_to_network_error():
    with pytest.raises(NetworkError):
        run([requests.ConnectionError("refused")])


def test_rejects_non_http_url():
    with pytest.raises(ValueError):
        fetch_with_backoff("ftp://example.com/x", session=ScriptedSession([200]))


@pytest.mark.parametrize("status,expected", [(403, True), (429, True), (500, True), (503, True), (404, False), (301, False)])
def test_retryable_statuses(status, expected):
    assert is_retryable(status) is expected


@settings(max_examples=60, deadline=None)
@given(failures=st.integers(0, 8), max_retries=st.integers(0, 5), base=st.sampled_from([0.5, 1.0, 2.0]))
def test_waits_follow_doubling_schedule(failures, max_retries, base):
    statuses = [503] * failures + [200]
    waits = []
    try:
        fetch_with_backoff("https://example.com/p", max_retries, base,
                           session=ScriptedSession(statuses), sleep=waits.append)
        succeeded = True
    except RetriesExhausted:
        succeeded = False
    assert succeeded == (failures <= max_retries)
    assert len(waits) == min(failures, max_retries)
    assert waits == [base * 2**i for i in range(len(waits))]


def test_rate_limiter_spaces_same_host_only():
    now = [0.0]
    slept = []

    def sleep(dt):
        slept.append(dt)
        now[0] += dt

    limiter = HostRateLimiter(2.0, clock=lambda: now[0], sleep=sleep)
    limiter.wait("a.com")
    limiter.wait("b.com")
    now[0] += 0.5
    limiter.wait("a.com")
    assert slept == [1.5]


def test_snapshot_is_a_successful_fetch(tmp_path):
    p = tmp_path / "acme.html"
    p.write_bytes(b"<p>x</p>")
    doc = load_snapshot(p)
    assert doc.status == 200 and doc.body == b"<p>x</p>"
