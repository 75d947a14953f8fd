import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "numeric",
    deadline=None,
    max_examples=int(os.environ.get("HYPOTHESIS_MAX_EXAMPLES", "25")),
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("numeric")

import pytest

_ACCEPTANCE: list[tuple[str, str, bool, str]] = []


@pytest.fixture
def record():
    """Log one acceptance line; returns the flag so the test can assert on it."""

    def _record(criterion: str, name: str, ok: bool, detail: str = "") -> bool:
        _ACCEPTANCE.append((criterion, name, bool(ok), detail))
        print(f"criterion {criterion:4s} {'PASS' if ok else 'FAIL'}  {name}  {detail}")
        return bool(ok)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit, name, ok, detail in _ACCEPTANCE:
        tr.write_line(f"criterion {crit:4s} {'PASS' if ok else 'FAIL'}  {name}  {detail}")
