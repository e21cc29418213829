import pytest

_RESULTS: dict[int, list[tuple[bool, str]]] = {}


@pytest.fixture
def criterion():
    """Record one outcome for an acceptance criterion; returns the ok flag."""

    def record(number: int, ok: bool, detail: str) -> bool:
        _RESULTS.setdefault(number, []).append((bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        parts = _RESULTS[number]
        status = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        detail = "; ".join(d for _, d in parts)
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {detail}")
