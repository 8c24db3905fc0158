import pytest

_ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    """Record ``(passed, detail)`` for one acceptance criterion, keyed by its number."""

    def record(number, title, passed, detail=""):
        _ACCEPTANCE[number] = (title, bool(passed), detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, ok, detail = _ACCEPTANCE[number]
        tr.write_line(f"{'PASS' if ok else 'FAIL'}  [{number:>2}] {title}" + (f"  ({detail})" if detail else ""))
