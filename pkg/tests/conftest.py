import pytest

_ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record one acceptance criterion outcome for the end-of-run summary."""

    def record(number, title, ok, detail=""):
        _ACCEPTANCE.append((number, title, bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(_ACCEPTANCE):
        mark = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{mark}] {number}. {title}: {detail}")
