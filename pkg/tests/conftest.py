import pytest

_ACCEPTANCE = {}


class AcceptanceLog:
    """Collects one pass/fail line per acceptance criterion."""

    def record(self, number: int, title: str, passed: bool, detail: str = ""):
        _ACCEPTANCE[number] = (title, bool(passed), detail)
        return passed


@pytest.fixture(scope="session")
def acceptance():
    return AcceptanceLog()


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, passed, detail = _ACCEPTANCE[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:>2}. {title}: {detail}")
