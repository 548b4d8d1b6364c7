import pytest

_VERDICTS: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def verdict():
    """Record and print the pass/fail line of one acceptance criterion."""

    def report(number: int, passed: bool, detail: str) -> bool:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'} | {detail}"
        _VERDICTS[number] = (passed, line)
        print(line)
        return passed

    return report


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_VERDICTS):
        terminalreporter.write_line(_VERDICTS[number][1])
    passed = sum(ok for ok, _ in _VERDICTS.values())
    terminalreporter.write_line(f"{passed}/{len(_VERDICTS)} criteria passed")
