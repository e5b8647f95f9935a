import pytest

_verdicts: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def verdict():
    """verdict(n, ok, detail) records the outcome of acceptance criterion n
    for the end-of-run summary and returns ok."""

    def record(n: int, ok: bool, detail: str) -> bool:
        _verdicts[n] = (bool(ok), detail)
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_verdicts):
        ok, detail = _verdicts[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
