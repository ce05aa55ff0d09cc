import pytest

_RESULTS = {}


@pytest.fixture(scope="session")
def record():
    """``record(key, title, ok, detail)`` stores one acceptance verdict."""

    def _record(key, title, ok, detail=""):
        prev = _RESULTS.get(key)
        if prev is not None:
            ok = ok and prev[1]
            detail = "; ".join(d for d in (prev[2], detail) if d)
        _RESULTS[key] = (title, ok, detail)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_RESULTS):
        title, ok, detail = _RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {key}: {title}  [{detail}]")
