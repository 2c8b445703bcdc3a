import contextlib

import pytest

ACCEPTANCE: dict = {}


@contextlib.contextmanager
def _criterion(k: int, label: str):
    """Records a pass line unless the block raises (assertion or otherwise)."""
    try:
        yield
    except BaseException as e:
        first = str(e).splitlines()[0] if str(e) else ""
        ACCEPTANCE.setdefault(k, []).append((False, f"{label}: {type(e).__name__}: {first}"[:160]))
        raise
    ACCEPTANCE.setdefault(k, []).append((True, label))


@pytest.fixture
def criterion():
    return _criterion


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        rows = ACCEPTANCE[k]
        bad = [d for ok, d in rows if not ok]
        verdict = "PASS" if not bad else "FAIL"
        detail = f"{len(rows)} checks" if not bad else "; ".join(bad[:2])
        terminalreporter.write_line(f"criterion {k:2d}: {verdict}  {detail}")
