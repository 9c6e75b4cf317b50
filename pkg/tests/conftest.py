import functools

import pytest

from quatlat.identities import build_configuration


@functools.lru_cache(maxsize=None)
def _config(N, N1):
    return build_configuration(N, N1)


@pytest.fixture(scope="session")
def config():
    """Memoised configuration factory: config(N, N1)."""
    return _config


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("QUATLAT_CACHE", str(tmp_path / "cache"))


_CRITERIA: dict[int, str] = {}


@pytest.fixture(scope="session")
def record_criterion():
    """record_criterion(number, passed, detail) stores a one-line verdict for the summary."""

    def record(number: int, passed: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}"
        _CRITERIA[number] = line
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[k])
