import pytest

from jntcodes.catalog import find_entries, load_catalog


@pytest.fixture(scope="session")
def catalog():
    return load_catalog()


@pytest.fixture(scope="session")
def entry(catalog):
    def get(label):
        hits = find_entries(catalog, label)
        assert len(hits) == 1, label
        return hits[0]
    return get


_CRITERIA: dict[int, tuple[bool, str]] = {}


def record_criterion(n: int, ok: bool, detail: str) -> None:
    _CRITERIA[n] = (ok, detail)


def pytest_runtest_logreport(report):
    # a criterion that errors before reaching its check still gets a line
    name = report.nodeid.rpartition("::")[2]
    if report.failed and name.startswith("test_criterion_"):
        n = int(name.split("_")[2])
        if n not in _CRITERIA:
            _CRITERIA[n] = (False, f"error during {report.when}: {report.longrepr.reprcrash.message}"
                            if hasattr(report.longrepr, "reprcrash") else f"error during {report.when}")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        ok, detail = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")
