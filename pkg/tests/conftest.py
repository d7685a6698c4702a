import pytest

from parmint.verifier import QuadratureCache, run_suite


@pytest.fixture(scope="session")
def suite_cache():
    return QuadratureCache()


@pytest.fixture(scope="session")
def full_suite(suite_cache):
    """Every check on every builtin family, run once per session."""
    return run_suite(jobs=4, cache=suite_cache)


ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def verdict():
    """Record one acceptance line, then assert on it."""

    def record(number: int, ok: bool, detail: str) -> None:
        ACCEPTANCE[number] = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        assert ok, detail

    return record


def pytest_runtest_logreport(report):
    # a criterion that raised before reaching its verdict still gets a line
    name = report.nodeid.rpartition("::")[2]
    if report.when == "call" and report.failed and name.startswith("test_criterion_"):
        number = int(name.split("_")[2])
        ACCEPTANCE.setdefault(number, f"criterion {number:>2}: FAIL  {name} raised before its verdict")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
