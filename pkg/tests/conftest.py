import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from subshift_lab.language import SturmianSpec, sturmian_oracle, substitution_oracle  # noqa: E402

FIBONACCI = ({"1": "10", "0": "1"}, "1")
THUE_MORSE = ({"a": "ab", "b": "ba"}, "a")
STURMIAN_CF = (2, 1, 3)


@pytest.fixture(scope="session")
def fib():
    return substitution_oracle(*FIBONACCI, 400)


@pytest.fixture(scope="session")
def tm():
    return substitution_oracle(*THUE_MORSE, 1600)


@pytest.fixture(scope="session")
def sturm():
    return sturmian_oracle(SturmianSpec(STURMIAN_CF, cyclic=True), 400)


@pytest.fixture(scope="session")
def sturm_n():
    return sturmian_oracle(SturmianSpec(rule="n"), 2000)


@pytest.fixture(scope="session")
def oracles(fib, tm, sturm):
    return {"fibonacci": fib, "thue-morse": tm, "sturmian": sturm}


# one PASS/FAIL line per acceptance criterion, collected from tests marked with `criterion`
_criteria: dict[int, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = next((k for k in report.keywords if k.startswith("criterion_")), None)
    if marker is None:
        return
    n = int(marker.split("_")[1])
    _criteria.setdefault(n, []).append(report.outcome)


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            item.keywords[f"criterion_{m.args[0]}"] = True


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        outcomes = _criteria[n]
        status = "PASS" if all(o == "passed" for o in outcomes) else "FAIL"
        terminalreporter.write_line(f"criterion {n:2d}: {status} ({outcomes.count('passed')}/{len(outcomes)} checks)")
