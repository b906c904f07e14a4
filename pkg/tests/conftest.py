import pytest
from hypothesis import HealthCheck, settings

from eurohist.dataset import load_dataset

settings.register_profile(
    "default", max_examples=100, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
# invariance suites run this many randomized instances each
settings.register_profile(
    "thorough", max_examples=1000, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def bundled():
    return load_dataset()


# acceptance criterion -> list of (nodeid, passed)
_CRITERIA: dict[int, list[tuple[str, bool]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    results = _CRITERIA.setdefault(marker.args[0], [])
    if call.when == "setup" and call.excinfo is not None:
        results.append((item.nodeid, False))
    elif call.when == "call":
        results.append((item.nodeid, call.excinfo is None))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        results = _CRITERIA[number]
        ok = all(passed for _, passed in results)
        failed = [nodeid.split("::")[-1] for nodeid, passed in results if not passed]
        detail = f" ({', '.join(failed)})" if failed else ""
        terminalreporter.write_line(
            f"criterion {number:2d}: {'PASS' if ok else 'FAIL'} [{len(results)} checks]{detail}")
