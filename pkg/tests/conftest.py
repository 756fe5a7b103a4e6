import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fuzzysail.rules import default_rule_base
from fuzzysail.sets import default_partition

settings.register_profile(
    "fuzzysail", deadline=None, max_examples=200,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("fuzzysail")


@pytest.fixture(scope="session")
def error_var():
    return default_partition("error")


@pytest.fixture(scope="session")
def derror_var():
    return default_partition("derror")


@pytest.fixture(scope="session")
def rules():
    return default_rule_base()


@pytest.fixture(scope="session")
def grid_axis():
    return np.arange(-180.0, 181.0)


_ACCEPTANCE: list[str] = []


@pytest.fixture
def verdict(request):
    """Record and print one pass/fail line for an acceptance criterion."""

    def record(label, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  ({detail})" if detail else "")
        _ACCEPTANCE.append(line)
        print(line)
        assert ok, f"{label}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
