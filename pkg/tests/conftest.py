import pytest
from hypothesis import HealthCheck, settings

# timings are unreliable on a shared single core, and numba compiles on first call
settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_ACCEPTANCE_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance verdict: criterion(k, passed, detail)."""
    lines = request.config.stash[_ACCEPTANCE_KEY]

    def record(k: int, passed: bool, detail: str) -> bool:
        lines[k] = f"criterion {k:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, {})
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(lines):
        terminalreporter.write_line(lines[k])
    missing = [k for k in range(1, 13) if k not in lines]
    if missing:
        terminalreporter.write_line(f"not run: {missing}")
