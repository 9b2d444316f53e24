import pytest

from qbouncer.classical import simulate
from qbouncer.model import NEUTRON

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture(scope="session")
def neutron():
    return NEUTRON


@pytest.fixture(scope="session")
def neutron_traj():
    return simulate(NEUTRON, n_cycles=1, tol=1e-9)


@pytest.fixture
def record():
    """Register an acceptance outcome; the summary prints one line per criterion."""

    def _record(name: str, passed: bool, detail: str) -> bool:
        _ACCEPTANCE.append((name, bool(passed), detail))
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
