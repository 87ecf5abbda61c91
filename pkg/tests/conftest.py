from pathlib import Path

import numpy as np
import pytest

ORACLES = Path(__file__).parent / "oracles"


@pytest.fixture(scope="session")
def numerov_levels():
    """Frozen Numerov shooting levels, Z = 2, omega = 1e-4 au, l = 0."""
    return np.loadtxt(ORACLES / "numerov_z2_w1e-4.txt")


class Electron:
    mass = 9.1093837015e-31
    charge = -1.602176634e-19


@pytest.fixture
def electron_species():
    return Electron()


_VERDICTS: list[tuple[int, str]] = []


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(number: int, passed: bool, detail: str):
        line = f"{'PASS' if passed else 'FAIL'} criterion {number}: {detail}"
        _VERDICTS.append((number, line))
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_VERDICTS):
            terminalreporter.write_line(line)
