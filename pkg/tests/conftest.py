import math
import time

import pytest

from polya_lab.sigma_soliton import shoot_profile

WINDINGS = (1, 2, 3)
EPS_TARGETS = (1e-1, 1e-2, 1e-3)


@pytest.fixture(scope="session")
def shot_profiles():
    """All nine regular profiles of the test matrix plus the wall time to shoot them."""
    start = time.perf_counter()
    profiles = {(n, eps): shoot_profile(n, 1.0, eps) for n in WINDINGS for eps in EPS_TARGETS}
    return profiles, time.perf_counter() - start


def bps_radius(n, eps, R0=1.0):
    # closed-form family: f(R0) = eps  <=>  r0 = R0 tan(eps/2)^(1/n)
    return R0 * math.tan(0.5 * eps) ** (1.0 / n)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion for the terminal summary."""

    def record(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
