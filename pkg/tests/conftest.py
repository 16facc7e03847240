import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from catwig.states import fr_mixture, fr_state, wf_state  # noqa: E402

settings.register_profile(
    "default",
    max_examples=30,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

ALPHA = 3.0
CUTOFF = 40

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def fr_zz():
    return fr_state("zz", ALPHA, ALPHA, cutoff=CUTOFF)


@pytest.fixture(scope="session")
def fr_family():
    return {v: fr_state(v, ALPHA, ALPHA, cutoff=CUTOFF) for v in ("zz", "yz", "zy", "yy")}


@pytest.fixture(scope="session")
def wf_quarter():
    import math

    return wf_state(math.pi / 4, ALPHA, ("z", "z"), CUTOFF)


@pytest.fixture(scope="session")
def mixtures():
    return {k: fr_mixture(k, ALPHA, ALPHA, cutoff=CUTOFF) for k in ("zz", "mixA", "mixB")}


@pytest.fixture
def acceptance():
    """Record a pass/fail line for the end-of-run acceptance summary, then assert."""

    def record(number, title, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {title} -- {detail}"
        ACCEPTANCE_LINES.append(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
