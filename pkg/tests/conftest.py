import pytest

from suslab.degree_model import DegreeDistribution


@pytest.fixture
def p13():
    """Half degree one, half degree three: supercritical with kappa = 1/3."""
    return DegreeDistribution.explicit({1: 0.5, 3: 0.5})


@pytest.fixture
def p13_sub():
    """Degree one with weight 0.8, degree three with 0.2: subcritical."""
    return DegreeDistribution.explicit({1: 0.8, 3: 0.2})


@pytest.fixture
def p13_crit():
    return DegreeDistribution.explicit({1: 0.75, 3: 0.25})


@pytest.fixture
def matching():
    return DegreeDistribution.explicit({1: 1.0})


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record a PASS/FAIL line for the acceptance summary and assert on it."""

    def record(label: str, ok: bool, detail: str):
        line = f"{'PASS' if ok else 'FAIL'} {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
