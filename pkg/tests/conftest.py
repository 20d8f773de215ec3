import pytest

from gerbelab import sampling


@pytest.fixture
def rng():
    return sampling.rng(20240917)


def pytest_configure(config):
    config.acceptance_lines = {}


@pytest.fixture
def acceptance_line(request):
    """Record one PASS/FAIL line per acceptance criterion for the summary."""
    def record(cid, passed, detail=""):
        line = f"criterion {cid:2d} {'PASS' if passed else 'FAIL'}"
        if detail:
            line += f"  {detail}"
        request.config.acceptance_lines[cid] = line
        print(line)
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for cid in sorted(lines):
            terminalreporter.write_line(lines[cid])
