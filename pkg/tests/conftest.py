import numpy as np
import pytest

from maxitive import fixtures


@pytest.fixture
def suspects_max():
    return fixtures.suspects(fixtures.MAXITIVE)


@pytest.fixture
def suspects_add():
    return fixtures.suspects(fixtures.ADDITIVE)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# acceptance verdicts, echoed in the terminal summary so they survive output capture
ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Yield a setter for the detail text; records PASS/FAIL when the test ends."""
    state = {"detail": ""}

    def note(text):
        state["detail"] = text

    yield note
    rep = getattr(request.node, "rep_call", None)
    verdict = "PASS" if rep is not None and rep.passed else "FAIL"
    line = f"{verdict}  {request.node.name}  {state['detail']}".rstrip()
    ACCEPTANCE_LINES.append(line)
    print("\n" + line)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
