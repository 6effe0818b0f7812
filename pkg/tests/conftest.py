from pathlib import Path

import pytest

from stablerel.config import SessionConfig
from stablerel.session import Session

PROGRAMS = Path(__file__).resolve().parent.parent / "programs"


def load(*names, **config):
    session = Session(SessionConfig(**config))
    for name in names:
        session.load((PROGRAMS / f"{name}.scm").read_text())
    return session


def ask(session, text):
    """Execute one run form and return the printed answer list."""
    (line,) = session.load(text)
    return line


@pytest.fixture
def game():
    return load("game")


@pytest.fixture
def unsat():
    return load("unsat")


@pytest.fixture
def revo():
    return load("revo")


@pytest.fixture
def final_scc():
    return load("final_scc")


def answers(session, text, partial=None):
    """Answers of one run form as a list of printed terms."""
    from stablerel.sexpr import parse
    from stablerel.session import to_run
    from stablerel.terms import show

    (form,) = parse(text)
    return [show(a) for a in session.query(to_run(form), partial=partial).answers]


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
