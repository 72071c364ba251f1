import functools

import pytest

from pdcfa import corpus
from pdcfa.abstract import ZeroCFA
from pdcfa.clients import analyze_unwidened, analyze_widened
from pdcfa.syntax import ProgramIndex, parse, unique_binders

# criterion number -> (verdict line, passed); filled by test_acceptance
ACCEPTANCE: dict = {}


def record(number: int, title: str, passed: bool, detail: str = "") -> bool:
    status = "PASS" if passed else "FAIL"
    line = f"[{status}] criterion {number:>2}: {title}"
    if detail:
        line += f" -- {detail}"
    ACCEPTANCE[number] = (line, passed)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n][0])
    passed = sum(ok for _, ok in ACCEPTANCE.values())
    terminalreporter.write_line(f"{passed}/{len(ACCEPTANCE)} criteria passed")


@functools.lru_cache(maxsize=None)
def programs() -> dict:
    return corpus.all_programs()


@functools.lru_cache(maxsize=None)
def unwidened(name: str, algorithm: str = "worklist"):
    return analyze_unwidened(ZeroCFA(), programs()[name], algorithm)


@functools.lru_cache(maxsize=None)
def widened(name: str):
    return analyze_widened(ZeroCFA(), programs()[name])


def prog(text: str):
    return unique_binders(parse(text))


def lam_named(e, param: str):
    """The λ whose parameter is ``param``."""
    for l in ProgramIndex.of(e).lams:
        if l.param.name == param:
            return l
    raise KeyError(param)


@pytest.fixture(scope="session")
def corpus_programs():
    return programs()
