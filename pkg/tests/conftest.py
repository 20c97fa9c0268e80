import random

import pytest
from hypothesis import strategies as st

from nottingham_torsion.fpseries import FpSeries
from nottingham_torsion.nottingham import NottinghamElement

PRIMES = (3, 5, 7)

# (number, title, passed, detail) rows filled in by test_acceptance.py
ACCEPTANCE_RESULTS: list[tuple[int, str, bool, str]] = []


@pytest.fixture
def record():
    def _record(number: int, title: str, passed: bool, detail: str = ""):
        ACCEPTANCE_RESULTS.append((number, title, bool(passed), detail))
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(ACCEPTANCE_RESULTS):
        tag = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{tag} criterion {number}: {title} -- {detail}")


@pytest.fixture
def rng():
    return random.Random(1729)


@st.composite
def series(draw, p=None, precision=None, unit=False):
    p = draw(st.sampled_from(PRIMES)) if p is None else p
    n = draw(st.integers(1, 10)) if precision is None else precision
    coeffs = draw(st.lists(st.integers(0, p - 1), min_size=n, max_size=n))
    if unit:
        coeffs[0] = 1
    return FpSeries(p, coeffs, n)


@st.composite
def elements(draw, p, precision):
    alphas = draw(st.lists(st.integers(0, p - 1), min_size=precision - 2, max_size=precision - 2))
    return NottinghamElement.from_unit_coeffs(p, alphas, precision)
