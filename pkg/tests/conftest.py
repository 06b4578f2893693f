import sys
from pathlib import Path

import pytest

from ptsusy import factorize, ground_state_plus, make_problem, solve_spectrum
from ptsusy.oracle import load_goldens

GOLDEN_PATH = Path(__file__).parent / "golden" / "goldens.json"


@pytest.fixture(scope="session")
def goldens():
    return load_goldens(GOLDEN_PATH)


class Setup:
    """Solved spectrum, factorization and ground state for one parameter point."""

    def __init__(self, L, l, g, n_levels=4):
        self.p = make_problem(L, l, g)
        self.spec = solve_spectrum(self.p, n_levels)
        self.levels = self.spec.levels
        self.fac = factorize(self.p, self.levels[0])
        self.gs = ground_state_plus(self.p, self.levels[0])


_cache = {}


def setup_for(L, l, g, n_levels=4):
    key = (L, l, g, n_levels)
    if key not in _cache:
        _cache[key] = Setup(L, l, g, n_levels)
    return _cache[key]


@pytest.fixture
def std():
    """The reference point L=1, l=0.5, g=2."""
    return setup_for(1.0, 0.5, 2.0)


@pytest.fixture
def herm():
    return setup_for(1.0, 0.5, 0.0)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
