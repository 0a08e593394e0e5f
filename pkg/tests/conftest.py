from fractions import Fraction

import pytest

from gtlimit.liealg import AlgebraKind, build_irrep

HALF = Fraction(1, 2)


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("GTLIMIT_CACHE", str(tmp_path / "cache"))


@pytest.fixture(scope="session")
def irrep():
    """Session-wide memoized irrep builder: irrep("C", (0, -1))."""
    store = {}

    def get(family, hw):
        key = (family, tuple(Fraction(x) for x in hw))
        if key not in store:
            store[key] = build_irrep(AlgebraKind(family, len(hw)), key[1])
        return store[key]

    return get


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance PASS/FAIL lines at the end of the run, one per criterion."""
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip("]"))):
            terminalreporter.write_line(line)
