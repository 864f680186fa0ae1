import numpy as np
import pytest

from hsprune.datagen import synthetic_dictionary
from hsprune.spectra import Dictionary, gram_schmidt


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)


@pytest.fixture(scope="session")
def ortho448():
    """448 orthonormal atoms over 500 bands (Gram-Schmidt of Gaussian atoms)."""
    d, dropped = gram_schmidt(synthetic_dictionary(448, 500, seed=3, kind="gaussian"))
    assert not dropped
    return d


@pytest.fixture
def eye3():
    return Dictionary(np.eye(3), ("a", "b", "c"))


ACCEPTANCE_LINES = []


class _Criterion:
    def __init__(self, number, title):
        self.number, self.title = number, title
        self.line = None

    def record(self, ok, detail):
        self.line = f"criterion {self.number} [{'PASS' if ok else 'FAIL'}] {self.title}: {detail}"
        print(self.line)
        return ok


@pytest.fixture
def criterion(request):
    """Records one PASS/FAIL line per acceptance criterion, even on errors."""
    marker = request.node.get_closest_marker("acceptance")
    number, title = marker.args
    c = _Criterion(number, title)
    yield c
    if c.line is None:
        c.line = f"criterion {number} [FAIL] {title}: raised before reporting"
    ACCEPTANCE_LINES.append(c.line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
