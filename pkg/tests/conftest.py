import random

import pytest

from endolattice.lattice_core import IntMatrix

# filled by test_acceptance; echoed at the end of the run so the verdicts
# survive output capture
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


def random_matrix(rng: random.Random, max_dim: int = 6, bound: int = 9) -> IntMatrix:
    r, c = rng.randint(1, max_dim), rng.randint(1, max_dim)
    if rng.random() < 0.3:
        # low rank products exercise the zero block of the Smith form
        k = rng.randint(1, min(r, c))
        A = IntMatrix.from_rows([[rng.randint(-3, 3) for _ in range(k)] for _ in range(r)])
        B = IntMatrix.from_rows([[rng.randint(-3, 3) for _ in range(c)] for _ in range(k)])
        return A @ B
    return IntMatrix.from_rows([[rng.randint(-bound, bound) for _ in range(c)] for _ in range(r)])


@pytest.fixture
def rng():
    return random.Random(20261018)
