import random

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def random_poly(rng: random.Random, max_degree: int, lo: float = -30.0, hi: float = 0.0):
    """Coefficients with log-magnitudes uniform in [lo, hi] and uniform phases; b_0 and b_n nonzero."""
    import cmath
    import math

    d = rng.randint(1, max_degree)
    return [
        math.exp(rng.uniform(lo, hi)) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
        for _ in range(d + 1)
    ]


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
