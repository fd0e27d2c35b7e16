from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import strategies as st

from momentsum.sequences import gevrey_moments, product_moments, q_factorial_moments
from momentsum.series import TruncatedSeries1D

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"

rationals = st.fractions(min_value=-10, max_value=10, max_denominator=50)


def series_strategy(order: int):
    return st.lists(rationals, min_size=order + 1, max_size=order + 1).map(
        lambda cs: TruncatedSeries1D(tuple(cs))
    )


def rational_pool():
    """Moment sequences whose tables are exact rationals."""
    return [
        gevrey_moments(1),
        gevrey_moments(2),
        q_factorial_moments(Fraction(1, 2)),
        q_factorial_moments(Fraction(1, 3)),
        product_moments(gevrey_moments(1), q_factorial_moments(Fraction(1, 2))),
    ]


@pytest.fixture
def problems_dir() -> Path:
    return PROBLEMS


def random_problem(rng, nt: int = 12, nz: int = 6, Q: int = 3, shape=None):
    """Random rational Cauchy problem with ``k < p <= 4``.

    The data carry enough orders for a recurrence rectangle ``(nt, nz)`` and
    for the bootstrap of a fixed-point run with ``Q`` iterations.
    """
    from momentsum.series import TruncatedSeries2D
    from momentsum.solver import CauchyProblem

    pool = rational_pool()
    if shape is None:
        p = rng.randint(2, 4)
        k = rng.randint(1, p - 1)
    else:
        k, p = shape
    t_rows = nt + (Q + 1) * k
    order = nz + p * (t_rows // k + 1)

    def rnd_series(n):
        return TruncatedSeries1D(tuple(Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(n + 1)))

    a = rnd_series(order)
    a = TruncatedSeries1D((Fraction(rng.choice([-3, -2, -1, 1, 2, 3])),) + a.coefficients[1:])
    phi = [rnd_series(order) for _ in range(k)]
    f = TruncatedSeries2D(tuple(rnd_series(order) for _ in range(t_rows + 1)))
    return CauchyProblem(k, p, rng.choice(pool), rng.choice(pool), a, phi, f)


# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
