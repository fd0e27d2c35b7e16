import cmath
import json
import math
from fractions import Fraction

import mpmath
import pytest

from momentsum.errors import DomainError, SingularDirectionError
from momentsum.pade import PadeRankWarning
from momentsum.sequences import gevrey_moments
from momentsum.series import TruncatedSeries1D, constant, formal_borel, geometric, monomial
from momentsum.solver import CauchyProblem, solve_formal
from momentsum.summation import (
    continue_borel,
    heat_residual,
    is_entire,
    singular_directions,
    sum_grid,
    sum_series,
    t_series_at,
)

G1 = gevrey_moments(1)


def euler_series(n):
    # sum (-1)^j j! t^{j+1}
    return TruncatedSeries1D((Fraction(0),) + tuple(Fraction((-1) ** j * math.factorial(j)) for j in range(n)))


def euler_oracle(t):
    with mpmath.workdps(30):
        return float(mpmath.quad(lambda u: mpmath.exp(-u / t) / (1 + u), [0, mpmath.inf]))


@pytest.fixture(scope="module")
def heat_solution():
    prob = CauchyProblem(1, 2, G1, G1, constant(1, 100), [geometric(100)])
    return solve_formal(prob, 40, 20)


def test_singular_direction_examples(heat_solution):
    borel = formal_borel(t_series_at(heat_solution.u, 0), G1)
    assert borel.coefficients[:4] == (1, 2, 6, 20)
    dirs = singular_directions(borel, 1e-6)
    assert len(dirs) == 1 and abs(dirs[0]) < 0.05
    eul = formal_borel(TruncatedSeries1D(tuple(Fraction((-1) ** j * math.factorial(j)) for j in range(30))), G1)
    # the Borel image is rational, so the Pade system drops to [L/1]
    with pytest.warns(PadeRankWarning):
        assert singular_directions(eul, 1e-6) == [pytest.approx(math.pi)]
    entire = TruncatedSeries1D(tuple(Fraction(1, math.factorial(j)) for j in range(30)))
    assert is_entire(entire)
    assert singular_directions(entire, 1e-6) == []


def test_euler_sum():
    v = sum_series(euler_series(30), 1.0, 0.0, 0.1)
    assert abs(v.value - euler_oracle(0.1)) < 1e-7
    assert v.value.real == pytest.approx(0.0915633339, abs=1e-9)
    assert v.diagnostics["singular_directions"] == [pytest.approx(math.pi)]


def test_convergent_sum():
    v = sum_series(geometric(30), 1.0, 0.0, 0.1)
    assert abs(v.value - 1 / 0.9) < 1e-8


def test_heat_directions(heat_solution):
    series = t_series_at(heat_solution.u, 0)
    a = sum_series(series, 1.0, math.pi, -0.05).value
    with mpmath.workdps(30):
        oracle = float(mpmath.quad(lambda s: mpmath.exp(-s / 0.05) / mpmath.sqrt(1 + 4 * s), [0, mpmath.inf]) / 0.05)
    assert abs(a - oracle) < 1e-10
    b = sum_series(series, 1.0, math.pi - 0.5, -0.05).value
    assert abs(a - b) < 1e-6
    with pytest.raises(SingularDirectionError) as info:
        sum_series(series, 1.0, 0.0, 0.05)
    assert info.value.singular == [pytest.approx(0.0, abs=0.05)]


def test_sector_condition():
    with pytest.raises(DomainError):
        sum_series(geometric(30), 1.0, 0.0, -0.1)


def test_grid_result_serialization(heat_solution):
    series = t_series_at(heat_solution.u, 0)
    ts = [r * cmath.exp(1j * math.pi) for r in (0.02, 0.05)]
    res = sum_grid(series, 1.0, math.pi, ts)
    data = json.loads(res.dumps())
    assert data["schema_version"] == 1
    assert len(data["grid"]) == 2
    lines = res.to_csv().splitlines()
    assert lines[0] == "t_re,t_im,u_re,u_im,err_estimate"
    assert len(lines) == 3


def test_entire_borel_uses_polynomial():
    cont = continue_borel(monomial(3, 10), 1.0)
    assert cont.entire and cont.pade is None
    assert sum_series(monomial(3, 10), 1.0, 0.7, 0.2 * cmath.exp(0.7j)).value == pytest.approx((0.2 * cmath.exp(0.7j)) ** 3, rel=1e-12)


def test_heat_pde_residual(heat_solution):
    report = heat_residual(heat_solution.u, 1.0, math.pi, [-0.03, -0.05], [0.0, 0.1])
    assert report["max_relative_residual"] < 1e-5
