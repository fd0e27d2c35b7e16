import math
import random
from fractions import Fraction

import pytest

from conftest import random_problem
from momentsum.errors import InvalidParameterError, NonInvertibleError, TruncationError
from momentsum.sequences import gevrey_moments
from momentsum.series import TruncatedSeries1D, TruncatedSeries2D, constant, geometric, monomial, zeros
from momentsum.solver import (
    CauchyProblem,
    FormalSolution,
    fixed_point_solution,
    fixed_point_terms,
    initial_values,
    residual,
    solve_formal,
    z_budget,
)

G1 = gevrey_moments(1)


def heat(phi0, f=None, p=2):
    return CauchyProblem(1, p, G1, G1, constant(1, phi0.order), [phi0], f)


def test_trivial_solution():
    sol = solve_formal(heat(monomial(1, 30)), 8, 10)
    assert sol.u.rows[0] == monomial(1, 10)
    assert all(r.is_zero() for r in sol.u.rows[1:])


def test_heat_rows_match_symbolic_oracle():
    # u*_n(z) = (2n)! / (1 - z)^{2n+1}
    sol = solve_formal(heat(geometric(60)), 8, 40)
    star = sol.starred_rows(G1)
    for n in range(9):
        assert star.rows[n][0] == math.factorial(2 * n)
        assert star.rows[n][1] == math.factorial(2 * n) * (2 * n + 1)


def test_constant_forcing_first_row():
    f = TruncatedSeries2D((constant(1, 30),) + tuple(zeros(30) for _ in range(4)))
    sol = solve_formal(heat(geometric(30), f), 4, 10)
    # u*_1 = 2/(1 - z)^3 + 1
    expected = [Fraction((j + 1) * (j + 2)) for j in range(11)]
    expected[0] += 1
    assert list(sol.starred_rows(G1).rows[1].coefficients) == expected


def test_budget_enforced():
    prob = heat(geometric(10))
    assert z_budget(prob, 8, 4) == 20
    with pytest.raises(TruncationError, match="20"):
        solve_formal(prob, 8, 4)


def test_constraints():
    with pytest.raises(InvalidParameterError, match="k<p required"):
        CauchyProblem(3, 2, G1, G1, constant(1, 4), [zeros(4)] * 3)
    with pytest.raises(NonInvertibleError, match="a\\(0\\) must be nonzero"):
        CauchyProblem(1, 2, G1, G1, monomial(1, 4), [zeros(4)])
    with pytest.raises(InvalidParameterError):
        CauchyProblem(2, 3, G1, G1, constant(1, 4), [zeros(4)])


def test_initial_conditions_and_residual():
    rng = random.Random(11)
    for _ in range(4):
        prob = random_problem(rng)
        sol = solve_formal(prob, 12, 6)
        for j, v in enumerate(initial_values(prob, sol)):
            assert v == prob.phi[j].truncate(6)
        assert residual(prob, sol).is_zero()


def test_residual_sensitivity():
    prob = heat(geometric(40))
    sol = solve_formal(prob, 6, 10)
    rows = list(sol.u.rows)
    bumped = list(rows[3].coefficients)
    bumped[2] += 1
    rows[3] = TruncatedSeries1D(tuple(bumped))
    res = residual(prob, FormalSolution(TruncatedSeries2D(tuple(rows)), "perturbed", 6, 10))
    nonzero = [(n, q) for n, r in enumerate(res.rows) for q, c in enumerate(r.coefficients) if c != 0]
    # row 3 enters through d_t (row 2) and through d_z^2 (row 3, z^0)
    assert nonzero == [(2, 2), (3, 0)]


def test_fixed_point_matches_recurrence_heat():
    prob = heat(geometric(80))
    nt = 10
    rec = solve_formal(prob, nt, 20)
    fp = fixed_point_solution(prob, nt, nt, 20)
    nz = min(rec.nz, fp.nz)
    assert fp.u.rectangle(nt, nz) == rec.u.rectangle(nt, nz)
    assert residual(prob, fp).is_zero()


def test_fixed_point_zero_data():
    prob = heat(zeros(40))
    fp = fixed_point_solution(prob, 3, 5, 8)
    assert fp.u.is_zero()


def test_fixed_point_first_term_is_g():
    # with a = 1, f = 0: g = d_t psi_0 + d_t psi_1 z, i.e. row n holds (n+1) u_{n+1}[j] for j < 2
    prob = heat(geometric(40))
    omega = fixed_point_terms(prob, 1, 3, 8)
    rec = solve_formal(prob, 6, 8)
    for n in range(4):
        row = omega[0].rows[n].coefficients
        assert row[:2] == tuple((n + 1) * rec.u.rows[n + 1][j] for j in range(2))
        assert all(c == 0 for c in row[2:])


@pytest.mark.parametrize("seed", range(5))
def test_random_equivalence(seed):
    rng = random.Random(seed)
    prob = random_problem(rng)
    rec = solve_formal(prob, 12, 6)
    fp = fixed_point_solution(prob, 3, 12, 6)
    nz = min(rec.nz, fp.nz)
    assert nz == 6
    assert fp.u.rectangle(12, nz) == rec.u.rectangle(12, nz)


def test_determinism():
    rng = random.Random(5)
    prob = random_problem(rng)
    assert solve_formal(prob, 12, 6) == solve_formal(prob, 12, 6)


def test_csv_export():
    sol = solve_formal(heat(monomial(1, 10)), 2, 2)
    lines = sol.to_csv().splitlines()
    assert lines[0] == "n,p,coefficient"
    assert "0,1,1" in lines
    assert len(lines) == 1 + 3 * 3
