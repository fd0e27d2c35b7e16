"""Heat equation u_t = u_zz with u(0, z) = 1/(1 - z).

Solves formally, fits the coefficient growth for p = 2, 3, 4, sums the
p = 2 solution along the negative real axis and checks the PDE residual
of the sum.
"""
import argparse
import math
from fractions import Fraction

from momentsum import gevrey_moments, solve_formal
from momentsum.growth import coefficient_log_norms, fit_moment_order, predicted_order
from momentsum.series import constant, geometric
from momentsum.solver import CauchyProblem
from momentsum.summation import heat_residual, singular_directions, sum_series, t_series_at
from momentsum.series import formal_borel


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nt", type=int, default=40)
    ap.add_argument("--nz", type=int, default=40)
    args = ap.parse_args()
    g1 = gevrey_moments(1)

    print("p  predicted  fitted_sigma  fit_residual")
    for p in (2, 3, 4):
        order = args.nz + p * args.nt
        prob = CauchyProblem(1, p, g1, g1, constant(1, order), [geometric(order)])
        sol = solve_formal(prob, args.nt, args.nz)
        rep = fit_moment_order(None, log_norms=coefficient_log_norms(sol.u, Fraction(1, 4)),
                               predicted_sigma=predicted_order(prob))
        print(f"{p}  {rep.predicted_sigma:9.3f}  {rep.fitted_sigma:12.4f}  {rep.fit_residual:.2e}")

    prob = CauchyProblem(1, 2, g1, g1, constant(1, 100), [geometric(100)])
    sol = solve_formal(prob, 40, 20)
    series = t_series_at(sol.u, 0)
    print("singular directions at z=0:", singular_directions(formal_borel(series, g1)))
    for t in (-0.02, -0.05, -0.1):
        v = sum_series(series, 1.0, math.pi, t)
        print(f"u({t}, 0) = {v.value.real:.15f}")
    rep = heat_residual(sol.u, 1.0, math.pi, [-0.03, -0.05], [0.0, 0.1])
    print(f"max relative residual of u_t - u_zz: {rep['max_relative_residual']:.2e}")


if __name__ == "__main__":
    main()
