"""Convergent regime k=2, p=3 with m1 = Gamma(1+2n), m2 = Gamma(1+n).

The data are manufactured from u = 1/((1-t)(1-z)), so every row of the
formal solution should come back as 1/(1-z).
"""
import argparse
from fractions import Fraction
from pathlib import Path

from momentsum.dsl import parse_problem_file
from momentsum.growth import coefficient_log_norms, fit_moment_order, predicted_order, radius_estimate
from momentsum.series import geometric
from momentsum.solver import residual, solve_formal

PROBLEM = Path(__file__).resolve().parent.parent / "problems" / "convergent.txt"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nt", type=int, default=30)
    ap.add_argument("--nz", type=int, default=40)
    args = ap.parse_args()
    pf = parse_problem_file(PROBLEM.read_text(), args.nt, args.nz)
    sol = solve_formal(pf.problem, args.nt, args.nz)
    exact = all(row == geometric(args.nz) for row in sol.u.rows)
    logs = coefficient_log_norms(sol.u, Fraction(1, 4))
    rep = fit_moment_order(None, log_norms=logs, predicted_sigma=predicted_order(pf.problem))
    print(f"rows equal 1/(1-z): {exact}")
    print(f"residual vanishes: {residual(pf.problem, sol).is_zero()}")
    print(f"predicted order {rep.predicted_sigma}, fitted {rep.fitted_sigma:.3e}, H {rep.fitted_H:.6f}")
    print(f"radius estimate {radius_estimate(None, log_norms=logs):.6f}")


if __name__ == "__main__":
    main()
