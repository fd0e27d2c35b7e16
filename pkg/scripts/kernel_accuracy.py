"""Accuracy table for the Gevrey kernels.

Mellin moments against Gamma(1 + alpha p), the two Mittag-Leffler
evaluators against each other, and the Borel-Laplace roundtrip on
monomials.
"""
import cmath
import math

import numpy as np

from momentsum.kernels import mittag_leffler_contour, mittag_leffler_series, moment_check
from momentsum.transforms import borel_transform_along, laplace_grid

ALPHAS = (0.5, 1.0, 1.5)


def main():
    print("alpha  max Mellin rel err (p<=10)  max |series - contour| (|z| in 2..6)  max roundtrip rel err (p<=4)")
    for a in ALPHAS:
        mellin = max(moment_check(a, p) for p in range(11))
        dual = 0.0
        for r in (2.0, 4.0, 6.0):
            for th in np.linspace(-math.pi, math.pi, 13):
                z = r * cmath.exp(1j * th)
                s = mittag_leffler_series(a, z)
                dual = max(dual, abs(s - mittag_leffler_contour(a, z)) / max(1.0, abs(s)))
        trip = 0.0
        for p in range(5):
            got = borel_transform_along(lambda zs, p=p: laplace_grid(lambda w: w ** p, a, zs), a, 0.0, 0.2).value
            trip = max(trip, abs(got - 0.2 ** p) / 0.2 ** p)
        print(f"{a:5.2f}  {mellin:26.2e}  {dual:38.2e}  {trip:29.2e}")


if __name__ == "__main__":
    main()
