import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momentsum.errors import DomainError, InvalidParameterError
from momentsum.sequences import gevrey_moments
from momentsum.series import constant, geometric, moment_derivative, series_eval
from momentsum.transforms import (
    borel_path,
    borel_transform_along,
    derivative_growth_ratios,
    laplace_along,
    laplace_grid,
    moment_derivative_integral_disc,
)

ALPHAS = (0.5, 1.0, 1.5)


def test_laplace_examples():
    assert laplace_along(lambda u: u ** 2, 1.0, 0.0, 0.3).value == pytest.approx(0.18, rel=1e-9)
    assert laplace_along(lambda u: np.ones_like(u), 1.0, 0.4, 0.5 + 0.2j).value == pytest.approx(1, rel=1e-12)
    assert laplace_along(lambda u: u, 0.5, 0.0, 0.2).value == pytest.approx(math.gamma(1.5) * 0.2, rel=1e-9)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_monomial_identity(alpha):
    for tau in (-0.3, 0.0, 0.5):
        z = 0.4 * cmath.exp(1j * (tau + 0.1 * alpha))
        for p in range(7):
            got = laplace_along(lambda u: u ** p, alpha, tau, z).value
            want = math.gamma(1 + alpha * p) * z ** p
            assert abs(got - want) <= 1e-8 * abs(want)


def test_laplace_sector_violation():
    with pytest.raises(DomainError):
        laplace_along(lambda u: u, 1.0, 0.0, -0.3)
    with pytest.raises(DomainError):
        laplace_along(lambda u: u, 0.5, 0.0, 0.3j)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(ALPHAS), st.floats(0.05, 1.0), st.floats(-0.5, 0.5), st.integers(0, 5))
def test_grid_matches_adaptive(alpha, r, theta, p):
    z = r * cmath.exp(1j * theta * alpha)
    a = laplace_along(lambda u: u ** p, alpha, float(np.angle(z)), z).value
    b = laplace_grid(lambda u: u ** p, alpha, [z])[0]
    assert abs(a - b) <= 1e-10 * max(1.0, abs(a))


def test_borel_examples():
    got = borel_transform_along(lambda z: z, 1.0, 0.0, 0.3).value
    assert abs(got - 0.3) < 1e-6 * 0.3
    const = borel_transform_along(lambda z: 2.5 * np.ones_like(z), 1.0, 0.0, 0.3).value
    assert abs(const - 2.5) < 1e-6


def test_borel_path_and_domain():
    plus, minus, radius = borel_path(1.0, 0.0, 2.0)
    assert plus == pytest.approx((math.pi + math.pi / 8) / 2)
    assert minus == pytest.approx(-plus)
    with pytest.raises(DomainError):
        borel_transform_along(lambda z: z, 1.0, 0.0, 0.3j)
    with pytest.raises(InvalidParameterError):
        borel_path(1.9, 0.0, 1.0, eps=0.5)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_roundtrip(alpha):
    u = 0.2
    for p in range(5):
        def g(zs, p=p):
            return laplace_grid(lambda w: w ** p, alpha, zs)

        got = borel_transform_along(g, alpha, 0.0, u).value
        assert abs(got - u ** p) <= 1e-5 * u ** p


def test_disc_examples():
    phi = geometric(80)
    assert moment_derivative_integral_disc(phi, 1.0, 1, 0.1) == pytest.approx(1 / 0.81, abs=1e-5)
    assert moment_derivative_integral_disc(phi, 1.0, 0, 0.1) == pytest.approx(1 / 0.9, abs=1e-6)
    assert abs(moment_derivative_integral_disc(constant(3, 10), 1.0, 1, 0.1)) < 1e-8
    with pytest.raises(DomainError):
        moment_derivative_integral_disc(phi, 1.0, 1, 0.4)
    with pytest.raises(InvalidParameterError):
        moment_derivative_integral_disc(phi, 1.0, 9, 0.1)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_disc_matches_series(alpha):
    from fractions import Fraction

    phi = geometric(80)
    m = gevrey_moments(Fraction(alpha).limit_denominator(4))
    z = 0.1 + 0.05j
    for n in range(5):
        want = complex(series_eval(moment_derivative(phi, m, n) if n else phi, z))
        got = moment_derivative_integral_disc(phi, alpha, n, z)
        assert abs(got - want) <= 1e-5 * abs(want)


def test_growth_ratios_exact():
    from fractions import Fraction

    ratios = derivative_growth_ratios(geometric(80), gevrey_moments(1), Fraction(1, 2), 15)
    for n, r in enumerate(ratios):
        truncated = sum(Fraction(math.comb(q + n, n), 2 ** q) for q in range(80 - n + 1))
        assert r == pytest.approx(float(truncated), rel=1e-12)
        assert abs(r / 2 ** (n + 1) - 1) < 0.01
