import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momentsum.errors import DivergentIntegralError, DomainError, InvalidParameterError, QuadratureError
from momentsum.kernels import (
    GevreyKernel,
    kernel_E,
    kernel_e,
    mittag_leffler_contour,
    mittag_leffler_series,
    moment_check,
    moment_integral,
)
from momentsum.quadrature import integrate_arc, integrate_path, integrate_ray, integrate_segment

ALPHAS = (0.5, 1.0, 1.5)


def test_segment_and_path():
    v, err = integrate_segment(np.sin, 0, math.pi)
    assert v == pytest.approx(2, abs=1e-13)
    assert err < 1e-10
    # closed contour of an entire function
    square = [0, 1, 1 + 1j, 1j, 0]
    assert abs(integrate_path(np.exp, square).value) < 1e-13


def test_arc_residue():
    res = integrate_arc(lambda w: 1 / w, 2.0, 0, 2 * math.pi)
    assert res.value == pytest.approx(2j * math.pi, abs=1e-12)


def test_ray_integrals():
    assert integrate_ray(lambda r: np.exp(-r), 0).value == pytest.approx(1, abs=1e-13)
    # rotating the Gaussian integral by less than pi/4 leaves it unchanged
    res = integrate_ray(lambda w: np.exp(-w * w), math.pi / 8)
    assert res.value == pytest.approx(math.sqrt(math.pi) / 2, abs=1e-12)


def test_ray_divergence():
    with pytest.raises(DivergentIntegralError):
        integrate_ray(lambda r: np.exp(r), 0)
    with pytest.raises(DivergentIntegralError):
        integrate_ray(lambda r: np.ones_like(r), 0)


def test_segment_failure_reports_panels():
    with pytest.raises(QuadratureError) as info:
        integrate_segment(lambda x: np.where(np.real(x) > 1 / 3, 1.0, 0.0), 0, 1, max_panels=20)
    assert info.value.panels is not None


def test_kernel_examples():
    assert kernel_E(1, 1) == pytest.approx(math.e, rel=1e-14)
    assert kernel_e(1, 1) == pytest.approx(math.exp(-1), rel=1e-14)
    assert kernel_E(0.5, 0) == 1
    s, c = mittag_leffler_series(0.5, -4.0), mittag_leffler_contour(0.5, -4.0)
    assert abs(s - c) < 1e-9
    oracle = complex(mpmath.exp(16) * mpmath.erfc(4))
    assert kernel_E(0.5, -4.0) == pytest.approx(oracle, rel=1e-10)


def test_kernel_domain():
    with pytest.raises(DomainError):
        kernel_e(1.0, -1.0)
    with pytest.raises(DomainError):
        kernel_e(0.5, 1j)
    with pytest.raises(InvalidParameterError):
        GevreyKernel(2.0)
    k = GevreyKernel(0.5)
    assert k.m(2) == pytest.approx(1.0)
    assert k.sector_half_opening == pytest.approx(math.pi / 4)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(ALPHAS), st.floats(0.01, 40))
def test_kernel_e_positive(alpha, x):
    v = kernel_e(alpha, x)
    assert v.imag == 0 or abs(v.imag) < 1e-300
    assert v.real > 0 or x ** (1 / alpha) > 700


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(ALPHAS), st.floats(0.2, 9), st.floats(-math.pi, math.pi))
def test_mittag_leffler_against_mpmath(alpha, r, theta):
    z = r * cmath.exp(1j * theta)
    with mpmath.workdps(30):
        exact = complex(mpmath.nsum(lambda p: mpmath.mpc(z) ** p / mpmath.gamma(1 + alpha * p), [0, mpmath.inf]))
    got = complex(kernel_E(alpha, z))
    assert abs(got - exact) <= 1e-9 * max(1.0, abs(exact))


@pytest.mark.parametrize("alpha", ALPHAS)
def test_contour_and_series_agree_in_overlap(alpha):
    for r in (2.0, 4.0, 5.0, 6.0):
        for theta in np.linspace(-math.pi, math.pi, 9):
            z = r * cmath.exp(1j * theta)
            s, c = mittag_leffler_series(alpha, z), mittag_leffler_contour(alpha, z)
            assert abs(s - c) <= 1e-9 * max(1.0, abs(s))


def test_kernel_E_vectorized():
    zs = np.linspace(-8, 8, 33) + 0.3j
    vals = kernel_E(0.5, zs)
    assert vals.shape == zs.shape
    assert all(abs(vals[i] - kernel_E(0.5, complex(zs[i]))) < 1e-12 * max(1, abs(vals[i])) for i in range(33))


def test_moment_examples():
    assert moment_integral(1.0, 3).value == pytest.approx(6, rel=1e-10)
    assert moment_check(1.0, 3) < 1e-10
    assert moment_check(1.0, 0) < 1e-10
    assert moment_integral(0.5, 4).value == pytest.approx(2, rel=1e-8)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_mellin_identity(alpha):
    assert max(moment_check(alpha, p) for p in range(11)) < 1e-8


def test_E1_bounded_on_negative_axis():
    xs = np.linspace(0, 60, 61)
    assert np.all(np.abs(kernel_E(1.0, -xs)) <= 1)
