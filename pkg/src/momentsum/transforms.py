"""Laplace and Borel transforms with Gevrey kernels, by direct quadrature.

``laplace_along`` integrates ``e(u/z) g(u) du/u`` over a ray. The inverse
``borel_transform_along`` integrates ``E(u/z) g(z) dz/z`` over a closed
keyhole-like path: out along one segment, clockwise around an arc, back
along the other segment. ``moment_derivative_integral_disc`` evaluates
moment derivatives through a circle integral whose kernel is itself a
Laplace-type ray integral.
"""
from __future__ import annotations

import math
from typing import Callable, Optional

import numpy as np

from .errors import DivergentIntegralError, DomainError, InvalidParameterError
from .kernels import _check_alpha, kernel_E
from .quadrature import QuadratureResult, integrate_arc, integrate_ray, integrate_segment
from .series import TruncatedSeries1D, moment_derivative, norm_r, series_eval
from .sequences import MomentSequence


def vectorized(g: Callable) -> Callable:
    """Wrap ``g`` so it accepts and returns complex arrays."""

    def wrapped(x):
        x = np.asarray(x, dtype=complex)
        try:
            out = np.asarray(g(x), dtype=complex)
            if out.shape == x.shape:
                return out
        except (TypeError, ValueError):
            pass
        return np.array([complex(g(complex(v))) for v in x.ravel()]).reshape(x.shape)

    return wrapped


def _wrap_angle(a: float) -> float:
    return (a + math.pi) % (2 * math.pi) - math.pi


def laplace_along(g: Callable, alpha: float, tau: float, z: complex,
                  **quad) -> QuadratureResult:
    """``int_0^{inf e^{i tau}} e(u/z) g(u) du/u``.

    Requires ``|arg z - tau| < alpha pi / 2``. The ray is parametrized by
    ``u = z v^alpha``, which turns the kernel into ``e^{-v} dv`` and removes
    the endpoint singularity of ``e(u/z)/u``. Returns a
    :class:`QuadratureResult`, which unpacks as ``(value, error)``.
    """
    theta = _laplace_angle(alpha, tau, z)
    z = complex(z)
    gv = vectorized(g)
    turn = complex(math.cos(alpha * theta), math.sin(alpha * theta))

    def integrand(v):
        r = np.abs(v)
        return np.exp(-v) * gv(z * r ** alpha * turn)

    return integrate_ray(integrand, theta, scale=1.0, **quad)


def _laplace_angle(alpha, tau, z):
    _check_alpha(alpha)
    z = complex(z)
    if z == 0:
        raise DomainError("z must be nonzero")
    offset = _wrap_angle(tau - math.atan2(z.imag, z.real))
    if abs(offset) >= alpha * math.pi / 2:
        raise DomainError(
            f"|arg z - tau| must be below {alpha * math.pi / 2:.6f} for order {alpha}"
        )
    return offset / alpha


def _graded_rule():
    x, w = np.polynomial.legendre.leggauss(16)
    edges = [0.0] + [2.0 ** k for k in range(-30, 1)] + list(np.arange(1.5, 121.0, 1.5))
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        nodes.append(0.5 * (a + b) + 0.5 * (b - a) * x)
        weights.append(0.5 * (b - a) * w)
    return np.concatenate(nodes), np.concatenate(weights)


_RULE = _graded_rule()


def laplace_grid(g: Callable, alpha: float, zs, tau=None) -> np.ndarray:
    """Laplace transform at many points with one fixed graded Gauss rule.

    ``tau`` defaults to ``arg z`` for every point. The rule covers
    ``0 <= v <= 120`` with geometric refinement at the origin; functions
    that are not negligible against ``e^{-v}`` there raise
    :class:`DivergentIntegralError`.
    """
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    taus = np.angle(zs) if tau is None else np.full(zs.shape, float(tau))
    thetas = np.array([_laplace_angle(alpha, t, z) for t, z in zip(taus, zs)])
    v, w = _RULE
    gv = vectorized(g)
    dirs = np.exp(1j * thetas)
    u = zs[:, None] * (v[None, :] ** alpha) * np.exp(1j * alpha * thetas)[:, None]
    vals = np.exp(-v[None, :] * dirs[:, None]) * gv(u)
    peak = np.max(np.abs(vals), axis=1)
    if np.any(np.abs(vals[:, -1]) > 1e-16 * np.maximum(peak, 1e-300)):
        raise DivergentIntegralError("integrand not negligible at the end of the fixed rule")
    return (vals * w[None, :]).sum(axis=1) * dirs


def borel_path(alpha: float, tau: float, radius: float, eps: float = math.pi / 8):
    """``(theta_plus, theta_minus, radius)`` of the Borel path around direction ``tau``."""
    half = alpha * (math.pi + eps) / 2
    if 2 * half >= 2 * math.pi:
        raise InvalidParameterError(
            f"alpha (pi + eps) must stay below 2 pi; reduce eps (alpha={alpha}, eps={eps})"
        )
    return tau + half, tau - half, radius


def borel_transform_along(g: Callable, alpha: float, tau: float, u: complex,
                          eps: float = math.pi / 8, radius: Optional[float] = None,
                          **quad) -> QuadratureResult:
    """``-1/(2 pi i) int E(u/z) g(z) dz/z`` over the path around direction ``tau``.

    The arc radius defaults to ``1.5 |u|``. ``u`` must satisfy
    ``|arg u - tau| < alpha eps / 2`` so that ``E(u/z)`` decays on both segments.
    """
    _check_alpha(alpha)
    u = complex(u)
    if u == 0:
        raise DomainError("u must be nonzero")
    if abs(_wrap_angle(math.atan2(u.imag, u.real) - tau)) >= alpha * eps / 2:
        raise DomainError(f"u must lie within {alpha * eps / 2:.6f} of direction {tau:.6f}")
    radius = 1.5 * abs(u) if radius is None else float(radius)
    th_plus, th_minus, _ = borel_path(alpha, tau, radius, eps)
    gv = vectorized(g)

    def integrand(z):
        return kernel_E(alpha, u / z) * gv(z) / z

    z0 = radius * complex(math.cos(th_plus), math.sin(th_plus))
    z1 = radius * complex(math.cos(th_minus), math.sin(th_minus))
    legs = (
        integrate_segment(integrand, 0j, z0, **quad),
        integrate_arc(integrand, radius, th_plus, th_minus, **quad),
        integrate_segment(integrand, z1, 0j, **quad),
    )
    total = sum(leg.value for leg in legs)
    return QuadratureResult(-total / (2j * math.pi), sum(leg.error for leg in legs),
                            sum(leg.panels for leg in legs))


def moment_derivative_integral_disc(phi: TruncatedSeries1D, alpha: float, n: int, z: complex,
                                    r1: float = 0.5, points: int = 64) -> complex:
    """``n``-th moment derivative of ``phi`` at ``z`` via the disc integral.

    Evaluates ``1/(2 pi i) oint_{|w|=r1} phi(w) K_n(z, w) dw`` with
    ``K_n(z, w) = int_0^{inf} xi^n E(z xi) e(w xi) / (w xi) dxi`` taken along
    ``arg xi = -arg w``. The circle rule is the trapezoid rule, which is
    spectrally accurate here. Only ``|z| <= r1 / 2`` is supported; larger
    ``z`` would need a deformed path.
    """
    _check_alpha(alpha)
    if not 0 <= n <= 8:
        raise InvalidParameterError("n must lie in 0..8")
    z = complex(z)
    if abs(z) > r1 / 2:
        raise DomainError(
            f"|z| = {abs(z):.4g} exceeds r1/2 = {r1 / 2:.4g}; the deformed-path regime is not implemented"
        )
    thetas = 2 * math.pi * np.arange(points) / points
    total = 0j
    for th in thetas:
        w = r1 * complex(math.cos(th), math.sin(th))

        # w xi = v^alpha maps the ray onto the positive v axis and e(w xi) dxi / xi to e^{-v} dv
        def inner(v):
            s = np.real(v) ** alpha
            return s ** n * kernel_E(alpha, z * s / w) * np.exp(-np.real(v))

        kern = integrate_ray(inner, 0.0, scale=1.0).value / w ** (n + 1)
        total += complex(series_eval(phi, w)) * kern * w
    return total / points


def derivative_growth_ratios(phi: TruncatedSeries1D, m: MomentSequence, r, n_max: int) -> list:
    """``||d_m^n phi||_r / m(n)`` for ``n = 0..n_max``."""
    out = []
    for n in range(n_max + 1):
        d = moment_derivative(phi, m, n) if n else phi
        out.append(float(norm_r(d, r)) / float(m(n)))
    return out
