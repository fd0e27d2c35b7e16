"""Gevrey kernel pair: Laplace kernel ``e`` and Mittag-Leffler function ``E``.

``E_alpha(z) = sum z^p / Gamma(1 + alpha p)`` is evaluated in two regimes:

* ``|z| <= 5``: Taylor series in double precision. Points where the terms
  cancel badly (``E(|z|) / |E(z)|`` large) go to the contour form below,
  or to an mpmath Taylor sum close to the origin.
* ``|z| > 5``: the contour representation
  ``E(z) = [ (1/alpha) exp(z^{1/alpha}) ] + 1/(2 pi i alpha) int exp(zeta^{1/alpha}) / (zeta - z) dzeta``
  over two rays at ``arg zeta = -mu, mu`` joined by the unit arc, where the
  bracketed term is present only when ``|arg z| < mu``. This is exact, so
  it stays accurate in the transition zone where the truncated asymptotic
  expansion would not.

The two are blended linearly on ``4.5 < |z| < 5.5``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gammaln

from .errors import DomainError, InvalidParameterError
from .quadrature import QuadratureResult, integrate_ray

SWITCH_RADIUS = 5.0
BLEND = 0.5
_ARC_RADIUS = 1.0
_NODES = 24
# the contour form is accurate once |z| clears the unit arc
_CONTOUR_MIN = 1.6


def _check_alpha(alpha: float):
    if not 0 < alpha < 2:
        raise InvalidParameterError(f"alpha must lie in (0, 2), got {alpha}")


@dataclass(frozen=True)
class GevreyKernel:
    """Kernel pair of Gevrey order ``alpha`` with moments ``Gamma(1 + alpha p)``."""

    alpha: float

    def __post_init__(self):
        _check_alpha(self.alpha)

    def e(self, z):
        return kernel_e(self.alpha, z)

    def E(self, z):
        return kernel_E(self.alpha, z)

    def m(self, p) -> float:
        return math.gamma(1 + self.alpha * p)

    @property
    def growth_index(self) -> float:
        return self.alpha

    @property
    def sector_half_opening(self) -> float:
        return self.alpha * math.pi / 2


def kernel_e(alpha: float, z):
    """``(1/alpha) z^{1/alpha} exp(-z^{1/alpha})`` with the principal branch.

    Defined on ``|arg z| < alpha pi / 2`` where it decays; ``e(0) = 0``.
    """
    _check_alpha(alpha)
    arr = np.asarray(z, dtype=complex)
    bad = (np.abs(np.angle(arr)) >= alpha * math.pi / 2) & (arr != 0)
    if np.any(bad):
        raise DomainError(
            f"kernel e of order {alpha} is defined for |arg z| < {alpha * math.pi / 2:.6f}"
        )
    out = _e_unchecked(alpha, arr)
    return complex(out) if np.ndim(z) == 0 else out


def _e_unchecked(alpha, z):
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.power(z, 1.0 / alpha)
        out = w * np.exp(-w) / alpha
    return np.where(z == 0, 0j, out)


def _taylor(alpha, z):
    """Double precision Taylor sum; also returns the sum of absolute terms."""
    rmax = float(np.max(np.abs(z))) if z.size else 0.0
    # enough terms for 1e-17 relative to the largest term
    n_terms = int(60 + 3 * (rmax + 1) ** (1 / alpha) / alpha)
    p = np.arange(n_terms)
    lg = gammaln(1 + alpha * p)
    with np.errstate(divide="ignore", invalid="ignore"):
        logz = np.log(z.astype(complex))
        expo = logz[:, None] * p[None, :] - lg[None, :]
    expo[:, 0] = -lg[0]
    terms = np.exp(expo)
    terms[z == 0, 1:] = 0
    return terms.sum(axis=1), np.abs(terms).sum(axis=1)


def _taylor_mp(alpha, z, dps=40):
    with mpmath.workdps(dps):
        zz = mpmath.mpc(z)
        total, p, tol = mpmath.mpc(0), 0, mpmath.mpf(10) ** (-dps + 5)
        a = mpmath.mpf(alpha)
        while True:
            term = zz ** p / mpmath.gamma(1 + a * p)
            total += term
            if p > 2 * abs(zz) ** (1 / a) + 10 and abs(term) < tol * max(abs(total), tol):
                break
            p += 1
        return complex(total)


def mittag_leffler_series(alpha: float, z, fallback=None):
    """Taylor evaluation of ``E_alpha``; accurate for moderate ``|z|``.

    Points whose terms cancel by more than four digits are redone by
    ``fallback`` (multiprecision Taylor by default).
    """
    _check_alpha(alpha)
    arr = np.atleast_1d(np.asarray(z, dtype=complex))
    vals, absum = _taylor(alpha, arr)
    loss = absum / np.maximum(np.abs(vals), 1e-300)
    bad = np.nonzero(loss > 1e4)[0]
    if bad.size:
        if fallback is None:
            for i in bad:
                vals[i] = _taylor_mp(alpha, arr[i])
        else:
            vals[bad] = fallback(arr[bad])
    return complex(vals[0]) if np.ndim(z) == 0 else vals


def _series_or_contour(alpha, z):
    def fallback(pts):
        out = np.empty(pts.shape, dtype=complex)
        far = np.abs(pts) >= _CONTOUR_MIN
        if np.any(far):
            out[far] = mittag_leffler_contour(alpha, pts[far])
        for i in np.nonzero(~far)[0]:
            out[i] = _taylor_mp(alpha, pts[i])
        return out

    return mittag_leffler_series(alpha, z, fallback)


def _mu_candidates(alpha):
    lo = alpha * math.pi / 2
    hi = min(math.pi, alpha * math.pi)
    return tuple(lo + f * (hi - lo) for f in (0.35, 0.7, 1.0))


@lru_cache(maxsize=64)
def _contour_nodes(alpha: float, mu: float):
    """Nodes ``zeta_j`` and weights ``w_j exp(zeta_j^{1/alpha}) / (2 pi i alpha)``."""
    x, w = leggauss(_NODES)
    decay = -math.cos(mu / alpha)
    # ray end where exp(r^{1/alpha} cos(mu/alpha)) < 1e-22
    r_end = (52.0 / max(decay, 1e-3)) ** alpha
    edges = [_ARC_RADIUS]
    while edges[-1] < r_end:
        edges.append(edges[-1] * 1.15 + 0.05)
    zs, ws = [], []
    for sign in (-1.0, 1.0):
        phase = complex(math.cos(sign * mu), math.sin(sign * mu))
        for a, b in zip(edges[:-1], edges[1:]):
            r = 0.5 * (a + b) + 0.5 * (b - a) * x
            wr = 0.5 * (b - a) * w
            # the lower ray runs inward, the upper one outward
            zeta = r * phase
            expo = np.exp(r ** (1 / alpha) * np.exp(1j * sign * mu / alpha))
            zs.append(zeta)
            ws.append(sign * wr * phase * expo)
    n_arc = 8
    th_edges = np.linspace(-mu, mu, n_arc + 1)
    for a, b in zip(th_edges[:-1], th_edges[1:]):
        th = 0.5 * (a + b) + 0.5 * (b - a) * x
        wt = 0.5 * (b - a) * w
        zeta = _ARC_RADIUS * np.exp(1j * th)
        expo = np.exp(_ARC_RADIUS ** (1 / alpha) * np.exp(1j * th / alpha))
        zs.append(zeta)
        ws.append(wt * 1j * zeta * expo)
    zeta = np.concatenate(zs)
    weight = np.concatenate(ws) / (2j * math.pi * alpha)
    return zeta, weight


def mittag_leffler_contour(alpha: float, z):
    """Contour evaluation of ``E_alpha``; valid for ``|z|`` away from the unit arc."""
    _check_alpha(alpha)
    arr = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.empty(arr.shape, dtype=complex)
    if alpha == 1.0:
        out[:] = np.exp(arr)
        return complex(out[0]) if np.ndim(z) == 0 else out
    mus = _mu_candidates(alpha)
    ang = np.abs(np.angle(arr))
    # pick the ray angle furthest from arg z
    choice = np.argmax(np.abs(ang[:, None] - np.array(mus)[None, :]), axis=1)
    for ci, mu in enumerate(mus):
        idx = np.nonzero(choice == ci)[0]
        if idx.size == 0:
            continue
        zeta, weight = _contour_nodes(alpha, mu)
        zz = arr[idx]
        vals = (weight[None, :] / (zeta[None, :] - zz[:, None])).sum(axis=1)
        inside = ang[idx] < mu
        with np.errstate(over="ignore"):
            expo = np.exp(np.power(zz[inside], 1 / alpha)) / alpha
        vals[inside] += expo
        out[idx] = vals
    return complex(out[0]) if np.ndim(z) == 0 else out


def kernel_E(alpha: float, z):
    """``E_alpha(z)`` with the Taylor / contour switchover at ``|z| = 5``."""
    _check_alpha(alpha)
    arr = np.atleast_1d(np.asarray(z, dtype=complex))
    if alpha == 1.0:
        out = np.exp(arr)
        return complex(out[0]) if np.ndim(z) == 0 else out
    out = np.empty(arr.shape, dtype=complex)
    r = np.abs(arr)
    lo, hi = SWITCH_RADIUS - BLEND, SWITCH_RADIUS + BLEND
    small = r <= lo
    large = r >= hi
    mid = ~(small | large)
    if np.any(small):
        out[small] = _series_or_contour(alpha, arr[small])
    if np.any(large):
        out[large] = mittag_leffler_contour(alpha, arr[large])
    if np.any(mid):
        w = (r[mid] - lo) / (hi - lo)
        out[mid] = ((1 - w) * _series_or_contour(alpha, arr[mid])
                    + w * mittag_leffler_contour(alpha, arr[mid]))
    return complex(out[0]) if np.ndim(z) == 0 else out


def moment_integral(alpha: float, p: float) -> QuadratureResult:
    """``int_0^inf t^{p-1} e_alpha(t) dt`` by ray quadrature."""
    _check_alpha(alpha)
    if p < 0:
        raise InvalidParameterError("p must be nonnegative")

    def f(t):
        t = np.real(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = np.power(t, p - 1) * np.real(_e_unchecked(alpha, t.astype(complex)))
        return np.where(t == 0, 0.0, v)

    # the mass sits near t ~ (alpha p)^alpha
    scale = max(1.0, (alpha * p) ** alpha) / 2
    return integrate_ray(f, 0.0, scale=scale)


def moment_check(alpha: float, p: int) -> float:
    """Relative error of the Mellin moment quadrature against ``Gamma(1 + alpha p)``."""
    val = moment_integral(alpha, p).value.real
    exact = math.gamma(1 + alpha * p)
    return abs(val - exact) / exact
