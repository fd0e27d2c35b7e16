"""Adaptive Gauss-Legendre quadrature on segments and rays of the complex plane.

Integrands are vectorized callables taking a complex ndarray of points.
Segment integrals split the panel with the largest error estimate (coarse
rule versus the two halves) until the total estimate is below the absolute
or relative tolerance. Ray integrals march over geometrically growing
panels and stop once the integrand falls below a fixed fraction of its
running maximum.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import DivergentIntegralError, QuadratureError

ABS_TOL = 1e-12
REL_TOL = 1e-10
DECAY = 1e-18
GL_ORDER = 20
MAX_PANELS = 4000


@dataclass
class QuadratureResult:
    value: complex
    error: float
    panels: int

    def __iter__(self):
        # allows ``value, error = integrate_...``
        yield self.value
        yield self.error


@lru_cache(maxsize=8)
def _rule(n: int):
    x, w = leggauss(n)
    return x, w


def _gauss(f, a: complex, b: complex, n: int):
    x, w = _rule(n)
    half = 0.5 * (b - a)
    pts = 0.5 * (a + b) + half * x
    vals = np.asarray(f(pts), dtype=complex)
    if not np.all(np.isfinite(vals)):
        raise QuadratureError(f"non-finite integrand on panel [{a}, {b}]")
    return complex(half * np.dot(w, vals)), float(np.max(np.abs(vals)))


def _panel(f, a, b, n):
    coarse, peak = _gauss(f, a, b, n)
    m = 0.5 * (a + b)
    left, pl = _gauss(f, a, m, n)
    right, pr = _gauss(f, m, b, n)
    fine = left + right
    return fine, abs(fine - coarse), max(peak, pl, pr)


def integrate_segment(f: Callable, a: complex, b: complex, abs_tol: float = ABS_TOL,
                      rel_tol: float = REL_TOL, order: int = GL_ORDER,
                      max_panels: int = MAX_PANELS) -> QuadratureResult:
    """Integral of ``f`` along the straight segment from ``a`` to ``b``."""
    a, b = complex(a), complex(b)
    if a == b:
        return QuadratureResult(0j, 0.0, 0)
    val, err, _ = _panel(f, a, b, order)
    heap = [(-err, 0, a, b, val)]
    total, total_err, count, tick = val, err, 1, 1
    while total_err > max(abs_tol, rel_tol * abs(total)):
        if count >= max_panels:
            raise QuadratureError(
                f"segment quadrature did not converge (estimate {total_err:.3e})", count
            )
        neg_err, _, pa, pb, pv = heapq.heappop(heap)
        pm = 0.5 * (pa + pb)
        if abs(pb - pa) < 1e-15 * max(1.0, abs(pa)):
            raise QuadratureError("panel width underflow near a singularity", count)
        lv, le, _ = _panel(f, pa, pm, order)
        rv, re_, _ = _panel(f, pm, pb, order)
        heapq.heappush(heap, (-le, tick, pa, pm, lv))
        heapq.heappush(heap, (-re_, tick + 1, pm, pb, rv))
        tick += 2
        count += 1
        total += lv + rv - pv
        total_err += le + re_ + neg_err
    # recompute the sum to avoid drift from the running updates
    total = sum(item[4] for item in heap)
    total_err = sum(-item[0] for item in heap)
    return QuadratureResult(complex(total), float(total_err), count)


def integrate_path(f: Callable, vertices, **kw) -> QuadratureResult:
    """Integral along the polyline through ``vertices``."""
    value, error, panels = 0j, 0.0, 0
    for a, b in zip(vertices[:-1], vertices[1:]):
        r = integrate_segment(f, a, b, **kw)
        value += r.value
        error += r.error
        panels += r.panels
    return QuadratureResult(value, error, panels)


def integrate_arc(f: Callable, radius: float, theta0: float, theta1: float,
                  center: complex = 0j, **kw) -> QuadratureResult:
    """Integral of ``f(w) dw`` along the arc ``center + radius e^{i theta}``."""

    def g(theta):
        theta = np.real(theta)
        w = center + radius * np.exp(1j * theta)
        return f(w) * 1j * (w - center)

    return integrate_segment(g, theta0, theta1, **kw)


def integrate_ray(f: Callable, angle: float, scale: float = 1.0, start: float = 0.0,
                  abs_tol: float = ABS_TOL, rel_tol: float = REL_TOL, decay: float = DECAY,
                  growth: float = 2.0, max_steps: int = 200, order: int = GL_ORDER) -> QuadratureResult:
    """Integral of ``f(u) du`` along ``u = r e^{i angle}``, ``r`` from ``start`` to infinity.

    The ray is cut where the largest ``|f|`` on a panel drops below
    ``decay`` times the running maximum. Raises
    :class:`DivergentIntegralError` if that never happens.
    """
    direction = complex(math.cos(angle), math.sin(angle))

    def g(r):
        return f(np.real(r) * direction) * direction

    r0, width = float(start), float(scale)
    value, error, panels = 0j, 0.0, 0
    running = 0.0
    for step in range(max_steps):
        r1 = r0 + width
        with np.errstate(over="ignore", invalid="ignore"):
            probe = np.abs(g(np.linspace(r0, r1, 9)[1:]))
        if not np.all(np.isfinite(probe)):
            raise DivergentIntegralError(
                f"integrand overflows along arg u = {angle:.6f} near |u| = {r1:.3e}", panels
            )
        seg = integrate_segment(g, r0, r1, abs_tol=abs_tol * 0.1, rel_tol=rel_tol * 0.1,
                                order=order)
        value += seg.value
        error += seg.error
        panels += seg.panels
        peak = float(np.max(probe))
        running = max(running, peak)
        if step >= 2 and peak <= decay * running:
            return QuadratureResult(value, error, panels)
        if step >= 8 and running == 0.0:
            return QuadratureResult(value, error, panels)
        r0, width = r1, width * growth if step >= 1 else width
    raise DivergentIntegralError(
        f"integrand not decaying along arg u = {angle:.6f} up to |u| = {r0:.3e}", panels
    )
