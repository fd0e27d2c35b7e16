"""Directional summation of divergent series in ``t``.

Pipeline: formal Borel transform with moments ``Gamma(1 + alpha p)``,
continuation of the Borel series by a Padé approximant, then Laplace
quadrature along direction ``d``. Directions that carry Padé pole clusters
are refused.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from ._numbers import as_rational, to_complex, to_float
from .errors import DomainError, InvalidParameterError, SingularDirectionError
from .growth import DIVERGENT_SIGMA, fit_moment_order
from .pade import PadeApproximant, pade_continue
from .quadrature import QuadratureResult
from .sequences import gevrey_moments
from .series import TruncatedSeries1D, TruncatedSeries2D, formal_borel, series_eval
from .transforms import _wrap_angle, laplace_along

SCHEMA_VERSION = 1
POLE_THRESHOLD = 1e-6
CLUSTER_GAP = 0.1
MARGIN = 0.9


def _angle(z: complex) -> float:
    a = math.atan2(z.imag, z.real)
    return math.pi if a <= -math.pi + 1e-12 else a


def is_entire(f: TruncatedSeries1D) -> bool:
    """Heuristic: coefficients vanish from some index on, or decay factorially."""
    nonzero = [n for n, c in enumerate(f.coefficients) if c != 0]
    if len(nonzero) < 12:
        return True
    report = fit_moment_order([abs(to_complex(c)) for c in f.coefficients], min_rows=6)
    return report.fitted_sigma < -DIVERGENT_SIGMA


def _cluster(angles: Sequence[float], weights: Sequence[float], gap: float) -> list:
    if not angles:
        return []
    order = sorted(range(len(angles)), key=lambda i: angles[i])
    a = [angles[i] for i in order]
    w = [weights[i] for i in order]
    groups, current = [], [0]
    for i in range(1, len(a)):
        if a[i] - a[i - 1] <= gap:
            current.append(i)
        else:
            groups.append(current)
            current = [i]
    groups.append(current)
    # merge across the branch cut at +-pi
    if len(groups) > 1 and (a[groups[0][0]] + 2 * math.pi) - a[groups[-1][-1]] <= gap:
        groups[0] = groups.pop() + groups[0]
    centers = []
    for g in groups:
        s = sum(w[i] * complex(math.cos(a[i]), math.sin(a[i])) for i in g)
        centers.append(_angle(s))
    return sorted(centers)


def default_orders(f: TruncatedSeries1D) -> tuple:
    L = f.order // 2
    return L, f.order - L


def singular_directions(f: TruncatedSeries1D, pole_threshold: float = POLE_THRESHOLD,
                        L: Optional[int] = None, M: Optional[int] = None,
                        gap: float = CLUSTER_GAP, pade: Optional[PadeApproximant] = None) -> list:
    """Arguments of Padé pole clusters of a Borel-plane series.

    Poles with ``|residue| <= pole_threshold`` (spurious doublets) are
    ignored. An entire series yields no directions.
    """
    if is_entire(f):
        return []
    if pade is None:
        dl, dm = default_orders(f)
        pade = pade_continue(f, dl if L is None else L, dm if M is None else M)
    keep = [p for p in pade.poles if abs(p.residue) > pole_threshold and math.isfinite(abs(p.residue))]
    return _cluster([p.argument if p.argument > -math.pi + 1e-12 else math.pi for p in keep],
                    [abs(p.residue) for p in keep], gap)


@dataclass
class BorelContinuation:
    """Borel-plane function used inside the Laplace integral."""

    borel: TruncatedSeries1D
    alpha: float
    entire: bool
    pade: Optional[PadeApproximant]
    singular: list

    def evaluator(self) -> Callable:
        if self.pade is not None:
            return self.pade.evaluator()
        coeffs = np.array([to_complex(c) for c in self.borel.coefficients[::-1]])
        return lambda x: np.polyval(coeffs, x)

    def diagnostics(self) -> dict:
        out = {"entire": self.entire, "singular_directions": self.singular,
               "borel_order": self.borel.order, "alpha": self.alpha}
        if self.pade is not None:
            out["pade"] = self.pade.diagnostics()
        return out


def continue_borel(u_hat_t: TruncatedSeries1D, alpha: float,
                   L: Optional[int] = None, M: Optional[int] = None,
                   pole_threshold: float = POLE_THRESHOLD) -> BorelContinuation:
    """Formal Borel transform of order ``alpha`` followed by Padé continuation."""
    m = gevrey_moments(as_rational(alpha))
    borel = formal_borel(u_hat_t, m)
    if is_entire(borel):
        return BorelContinuation(borel, float(alpha), True, None, [])
    dl, dm = default_orders(borel)
    pade = pade_continue(borel, dl if L is None else L, dm if M is None else M)
    sing = singular_directions(borel, pole_threshold, pade=pade)
    return BorelContinuation(borel, float(alpha), False, pade, sing)


def check_direction(cont: BorelContinuation, d: float, margin: float = MARGIN):
    limit = margin * cont.alpha * math.pi / 2
    close = [s for s in cont.singular if abs(_wrap_angle(d - s)) < limit]
    if close:
        raise SingularDirectionError(d, cont.singular)


@dataclass
class SummationValue:
    value: complex
    error: float
    diagnostics: dict


def sum_series(u_hat_t: TruncatedSeries1D, alpha: float, d: float, t: complex,
               L: Optional[int] = None, M: Optional[int] = None,
               pole_threshold: float = POLE_THRESHOLD, margin: float = MARGIN,
               continuation: Optional[BorelContinuation] = None) -> SummationValue:
    """Sum of ``u_hat_t`` in direction ``d`` at ``t``.

    Raises :class:`SingularDirectionError` when ``d`` lies within
    ``margin * alpha pi / 2`` of a singular direction, and
    :class:`DomainError` when ``|arg t - d| >= alpha pi / 2``.
    """
    cont = continuation or continue_borel(u_hat_t, alpha, L, M, pole_threshold)
    check_direction(cont, d, margin)
    res = laplace_along(cont.evaluator(), float(alpha), d, t)
    return SummationValue(res.value, res.error, cont.diagnostics())


@dataclass
class SummationResult:
    direction: float
    alpha: float
    t: list
    values: list
    errors: list
    pade_diagnostics: dict
    residual_report: dict = field(default_factory=dict)
    z0: complex = 0j

    def __post_init__(self):
        if not all(np.isfinite(v) for v in self.values):
            raise DomainError("summation produced non-finite values")

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "direction": self.direction,
            "alpha": self.alpha,
            "z0": [self.z0.real, self.z0.imag],
            "grid": [
                {"t": [t.real, t.imag], "u": [v.real, v.imag], "err_estimate": e}
                for t, v, e in zip(self.t, self.values, self.errors)
            ],
            "pade_diagnostics": self.pade_diagnostics,
            "residual_report": self.residual_report,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t_re", "t_im", "u_re", "u_im", "err_estimate"])
        for t, v, e in zip(self.t, self.values, self.errors):
            w.writerow([repr(t.real), repr(t.imag), repr(v.real), repr(v.imag), repr(e)])
        return buf.getvalue()


def sum_grid(u_hat_t: TruncatedSeries1D, alpha: float, d: float, ts: Sequence[complex],
             z0: complex = 0j, **kw) -> SummationResult:
    """:func:`sum_series` on a grid, sharing one Borel continuation."""
    cont = continue_borel(u_hat_t, alpha, kw.get("L"), kw.get("M"),
                          kw.get("pole_threshold", POLE_THRESHOLD))
    check_direction(cont, d, kw.get("margin", MARGIN))
    values, errors = [], []
    f = cont.evaluator()
    for t in ts:
        r = laplace_along(f, float(alpha), d, complex(t))
        values.append(r.value)
        errors.append(r.error)
    return SummationResult(float(d), float(alpha), [complex(t) for t in ts], values, errors,
                           cont.diagnostics(), z0=complex(z0))


def t_series_at(u: TruncatedSeries2D, z: complex) -> TruncatedSeries1D:
    """``sum_n u_n(z) t^n`` for a numerical ``z``, as a series in ``t``."""
    if z == 0:
        return u.t_series_at(0)
    z = complex(z)
    if z.imag == 0:
        # decimal grid points are evaluated exactly
        zq = as_rational(z.real)
        return TruncatedSeries1D(tuple(series_eval(row, zq) for row in u.rows))
    vals = [complex(series_eval(row, z)) for row in u.rows]
    return TruncatedSeries1D(tuple(vals))


def summed_field(u: TruncatedSeries2D, alpha: float, d: float, ts, zs, **kw) -> np.ndarray:
    """Sum ``u(t, z)`` in ``t`` at every ``(t, z)`` of the given axes."""
    out = np.empty((len(ts), len(zs)), dtype=complex)
    for j, z in enumerate(zs):
        cont = continue_borel(t_series_at(u, z), alpha, kw.get("L"), kw.get("M"))
        check_direction(cont, d)
        f = cont.evaluator()
        for i, t in enumerate(ts):
            out[i, j] = laplace_along(f, float(alpha), d, complex(t)).value
    return out


_D1 = np.array([1, -8, 0, 8, -1]) / 12
_D2 = np.array([-1, 16, -30, 16, -1]) / 12


def heat_residual(u: TruncatedSeries2D, alpha: float, d: float, ts, zs, ht: float = 1e-3,
                  hz: float = 1e-2, diffusivity: complex = 1.0) -> dict:
    """Finite-difference residual of ``u_t - a u_zz`` for a summed solution.

    Fourth-order centered differences with steps ``ht`` and ``hz`` at every
    point ``(t, z)``; the report holds the largest residual relative to
    ``|u_t|``.
    """
    offs = np.arange(-2, 3)
    z_axis = sorted({round(z + k * hz, 12) for z in zs for k in offs})
    cache = {}
    for z in z_axis:
        cont = continue_borel(t_series_at(u, z), alpha)
        check_direction(cont, d)
        cache[z] = cont.evaluator()

    def value(t, z):
        return laplace_along(cache[round(z, 12)], float(alpha), d, complex(t)).value

    worst, rows = 0.0, []
    for t in ts:
        for z in zs:
            ft = np.array([value(t + k * ht, z) for k in offs])
            fz = np.array([value(t, z + k * hz) for k in offs])
            ut = _D1 @ ft / ht
            uzz = _D2 @ fz / hz ** 2
            rel = float(abs(ut - diffusivity * uzz) / max(abs(ut), 1e-300))
            worst = max(worst, rel)
            rows.append({"t": complex(t).real, "z": complex(z).real, "relative_residual": rel})
    return {"max_relative_residual": worst, "steps": [ht, hz], "points": rows}
