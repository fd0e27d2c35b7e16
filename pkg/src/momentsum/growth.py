"""Coefficient growth of formal solutions versus the predicted order.

The fit model is ``log s_n = log C + n log H + sigma log M_n`` with ``M_n``
a base sequence (``n!`` by default). Asymptotic statements only constrain
large ``n``, so the default window is ``[N/3, N]``.

Note that the summability theory bounds remainders of asymptotic expansions,
not raw coefficients; the two agree up to geometric factors for the classes
used here, which the fit absorbs into ``H``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._numbers import to_float
from .errors import InvalidParameterError
from .sequences import StronglyRegularSequence, gevrey_sequence
from .series import TruncatedSeries2D, log_norm_r, norm_r
from .solver import CauchyProblem, require_orders

#: Fitted orders above this are treated as divergent by :func:`radius_estimate`.
DIVERGENT_SIGMA = 0.2
MIN_FIT_ROWS = 12


@dataclass
class GrowthReport:
    norms: list
    fitted_C: float
    fitted_H: float
    fitted_sigma: float
    predicted_sigma: Optional[float]
    fit_residual: float
    r_prime: Optional[float] = None
    window: tuple = (0, 0)
    rows_used: int = 0
    degenerate: bool = False
    base: str = "gevrey_seq(1)"

    def to_json(self) -> dict:
        return {
            "norms": [repr(float(s)) for s in self.norms],
            "fitted_C": self.fitted_C,
            "fitted_H": self.fitted_H,
            "fitted_sigma": self.fitted_sigma,
            "predicted_sigma": self.predicted_sigma,
            "fit_residual": self.fit_residual,
            "r_prime": self.r_prime,
            "window": list(self.window),
            "rows_used": self.rows_used,
            "degenerate": self.degenerate,
            "base": self.base,
        }

    def prediction(self, n: int, base: Optional[StronglyRegularSequence] = None) -> float:
        """Fitted ``C H^n M_n^sigma``; ``nan`` for degenerate fits."""
        if self.degenerate:
            return math.nan
        base = base or gevrey_sequence(1)
        log_value = (math.log(self.fitted_C) + n * math.log(self.fitted_H)
                     + self.fitted_sigma * float(base.log_value(n)))
        return math.exp(log_value) if log_value < 700 else math.inf


def predicted_order(problem: CauchyProblem) -> float:
    """Newton-polygon order ``max(0, s2 p / k - s1)``."""
    s1, s2 = require_orders(problem)
    return float(max(0, s2 * problem.p / problem.k - s1))


def coefficient_norms(u: TruncatedSeries2D, r_prime) -> list:
    """``s_n = ||u_n||_{r'}`` for every row."""
    return [norm_r(row, r_prime) for row in u.rows]


def coefficient_log_norms(u: TruncatedSeries2D, r_prime) -> list:
    return [log_norm_r(row, r_prime) for row in u.rows]


def _log(s) -> float:
    s = to_float(s) if not isinstance(s, float) else s
    return math.log(s) if s > 0 else -math.inf


def fit_moment_order(norms: Optional[Sequence], base: Optional[StronglyRegularSequence] = None,
                     window: Optional[tuple] = None, predicted_sigma: Optional[float] = None,
                     r_prime: Optional[float] = None, log_norms: Optional[Sequence] = None,
                     min_rows: int = MIN_FIT_ROWS) -> GrowthReport:
    """Least-squares fit of ``log s_n`` against ``[1, n, log M_n]``.

    Parameters
    ----------
    norms : sequence of nonnegative reals
        ``s_n`` for ``n = 0..N``.
    base : StronglyRegularSequence, optional
        Scale sequence, ``n!`` by default.
    window : (lo, hi), optional
        Inclusive row range; defaults to ``[N // 3, N]``.
    log_norms : sequence, optional
        Precomputed ``log s_n``; used instead of ``norms`` when the norms
        overflow a float.

    Zero rows are skipped. A window without nonzero rows gives a degenerate
    report with ``sigma = 0``.
    """
    base = base or gevrey_sequence(1)
    logs = list(log_norms) if log_norms is not None else [_log(s) for s in norms]
    if norms is None:
        norms = [math.exp(v) if v < 700 else math.inf for v in logs]
    n_max = len(logs) - 1
    lo, hi = window if window is not None else (n_max // 3, n_max)
    hi = min(hi, n_max)
    rows = [n for n in range(lo, hi + 1) if math.isfinite(logs[n])]
    if not rows:
        return GrowthReport([0.0] * len(logs), 0.0, 0.0, 0.0, predicted_sigma, 0.0, r_prime,
                            (lo, hi), 0, True, str(base))
    if len(rows) < min_rows:
        raise InvalidParameterError(
            f"need at least {min_rows} nonzero rows in window [{lo}, {hi}], got {len(rows)}"
        )
    x = np.array([[1.0, float(n), float(base.log_value(n))] for n in rows])
    y = np.array([logs[n] for n in rows])
    coef, *_ = np.linalg.lstsq(x, y, rcond=None)
    resid = y - x @ coef
    return GrowthReport(
        norms=list(norms),
        fitted_C=math.exp(coef[0]),
        fitted_H=math.exp(coef[1]),
        fitted_sigma=float(coef[2]),
        predicted_sigma=predicted_sigma,
        fit_residual=float(np.sqrt(np.mean(resid ** 2))),
        r_prime=r_prime,
        window=(lo, hi),
        rows_used=len(rows),
        base=str(base),
    )


def radius_estimate(norms: Optional[Sequence], divergent_sigma: float = DIVERGENT_SIGMA,
                    log_norms: Optional[Sequence] = None) -> float:
    """Cauchy-Hadamard radius ``1 / limsup s_n^{1/n}`` from a tail regression.

    Returns ``0.0`` when the tail grows factorially (fitted order above
    ``divergent_sigma``) and ``inf`` when it decays factorially or vanishes.
    """
    logs = list(log_norms) if log_norms is not None else [_log(s) for s in norms]
    finite = [n for n, v in enumerate(logs) if math.isfinite(v)]
    if finite and finite[-1] < len(logs) - len(logs) // 3:
        # the tail vanishes: a polynomial as far as the truncation can tell
        return math.inf
    if len(finite) < 8:
        raise InvalidParameterError(f"need at least 8 nonzero rows, got {len(finite)}")
    tail = finite[len(finite) // 3:]
    report = fit_moment_order(None, window=(tail[0], tail[-1]),
                              log_norms=logs, min_rows=min(len(tail), MIN_FIT_ROWS))
    if report.fitted_sigma > divergent_sigma:
        return 0.0
    if report.fitted_sigma < -divergent_sigma:
        return math.inf
    x = np.array([[1.0, float(n)] for n in tail])
    y = np.array([logs[n] for n in tail])
    (c0, slope), *_ = np.linalg.lstsq(x, y, rcond=None)
    return math.exp(-slope)
