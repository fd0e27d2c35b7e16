"""Padé approximants of truncated series and their poles.

The linear system for the denominator is solved in multiprecision. A
numerically singular system means the series is matched by a lower
denominator degree; the degree is then reduced, with a warning, until the
system has full rank.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import List

import mpmath

from ._numbers import to_mpc, to_mpf
from .errors import InvalidParameterError, PadeError
from .series import TruncatedSeries1D

PADE_DPS = 60


class PadeRankWarning(UserWarning):
    pass


@dataclass
class Pole:
    location: complex
    residue: complex

    @property
    def modulus(self) -> float:
        return abs(self.location)

    @property
    def argument(self) -> float:
        return math.atan2(self.location.imag, self.location.real)


@dataclass
class PadeApproximant:
    """``P / Q`` with ``Q(0) = 1``; poles sorted by modulus."""

    numerator: list
    denominator: list
    poles: List[Pole] = field(default_factory=list)
    requested: tuple = (0, 0)
    reduced: bool = False

    @property
    def L(self) -> int:
        return len(self.numerator) - 1

    @property
    def M(self) -> int:
        return len(self.denominator) - 1

    def __call__(self, x):
        with mpmath.workdps(PADE_DPS):
            return complex(mpmath.polyval(self.numerator[::-1], x)
                           / mpmath.polyval(self.denominator[::-1], x))

    def evaluator(self):
        """Fast double precision evaluator for numpy arrays."""
        import numpy as np

        num = np.array([complex(c) for c in self.numerator[::-1]])
        den = np.array([complex(c) for c in self.denominator[::-1]])

        def f(x):
            return np.polyval(num, x) / np.polyval(den, x)

        return f

    def diagnostics(self) -> dict:
        return {
            "L": self.L,
            "M": self.M,
            "requested": list(self.requested),
            "reduced": self.reduced,
            "poles": [
                {"re": p.location.real, "im": p.location.imag,
                 "residue_abs": abs(p.residue), "arg": p.argument}
                for p in self.poles
            ],
        }


def _rank(matrix, tol):
    if matrix.rows == 0:
        return 0
    if all(mpmath.im(x) == 0 for x in matrix):
        real = mpmath.matrix([[mpmath.re(matrix[i, j]) for j in range(matrix.cols)]
                              for i in range(matrix.rows)])
        s = mpmath.svd_r(real, compute_uv=False)
    else:
        s = mpmath.svd_c(matrix, compute_uv=False)
    top = max(abs(v) for v in s)
    if top == 0:
        return 0
    return sum(1 for v in s if abs(v) > tol * top)


def pade_continue(f: TruncatedSeries1D, L: int, M: int) -> PadeApproximant:
    """``[L/M]`` Padé approximant of ``f``, matching it through order ``L + M``."""
    if L < 0 or M < 0:
        raise InvalidParameterError("L and M must be nonnegative")
    if L + M > f.order:
        raise InvalidParameterError(f"L + M = {L + M} exceeds the series order {f.order}")
    requested = (L, M)
    with mpmath.workdps(PADE_DPS):
        c = [to_mpc(x) if isinstance(x, complex) else to_mpf(x) for x in f.coefficients]
        tol = mpmath.mpf(10) ** (-(PADE_DPS - 15))
        m_eff = M
        while m_eff > 0:
            A = mpmath.matrix(m_eff, m_eff)
            for i in range(m_eff):
                for j in range(m_eff):
                    idx = L + i - j
                    A[i, j] = c[idx] if idx >= 0 else 0
            rank = _rank(A, tol)
            if rank == m_eff:
                break
            m_eff = rank
        if m_eff != M:
            warnings.warn(
                f"Padé system for [{L}/{M}] is rank deficient; using [{L}/{m_eff}]",
                PadeRankWarning,
                stacklevel=2,
            )
        if m_eff > 0:
            rhs = mpmath.matrix([-c[L + i + 1] for i in range(m_eff)])
            try:
                q_tail = mpmath.lu_solve(A, rhs)
            except ZeroDivisionError as exc:
                raise PadeError(f"Padé solve failed for [{L}/{m_eff}]") from exc
            q = [mpmath.mpf(1)] + [q_tail[i] for i in range(m_eff)]
        else:
            q = [mpmath.mpf(1)]
        p = []
        for i in range(L + 1):
            acc = mpmath.mpf(0)
            for j in range(min(i, m_eff) + 1):
                acc += q[j] * c[i - j]
            p.append(acc)
        poles = _poles(p, q)
    return PadeApproximant(p, q, poles, requested, m_eff != M)


def _poles(p, q) -> List[Pole]:
    # trailing zeros of q lower the true degree
    deg = len(q) - 1
    while deg > 0 and abs(q[deg]) < mpmath.mpf(10) ** (-(PADE_DPS - 10)):
        deg -= 1
    if deg == 0:
        return []
    try:
        roots = mpmath.polyroots(q[: deg + 1][::-1], maxsteps=400, extraprec=200)
    except mpmath.libmp.NoConvergence as exc:
        raise PadeError("denominator roots did not converge") from exc
    dq = [k * q[k] for k in range(1, deg + 1)]
    out = []
    for r in roots:
        num = mpmath.polyval(p[::-1], r)
        den = mpmath.polyval(dq[::-1], r)
        res = num / den if den != 0 else mpmath.inf
        out.append(Pole(complex(r), complex(res)))
    out.sort(key=lambda pl: (pl.modulus, pl.argument))
    return out
