"""Formal solutions of ``(d_{m1,t}^k - a(z) d_{m2,z}^p) u = f`` with Cauchy data.

Two independent routes are provided. :func:`solve_formal` runs the row
recurrence ``u*_{n+k} = a d^p u*_n + f*_n`` in the normalized rows
``u*_n = m1(n) u_n``. :func:`fixed_point_solution` rebuilds the solution
from its values ``psi_j(t) = [z^j] u`` through the Neumann-type series
``omega = sum_q omega_q`` for ``omega = d_{m2,z}^p u``. Both stay in exact
arithmetic when the data and the moment tables are rational.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from ._numbers import as_rational, div
from .errors import ConfigurationError, InvalidParameterError, NonInvertibleError, TruncationError
from .sequences import MomentSequence
from .series import (
    TruncatedSeries1D,
    TruncatedSeries2D,
    moment_derivative,
    series_mul,
    series_reciprocal,
    t_moment_derivative,
    z_moment_antiderivative,
    zeros,
)


@dataclass(frozen=True)
class CauchyProblem:
    """Data of the Cauchy problem.

    ``f`` holds ordinary ``t``-coefficients ``f_n(z)``; ``None`` means zero.
    ``s1``/``s2`` default to the claimed orders of ``m1``/``m2``.
    """

    k: int
    p: int
    m1: MomentSequence
    m2: MomentSequence
    a: TruncatedSeries1D
    phi: tuple
    f: Optional[TruncatedSeries2D] = None
    s1: Optional[Fraction] = None
    s2: Optional[Fraction] = None
    r: Fraction = Fraction(1)

    def __post_init__(self):
        if not (isinstance(self.k, int) and self.k >= 1):
            raise InvalidParameterError(f"k must be a positive integer, got {self.k}")
        if not self.k < self.p:
            raise InvalidParameterError(f"k<p required (got k={self.k}, p={self.p})")
        if self.a[0] == 0:
            raise NonInvertibleError("a(0) must be nonzero")
        object.__setattr__(self, "phi", tuple(self.phi))
        if len(self.phi) != self.k:
            raise InvalidParameterError(
                f"expected {self.k} initial functions phi_0..phi_{self.k - 1}, got {len(self.phi)}"
            )
        for name, given, m in (("s1", self.s1, self.m1), ("s2", self.s2, self.m2)):
            if given is None and m.claimed_order is not None:
                object.__setattr__(self, name, m.claimed_order.s)
            elif given is not None:
                object.__setattr__(self, name, as_rational(given))
        object.__setattr__(self, "r", as_rational(self.r))

    def data_order(self) -> int:
        """Smallest ``z``-truncation among the data series."""
        orders = [self.a.order] + [ph.order for ph in self.phi]
        if self.f is not None:
            orders.append(self.f.nz)
        return min(orders)

    def f_row(self, n: int, order: int) -> TruncatedSeries1D:
        if self.f is None or n > self.f.nt:
            if self.f is not None and n > self.f.nt:
                raise TruncationError(
                    f"f has t-order {self.f.nt}, row {n} is needed"
                )
            return zeros(order)
        return _cut(self.f.rows[n], order, f"f_{n}")


@dataclass(frozen=True)
class FormalSolution:
    """Rectangle ``(nt, nz)`` of ordinary coefficients ``u_n(z)``."""

    u: TruncatedSeries2D
    method: str
    nt: int
    nz: int
    meta: dict = field(default_factory=dict, compare=False)

    def starred_rows(self, m1: MomentSequence) -> TruncatedSeries2D:
        """Rows ``u*_n = m1(n) u_n`` of the normalized expansion."""
        return TruncatedSeries2D(tuple(r * m1(n) for n, r in enumerate(self.u.rows)))

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "nt": self.nt,
            "nz": self.nz,
            "coefficients": self.u.to_json(),
        }

    def to_csv(self) -> str:
        """Rows ``n, p, coefficient`` with exact coefficients as text."""
        lines = ["n,p,coefficient"]
        for n, row in enumerate(self.u.rows):
            for q, c in enumerate(row.coefficients):
                lines.append(f"{n},{q},{c}")
        return "\n".join(lines) + "\n"


def _cut(s: TruncatedSeries1D, order: int, name: str) -> TruncatedSeries1D:
    if s.order < order:
        raise TruncationError(
            f"truncation budget exceeded: {name} has z-order {s.order}, {order} is required"
        )
    return s.truncate(order)


def z_budget(problem: CauchyProblem, nt: int, nz: int) -> int:
    """``z``-order the data must carry to produce an exact ``(nt, nz)`` rectangle."""
    return nz + problem.p * (nt // problem.k)


def solve_formal(problem: CauchyProblem, nt: int, nz: int) -> FormalSolution:
    """Exact rectangle ``(nt, nz)`` of the formal solution via the row recurrence.

    Every ``k`` rows consume ``p`` orders in ``z``; the data must therefore be
    truncated at ``nz + p * floor(nt / k)`` or beyond, otherwise a
    :class:`TruncationError` states the required budget.
    """
    k, p, m1, m2 = problem.k, problem.p, problem.m1, problem.m2
    if nt < 0 or nz < 0:
        raise InvalidParameterError("truncation orders must be nonnegative")
    budget = z_budget(problem, nt, nz)
    if problem.data_order() < budget:
        raise TruncationError(
            f"truncation budget: data must be expanded to z-order >= {budget} "
            f"for nt={nt}, nz={nz} (k={k}, p={p}); available {problem.data_order()}"
        )
    if problem.f is not None and problem.f.nt < nt - k:
        raise TruncationError(f"f needs t-order >= {nt - k}, has {problem.f.nt}")

    def need(n):
        return nz + p * ((nt - n) // k)

    m1_0 = m1(0)
    rows = [None] * (nt + 1)
    for j in range(min(k, nt + 1)):
        rows[j] = _cut(problem.phi[j], need(j), f"phi_{j}") * m1_0
    for n in range(0, nt - k + 1):
        target = need(n + k)
        dp = moment_derivative(rows[n], m2, p).truncate(target)
        nxt = series_mul(problem.a.truncate(target), dp)
        fn = problem.f_row(n, target)
        if not fn.is_zero():
            nxt = nxt + fn * m1(n)
        rows[n + k] = nxt
    out = tuple(rows[n].truncate(nz) * div(1, m1(n)) for n in range(nt + 1))
    return FormalSolution(TruncatedSeries2D(out), "recurrence", nt, nz, {"z_budget": budget})


def residual(problem: CauchyProblem, sol: FormalSolution) -> TruncatedSeries2D:
    """``(d_{m1,t}^k - a d_{m2,z}^p) u - f`` on the rectangle ``(nt - k, nz - p)``."""
    k, p = problem.k, problem.p
    u = sol.u
    nt, nz = u.nt - k, u.nz - p
    if nt < 0 or nz < 0:
        raise TruncationError("solution rectangle too small for a residual")
    dt = t_moment_derivative(u, problem.m1, k)
    a = problem.a.truncate(nz)
    rows = []
    for n in range(nt + 1):
        lhs = dt.rows[n].truncate(nz)
        rhs = series_mul(a, moment_derivative(u.rows[n], problem.m2, p).truncate(nz))
        rows.append(lhs - rhs - problem.f_row(n, nz))
    return TruncatedSeries2D(tuple(rows))


def initial_values(problem: CauchyProblem, sol: FormalSolution) -> list:
    """``d_{m1,t}^j u(0, z)`` for ``j < k``, to compare with ``phi_j``."""
    m1 = problem.m1
    return [sol.u.rows[j] * div(m1(j), m1(0)) for j in range(problem.k)]


def boundary_series(sol: FormalSolution, p: int) -> list:
    """``psi_j(t) = m2(0)/m2(j) d_{m2,z}^j u(t, 0) = [z^j] u`` for ``j < p``."""
    return [sol.u.z_coefficient_series(j) for j in range(p)]


def fixed_point_terms(problem: CauchyProblem, Q: int, nt: int, nz: int,
                      psi: Optional[Sequence[TruncatedSeries1D]] = None) -> list:
    """``omega_0 .. omega_Q`` with ``omega_0 = g``.

    ``omega_q`` carries ``t``-order ``nt + (Q - q) k`` and ``z``-order ``nz - p``,
    enough to produce rows ``0..nt`` of the solution.
    """
    k, p, m1, m2 = problem.k, problem.p, problem.m1, problem.m2
    if Q < 0:
        raise InvalidParameterError("Q must be nonnegative")
    if nz < p:
        raise InvalidParameterError(f"nz must be at least p={p}")
    zo = nz - p
    t_len = nt + Q * k
    if psi is None:
        psi = _bootstrap_psi(problem, Q, nt)
    psi = list(psi)
    if len(psi) != p:
        raise InvalidParameterError(f"expected {p} boundary series psi_0..psi_{p - 1}")
    for j, ps in enumerate(psi):
        if ps.order < t_len + k:
            raise TruncationError(f"psi_{j} needs t-order >= {t_len + k}, has {ps.order}")

    a_inv = series_reciprocal(_cut(problem.a, zo, "a"))
    g_rows = []
    for n in range(t_len + 1):
        scale = div(m1(n + k), m1(n))
        row = [psi[j][n + k] * scale if j <= zo else None for j in range(p)]
        coeffs = [Fraction(0)] * (zo + 1)
        for j, c in enumerate(row):
            if c is not None:
                coeffs[j] = c
        base = TruncatedSeries1D(tuple(coeffs)) - problem.f_row(n, zo)
        g_rows.append(series_mul(a_inv, base))
    omega = [TruncatedSeries2D(tuple(g_rows))]
    for _ in range(Q):
        prev = omega[-1]
        shifted = z_moment_antiderivative(prev, m2, p).rectangle(nz=zo)
        nxt = t_moment_derivative(shifted, m1, k).map_rows(lambda r: series_mul(a_inv, r))
        omega.append(nxt)
    return omega


def fixed_point_solution(problem: CauchyProblem, Q: int, nt: int, nz: int,
                         psi: Optional[Sequence[TruncatedSeries1D]] = None) -> FormalSolution:
    """Solution rebuilt as ``sum_j psi_j(t) z^j + d_{m2,z}^{-p} sum_{q<=Q} omega_q``.

    ``psi`` defaults to the boundary series of a recurrence run. Terms with
    ``q > Q`` only touch ``z^{p(Q+2)}`` and beyond, so the returned rectangle
    has ``z``-order ``min(nz, p (Q + 2) - 1)``.
    """
    if Q < 1:
        raise InvalidParameterError("Q must be at least 1")
    p = problem.p
    if psi is None:
        psi = _bootstrap_psi(problem, Q, nt)
    omega = fixed_point_terms(problem, Q, nt, nz, psi)
    total_rows = []
    for n in range(nt + 1):
        acc = omega[0].rows[n]
        for q in range(1, Q + 1):
            acc = acc + omega[q].rows[n]
        total_rows.append(acc)
    w = TruncatedSeries2D(tuple(total_rows))
    u_tail = z_moment_antiderivative(w, problem.m2, p)
    rows = []
    for n in range(nt + 1):
        coeffs = list(u_tail.rows[n].coefficients)
        for j in range(p):
            coeffs[j] = coeffs[j] + psi[j][n]
        rows.append(TruncatedSeries1D(tuple(coeffs)))
    valid = min(nz, p * (Q + 2) - 1)
    u = TruncatedSeries2D(tuple(rows)).rectangle(nz=valid)
    return FormalSolution(u, "fixed_point", nt, valid, {"Q": Q, "requested_nz": nz})


def _bootstrap_psi(problem: CauchyProblem, Q: int, nt: int):
    t_len = nt + Q * problem.k + problem.k
    boot = solve_formal(problem, t_len, problem.p - 1)
    return boundary_series(boot, problem.p)


def require_orders(problem: CauchyProblem):
    if problem.s1 is None or problem.s2 is None:
        raise ConfigurationError(
            "claimed orders s1, s2 are required (moment sequences without a Gevrey order)"
        )
    return problem.s1, problem.s2
