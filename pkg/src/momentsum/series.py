"""Truncated formal power series with moment calculus.

A :class:`TruncatedSeries1D` holds ``c_0..c_N``; nothing beyond ``N`` is
ever read. Coefficients stay exact (``Fraction``) as long as every input
is rational and promote to ``mpmath.mpf`` when an irrational moment value
enters. :class:`TruncatedSeries2D` stores the ordinary ``t``-coefficients
``u_n(z)`` of ``u(t, z) = sum_n u_n(z) t^n``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

from ._numbers import div, format_number, parse_number, to_complex, to_float, to_mpf
from .errors import NonInvertibleError, TruncationError
from .sequences import MomentSequence

DEFAULT_ORDER = 64


def _coerce(c):
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, float):
        return Fraction(repr(c))
    return c


@dataclass(frozen=True)
class TruncatedSeries1D:
    coefficients: tuple

    def __post_init__(self):
        if not self.coefficients:
            raise ValueError("a truncated series needs at least one coefficient")
        object.__setattr__(self, "coefficients", tuple(_coerce(c) for c in self.coefficients))

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def __len__(self):
        return len(self.coefficients)

    def __getitem__(self, p):
        return self.coefficients[p]

    def __iter__(self):
        return iter(self.coefficients)

    def __repr__(self):
        shown = ", ".join(format_number(c) for c in self.coefficients[:6])
        tail = ", ..." if self.order > 5 else ""
        return f"TruncatedSeries1D(N={self.order}: [{shown}{tail}])"

    def truncate(self, order: int) -> "TruncatedSeries1D":
        if order > self.order:
            raise TruncationError(f"cannot extend a series of order {self.order} to {order}")
        return TruncatedSeries1D(self.coefficients[: order + 1])

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coefficients)

    def __neg__(self):
        return TruncatedSeries1D(tuple(-c for c in self.coefficients))

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries1D):
            return self + constant(other, self.order)
        return series_add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, TruncatedSeries1D):
            return self + (-_coerce(other))
        return series_add(self, -other)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries1D):
            return series_mul(self, other)
        other = _coerce(other)
        return TruncatedSeries1D(tuple(c * other for c in self.coefficients))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries1D):
            return series_mul(self, series_reciprocal(other))
        other = _coerce(other)
        return TruncatedSeries1D(tuple(div(c, other) for c in self.coefficients))

    def __call__(self, z):
        return series_eval(self, z)

    def to_json(self) -> list:
        return [format_number(c) for c in self.coefficients]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> "TruncatedSeries1D":
        return cls(tuple(parse_number(s) for s in data))


def series(coefficients: Iterable) -> TruncatedSeries1D:
    return TruncatedSeries1D(tuple(coefficients))


def zeros(order: int) -> TruncatedSeries1D:
    return TruncatedSeries1D((Fraction(0),) * (order + 1))


def constant(c, order: int) -> TruncatedSeries1D:
    return TruncatedSeries1D((c,) + (Fraction(0),) * order)


def monomial(power: int, order: int, coefficient=1) -> TruncatedSeries1D:
    coeffs = [Fraction(0)] * (order + 1)
    if power <= order:
        coeffs[power] = _coerce(coefficient)
    return TruncatedSeries1D(tuple(coeffs))


def geometric(order: int, ratio=1) -> TruncatedSeries1D:
    """Truncation of ``1 / (1 - ratio z)``."""
    r = _coerce(ratio)
    return TruncatedSeries1D(tuple(r ** p for p in range(order + 1)))


# ---------------------------------------------------------------------------
# Moment calculus
# ---------------------------------------------------------------------------


def moment_derivative(f: TruncatedSeries1D, m: MomentSequence, n: int = 1) -> TruncatedSeries1D:
    """Apply ``d_m^n``: ``c_p -> c_{p+n} m(p+n) / m(p)``; the order drops by ``n``."""
    if n < 0:
        raise ValueError("use moment_antiderivative for negative orders")
    if n > f.order:
        raise TruncationError(
            f"moment derivative of order {n} needs a series of order >= {n}, got {f.order}"
        )
    if n == 0:
        return f
    c = f.coefficients
    return TruncatedSeries1D(
        tuple(div(c[p + n] * m(p + n), m(p)) for p in range(f.order - n + 1))
    )


def moment_antiderivative(f: TruncatedSeries1D, m: MomentSequence, k: int = 1) -> TruncatedSeries1D:
    """Inverse of :func:`moment_derivative`: ``z^j -> m(j)/m(j+1) z^{j+1}``, ``k`` times."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return f
    c = f.coefficients
    out = [Fraction(0)] * k
    for j, cj in enumerate(c):
        out.append(div(cj * m(j), m(j + k)) if cj != 0 else Fraction(0))
    return TruncatedSeries1D(tuple(out))


def formal_borel(f: TruncatedSeries1D, m: MomentSequence) -> TruncatedSeries1D:
    return TruncatedSeries1D(tuple(div(c, m(p)) for p, c in enumerate(f.coefficients)))


def formal_laplace(f: TruncatedSeries1D, m: MomentSequence) -> TruncatedSeries1D:
    return TruncatedSeries1D(tuple(c * m(p) for p, c in enumerate(f.coefficients)))


# ---------------------------------------------------------------------------
# Arithmetic
# ---------------------------------------------------------------------------


def series_add(f: TruncatedSeries1D, g: TruncatedSeries1D) -> TruncatedSeries1D:
    n = min(f.order, g.order)
    return TruncatedSeries1D(tuple(f[p] + g[p] for p in range(n + 1)))


def series_mul(f: TruncatedSeries1D, g: TruncatedSeries1D) -> TruncatedSeries1D:
    """Cauchy product truncated at ``min(order f, order g)``."""
    n = min(f.order, g.order)
    a = f.coefficients
    b = g.coefficients
    nz_a = [i for i in range(n + 1) if a[i] != 0]
    nz_b = [j for j in range(n + 1) if b[j] != 0]
    out = [Fraction(0)] * (n + 1)
    for i in nz_a:
        ai = a[i]
        for j in nz_b:
            if i + j > n:
                break
            out[i + j] += ai * b[j]
    return TruncatedSeries1D(tuple(out))


def series_reciprocal(f: TruncatedSeries1D) -> TruncatedSeries1D:
    """``1/f`` to the same order.

    Only ``c_0 != 0`` is required; a small constant term is the caller's
    conditioning problem.
    """
    c = f.coefficients
    if c[0] == 0:
        raise NonInvertibleError("series with zero constant term has no reciprocal")
    inv0 = 1 / c[0]
    out = [inv0]
    nz = [j for j in range(1, len(c)) if c[j] != 0]
    for n in range(1, len(c)):
        acc = Fraction(0)
        for j in nz:
            if j > n:
                break
            acc += c[j] * out[n - j]
        out.append(-acc * inv0)
    return TruncatedSeries1D(tuple(out))


def series_eval(f: TruncatedSeries1D, z):
    """Horner evaluation; exact for rational ``z``, complex floating point otherwise."""
    if isinstance(z, (int, Fraction)) and all(isinstance(c, Fraction) for c in f.coefficients):
        acc = Fraction(0)
        for c in reversed(f.coefficients):
            acc = acc * z + c
        return acc
    if isinstance(z, (mpmath.mpf, mpmath.mpc)):
        acc = mpmath.mpc(0)
        for c in reversed(f.coefficients):
            acc = acc * z + to_mpf(c)
        return acc
    zc = complex(z)
    acc = 0j
    for c in reversed(f.coefficients):
        acc = acc * zc + to_complex(c)
    if isinstance(z, (int, float)):
        return acc.real
    return acc


def norm_r(f: TruncatedSeries1D, r) -> float:
    """``sum_{p <= N} |c_p| r^p`` (``0^0 = 1``); a truncated version of the weighted l1 norm."""
    if r < 0:
        raise ValueError(f"r must be nonnegative, got {r}")
    if r == 0:
        return abs(to_float(f[0]))
    total = mpmath.mpf(0)
    rr = to_mpf(r) if not isinstance(r, float) else mpmath.mpf(r)
    power = mpmath.mpf(1)
    for c in f.coefficients:
        if c != 0:
            total += abs(to_mpf(c)) * power
        power *= rr
    return float(total)


def log_norm_r(f: TruncatedSeries1D, r) -> float:
    """``log`` of :func:`norm_r`, safe for norms beyond the float range."""
    if r == 0:
        c = f[0]
        return float(mpmath.log(abs(to_mpf(c)))) if c != 0 else float("-inf")
    total = mpmath.mpf(0)
    rr = mpmath.mpf(r) if isinstance(r, float) else to_mpf(r)
    power = mpmath.mpf(1)
    for c in f.coefficients:
        if c != 0:
            total += abs(to_mpf(c)) * power
        power *= rr
    return float(mpmath.log(total)) if total else float("-inf")


def majorized_by(f: TruncatedSeries1D, g: TruncatedSeries1D) -> bool:
    """Coefficientwise ``|f_p| <= g_p`` on the common truncation."""
    n = min(f.order, g.order)
    return all(abs(to_mpf(f[p])) <= to_mpf(g[p]) for p in range(n + 1))


# ---------------------------------------------------------------------------
# Two variables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TruncatedSeries2D:
    """Rows ``u_0(z)..u_{N_t}(z)``, each a :class:`TruncatedSeries1D`.

    Rows may carry different ``z``-orders while a computation is running;
    :meth:`rectangle` cuts them to a uniform truncation.
    """

    rows: tuple

    def __post_init__(self):
        if not self.rows:
            raise ValueError("a 2D series needs at least one row")
        object.__setattr__(self, "rows", tuple(self.rows))

    @property
    def nt(self) -> int:
        return len(self.rows) - 1

    @property
    def nz(self) -> int:
        return min(r.order for r in self.rows)

    @property
    def is_rectangular(self) -> bool:
        return len({r.order for r in self.rows}) == 1

    def __getitem__(self, n):
        return self.rows[n]

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def coefficient(self, n: int, p: int):
        return self.rows[n][p]

    def rectangle(self, nt: int | None = None, nz: int | None = None) -> "TruncatedSeries2D":
        nt = self.nt if nt is None else nt
        nz = self.nz if nz is None else nz
        if nt > self.nt:
            raise TruncationError(f"requested t-order {nt} exceeds available {self.nt}")
        return TruncatedSeries2D(tuple(self.rows[n].truncate(nz) for n in range(nt + 1)))

    def __add__(self, other):
        nt = min(self.nt, other.nt)
        return TruncatedSeries2D(tuple(self.rows[n] + other.rows[n] for n in range(nt + 1)))

    def __neg__(self):
        return TruncatedSeries2D(tuple(-r for r in self.rows))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries2D):
            return mul_2d(self, other)
        if isinstance(other, TruncatedSeries1D):
            return TruncatedSeries2D(tuple(series_mul(r, other) for r in self.rows))
        return TruncatedSeries2D(tuple(r * other for r in self.rows))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(r.is_zero() for r in self.rows)

    def map_rows(self, fn) -> "TruncatedSeries2D":
        return TruncatedSeries2D(tuple(fn(r) for r in self.rows))

    def t_series_at(self, z) -> TruncatedSeries1D:
        """The ``t``-series ``sum_n u_n(z) t^n`` at a fixed ``z``.

        ``z = 0`` keeps coefficients exact.
        """
        if z == 0:
            return TruncatedSeries1D(tuple(r[0] for r in self.rows))
        return TruncatedSeries1D(tuple(series_eval(r, z) for r in self.rows))

    def z_coefficient_series(self, p: int) -> TruncatedSeries1D:
        """``[z^p] u`` as a series in ``t``."""
        return TruncatedSeries1D(tuple(r[p] for r in self.rows))

    def to_json(self) -> list:
        return [r.to_json() for r in self.rows]

    @classmethod
    def from_json(cls, data) -> "TruncatedSeries2D":
        return cls(tuple(TruncatedSeries1D.from_json(r) for r in data))

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def zeros_2d(nt: int, nz: int) -> TruncatedSeries2D:
    return TruncatedSeries2D(tuple(zeros(nz) for _ in range(nt + 1)))


def constant_2d(c, nt: int, nz: int) -> TruncatedSeries2D:
    rows = [constant(c, nz)] + [zeros(nz) for _ in range(nt)]
    return TruncatedSeries2D(tuple(rows))


def from_z_series(f: TruncatedSeries1D, nt: int) -> TruncatedSeries2D:
    return TruncatedSeries2D((f,) + tuple(zeros(f.order) for _ in range(nt)))


def t_variable(nt: int, nz: int) -> TruncatedSeries2D:
    rows = [zeros(nz) for _ in range(nt + 1)]
    if nt >= 1:
        rows[1] = constant(1, nz)
    return TruncatedSeries2D(tuple(rows))


def mul_2d(f: TruncatedSeries2D, g: TruncatedSeries2D) -> TruncatedSeries2D:
    nt = min(f.nt, g.nt)
    nz = min(f.nz, g.nz)
    out = []
    for n in range(nt + 1):
        acc = zeros(nz)
        for i in range(n + 1):
            if f.rows[i].is_zero() or g.rows[n - i].is_zero():
                continue
            acc = acc + series_mul(f.rows[i].truncate(nz), g.rows[n - i].truncate(nz))
        out.append(acc)
    return TruncatedSeries2D(tuple(out))


def reciprocal_2d(f: TruncatedSeries2D) -> TruncatedSeries2D:
    """``1/f`` as a series in ``t`` over ``z``-series; needs ``f(0, 0) != 0``."""
    nz = f.nz
    inv0 = series_reciprocal(f.rows[0].truncate(nz))
    out = [inv0]
    for n in range(1, f.nt + 1):
        acc = zeros(nz)
        for j in range(1, n + 1):
            if f.rows[j].is_zero():
                continue
            acc = acc + series_mul(f.rows[j].truncate(nz), out[n - j])
        out.append(-series_mul(acc, inv0))
    return TruncatedSeries2D(tuple(out))


def t_moment_derivative(u: TruncatedSeries2D, m: MomentSequence, k: int = 1) -> TruncatedSeries2D:
    """``d_{m,t}^k`` on ordinary rows: ``u_n -> u_{n+k} m(n+k) / m(n)``."""
    if k > u.nt:
        raise TruncationError(f"t-derivative of order {k} needs t-order >= {k}, got {u.nt}")
    return TruncatedSeries2D(
        tuple(u.rows[n + k] * div(m(n + k), m(n)) for n in range(u.nt - k + 1))
    )


def z_moment_derivative(u: TruncatedSeries2D, m: MomentSequence, n: int = 1) -> TruncatedSeries2D:
    return u.map_rows(lambda r: moment_derivative(r, m, n))


def z_moment_antiderivative(u: TruncatedSeries2D, m: MomentSequence, k: int = 1) -> TruncatedSeries2D:
    return u.map_rows(lambda r: moment_antiderivative(r, m, k))
