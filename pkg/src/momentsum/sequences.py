"""Strongly regular sequences, moment sequences and their audits.

Two families live here. A :class:`StronglyRegularSequence` ``M_p`` is the
growth scale (Gevrey ``p!^alpha`` and powers of it); a :class:`MomentSequence`
``m(p)`` is what the moment derivative divides by (``Gamma(1 + alpha p)``,
q-factorials, products). Values are exact whenever they can be, and
``mpmath.mpf`` at 50 digits otherwise. Tables are memoized per instance.
"""
from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import mpmath

from ._numbers import as_rational, is_exact, less_equal, to_mpf
from .errors import InvalidParameterError


class _Memo:
    """Thread-safe append-only table ``p -> value``."""

    def __init__(self):
        self._values = {}
        self._lock = threading.Lock()

    def get(self, p, compute):
        try:
            return self._values[p]
        except KeyError:
            pass
        value = compute(p)
        with self._lock:
            return self._values.setdefault(p, value)


def _positive_rational(x, name):
    try:
        value = as_rational(x)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InvalidParameterError(f"{name} must be a number, got {x!r}") from exc
    if value <= 0:
        raise InvalidParameterError(f"{name} must be positive, got {x}")
    return value


def _format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# Strongly regular sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StronglyRegularSequence:
    """Positive sequence ``M_p`` with ``M_0 = 1``.

    ``kind`` is one of ``"gevrey"`` (``params = (alpha,)``), ``"power"``
    (``params = (base, s)``) or ``"custom"`` (``params = (table,)``).
    """

    kind: str
    params: tuple
    _memo: _Memo = field(default_factory=_Memo, repr=False)

    def __eq__(self, other):
        if not isinstance(other, StronglyRegularSequence):
            return NotImplemented
        return self.kind == other.kind and self.params == other.params

    def __hash__(self):
        return hash((self.kind, self.params))

    def __str__(self):
        if self.kind == "gevrey":
            return f"gevrey_seq({_format_rational(self.params[0])})"
        if self.kind == "power":
            return f"({self.params[0]})^{_format_rational(self.params[1])}"
        return f"custom_seq(len={len(self.params[0])})"

    @property
    def order(self) -> Fraction:
        """Gevrey order for Gevrey-type sequences (``alpha`` or ``s * alpha``)."""
        if self.kind == "gevrey":
            return self.params[0]
        if self.kind == "power":
            return self.params[0].order * self.params[1]
        raise InvalidParameterError("custom tables carry no Gevrey order")

    def __getitem__(self, p: int):
        return self.value(p)

    def value(self, p: int):
        if p < 0:
            raise IndexError(p)
        return self._memo.get(p, self._compute)

    def _compute(self, p):
        if self.kind == "gevrey":
            alpha = self.params[0]
            if alpha.denominator == 1:
                return Fraction(math.factorial(p) ** alpha.numerator)
            return mpmath.factorial(p) ** to_mpf(alpha)
        if self.kind == "power":
            base, s = self.params
            v = base.value(p)
            if is_exact(v) and s.denominator == 1:
                return v ** s.numerator
            return to_mpf(v) ** to_mpf(s)
        table = self.params[0]
        if p >= len(table):
            raise IndexError(f"custom table has only {len(table)} entries (asked for p={p})")
        return table[p]

    def log_value(self, p: int):
        """``log M_p`` without building the (possibly enormous) value."""
        if self.kind == "gevrey":
            return to_mpf(self.params[0]) * mpmath.loggamma(p + 1)
        if self.kind == "power":
            return to_mpf(self.params[1]) * self.params[0].log_value(p)
        return mpmath.log(to_mpf(self.value(p)))


def gevrey_sequence(alpha) -> StronglyRegularSequence:
    """Gevrey sequence ``M_p = (p!)^alpha``."""
    return StronglyRegularSequence("gevrey", (_positive_rational(alpha, "alpha"),))


def power_sequence(base: StronglyRegularSequence, s) -> StronglyRegularSequence:
    """``M_p^s``; strongly regular whenever ``base`` is."""
    return StronglyRegularSequence("power", (base, _positive_rational(s, "s")))


def custom_sequence(table: Sequence) -> StronglyRegularSequence:
    table = tuple(as_rational(v) if isinstance(v, (int, str)) else v for v in table)
    if not table or table[0] != 1:
        raise InvalidParameterError("custom sequences must start with M_0 = 1")
    if any(less_equal(v, 0) for v in table):
        raise InvalidParameterError("custom sequence entries must be positive")
    return StronglyRegularSequence("custom", (table,))


# ---------------------------------------------------------------------------
# Moment sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClaimedOrder:
    base: StronglyRegularSequence
    s: Fraction


@dataclass(frozen=True, eq=False)
class MomentSequence:
    """Positive sequence ``m(p)`` used by moment derivatives.

    ``kind`` is ``"gevrey"`` (``m(p) = Gamma(1 + alpha p)``), ``"qfact"``
    (``[p]_q!``), ``"product"`` or ``"custom"``.
    """

    kind: str
    params: tuple
    claimed_order: Optional[ClaimedOrder] = None
    _memo: _Memo = field(default_factory=_Memo, repr=False)

    def __eq__(self, other):
        if not isinstance(other, MomentSequence):
            return NotImplemented
        if self.kind == "custom" or other.kind == "custom":
            return self is other
        return self.kind == other.kind and self.params == other.params

    def __hash__(self):
        return hash((self.kind, self.params)) if self.kind != "custom" else id(self)

    def __str__(self):
        return self.spec()

    def spec(self) -> str:
        """Text form accepted by the problem-file parser."""
        if self.kind == "gevrey":
            return f"gevrey({_format_rational(self.params[0])})"
        if self.kind == "qfact":
            return f"qfact({_format_rational(self.params[0])})"
        if self.kind == "product":
            return f"product({self.params[0].spec()}, {self.params[1].spec()})"
        return "custom"

    def __call__(self, p: int):
        return self.value(p)

    def value(self, p: int):
        if p < 0:
            raise IndexError(p)
        if self.kind == "qfact":
            # built bottom-up so deep tables never recurse
            for j in range(p + 1):
                self._memo.get(j, self._compute)
        return self._memo.get(p, self._compute)

    def _compute(self, p):
        if self.kind == "gevrey":
            ap = self.params[0] * p
            if ap.denominator == 1:
                return Fraction(math.factorial(ap.numerator))
            return mpmath.gamma(1 + to_mpf(ap))
        if self.kind == "qfact":
            if p == 0:
                return Fraction(1)
            q = self.params[0]
            return self._memo.get(p - 1, self._compute) * (1 - q ** p) / (1 - q)
        if self.kind == "product":
            m1, m2 = self.params
            return m1.value(p) * m2.value(p)
        source = self.params[0]
        v = source(p) if callable(source) else source[p]
        return as_rational(v) if isinstance(v, (int, str)) else v

    def log_value(self, p: int):
        if self.kind == "gevrey":
            return mpmath.loggamma(1 + to_mpf(self.params[0]) * p)
        if self.kind == "product":
            return self.params[0].log_value(p) + self.params[1].log_value(p)
        return mpmath.log(to_mpf(self.value(p)))


def gevrey_moments(alpha) -> MomentSequence:
    """Moments ``Gamma(1 + alpha p)`` of the Gevrey kernel of order ``alpha``."""
    a = _positive_rational(alpha, "alpha")
    return MomentSequence("gevrey", (a,), ClaimedOrder(gevrey_sequence(1), a))


def q_factorial_moments(q) -> MomentSequence:
    """``[p]_q! = prod_{h<=p} (1 + q + ... + q^{h-1})`` for ``0 < q < 1``."""
    try:
        qq = as_rational(q)
    except (TypeError, ValueError) as exc:
        raise InvalidParameterError(f"q must be a number, got {q!r}") from exc
    if not 0 < qq < 1:
        raise InvalidParameterError(f"q must lie in (0, 1), got {q}")
    return MomentSequence("qfact", (qq,))


def product_moments(m1: MomentSequence, m2: MomentSequence) -> MomentSequence:
    claimed = None
    c1, c2 = m1.claimed_order, m2.claimed_order
    if c1 is not None and c2 is not None and c1.base == c2.base:
        claimed = ClaimedOrder(c1.base, c1.s + c2.s)
    return MomentSequence("product", (m1, m2), claimed)


def custom_moments(values, claimed_order: Optional[ClaimedOrder] = None) -> MomentSequence:
    """Moment sequence from a table or a callable ``p -> m(p)``."""
    if not callable(values):
        values = tuple(values)
    return MomentSequence("custom", (values,), claimed_order)


# ---------------------------------------------------------------------------
# Audits
# ---------------------------------------------------------------------------


@dataclass
class PropertyReport:
    property: str
    prefix: int
    holds: bool
    witness: float
    violation_index: Optional[int] = None
    note: str = ""

    def to_json(self) -> dict:
        return {
            "property": self.property,
            "prefix": self.prefix,
            "holds": self.holds,
            "witness": self.witness,
            "violation_index": self.violation_index,
            "note": self.note,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _check_prefix(prefix):
    if prefix < 2:
        raise InvalidParameterError(f"prefix must be at least 2, got {prefix}")


def check_lc(seq, prefix: int) -> PropertyReport:
    """Exact log-convexity check ``M_p^2 <= M_{p-1} M_{p+1}`` for ``1 <= p < prefix``.

    The witness is the largest ratio ``M_p^2 / (M_{p-1} M_{p+1})``; it is at
    most one exactly when the property holds.
    """
    _check_prefix(prefix)
    worst = mpmath.mpf(0)
    violation = None
    for p in range(1, prefix):
        lhs = seq[p] * seq[p]
        rhs = seq[p - 1] * seq[p + 1]
        if not less_equal(lhs, rhs) and violation is None:
            violation = p
        worst = max(worst, to_mpf(lhs) / to_mpf(rhs))
    return PropertyReport("lc", prefix, violation is None, float(worst), violation)


def check_mg(seq, prefix: int, bound=None) -> PropertyReport:
    """Smallest ``A_1`` with ``M_{p+q} <= A_1^{p+q} M_p M_q`` for ``p + q <= prefix``."""
    _check_prefix(prefix)
    logs = [seq.log_value(p) for p in range(prefix + 1)]
    witness = mpmath.mpf(0)
    first_bad = None
    for n in range(1, prefix + 1):
        worst_n = max((logs[n] - logs[p] - logs[n - p]) / n for p in range(n + 1))
        a1 = mpmath.exp(worst_n)
        witness = max(witness, a1)
        if bound is not None and first_bad is None and a1 > to_mpf(bound) * (1 + mpmath.mpf(10) ** -30):
            first_bad = n
    holds = first_bad is None
    return PropertyReport("mg", prefix, holds, float(witness), first_bad,
                          "witness fitted on a finite prefix")


def check_snq(seq, prefix: int, bound=None) -> PropertyReport:
    """Smallest ``A_2`` for the strong non-quasianalyticity sums cut at ``prefix``.

    Prefix evidence only: the real condition involves an infinite tail.
    """
    _check_prefix(prefix)
    logs = [seq.log_value(p) for p in range(prefix + 1)]
    ratio = [mpmath.exp(logs[q] - logs[q + 1]) for q in range(prefix)]  # M_q / M_{q+1}
    tail = mpmath.mpf(0)
    witness = mpmath.mpf(0)
    first_bad = None
    for p in range(prefix - 1, -1, -1):
        tail += ratio[p] / (p + 1)
        a2 = tail / ratio[p]
        witness = max(witness, a2)
        if bound is not None and a2 > to_mpf(bound):
            first_bad = p
    holds = first_bad is None
    return PropertyReport("snq", prefix, holds, float(witness), first_bad,
                          "prefix evidence only; the defining sum is infinite")


def check_superadditive(seq, prefix: int) -> PropertyReport:
    """``M_p M_q <= M_{p+q}`` for all ``p + q <= prefix`` (a consequence of lc)."""
    _check_prefix(prefix)
    violation = None
    worst = mpmath.mpf(0)
    for n in range(prefix + 1):
        for p in range(n + 1):
            lhs = seq[p] * seq[n - p]
            rhs = seq[n]
            worst = max(worst, to_mpf(lhs) / to_mpf(rhs))
            if violation is None and not less_equal(lhs, rhs):
                violation = n
    return PropertyReport("superadditive", prefix, violation is None, float(worst), violation)


def check_power_inequality(seq, prefix: int) -> PropertyReport:
    """``M_p^s <= M_{ps}`` for integers ``s >= 0`` with ``p s <= prefix``."""
    _check_prefix(prefix)
    violation = None
    for p in range(1, prefix + 1):
        for s in range(0, prefix // p + 1):
            if not less_equal(seq[p] ** s, seq[p * s]):
                violation = p * s
                break
        if violation is not None:
            break
    return PropertyReport("power", prefix, violation is None, 1.0 if violation is None else 0.0,
                          violation)


@dataclass
class OrderReport:
    s: Fraction
    prefix: int
    a3: float
    a4: float
    holds: bool


def check_order(m: MomentSequence, prefix: int, base=None, s=None) -> OrderReport:
    """Fit ``A_3, A_4`` in ``A_3^p M_p^s <= m(p) <= A_4^p M_p^s`` on ``1 <= p <= prefix``."""
    if base is None or s is None:
        if m.claimed_order is None:
            raise InvalidParameterError("moment sequence has no claimed order")
        base = base or m.claimed_order.base
        s = m.claimed_order.s if s is None else s
    s = as_rational(s)
    ratios = []
    for p in range(1, prefix + 1):
        log_ratio = (m.log_value(p) - to_mpf(s) * base.log_value(p)) / p
        ratios.append(mpmath.exp(log_ratio))
    a3, a4 = min(ratios), max(ratios)
    return OrderReport(s, prefix, float(a3), float(a4), bool(a3 > 0 and mpmath.isfinite(a4)))


# ---------------------------------------------------------------------------
# Growth function and index
# ---------------------------------------------------------------------------


def growth_function_M(seq, t) -> float:
    """``M(t) = sup_p log(t^p / M_p)`` with ``M(0) = 0``.

    The scan stops after three consecutive strict decreases of ``t^p / M_p``,
    which is safe because log-convexity makes the sequence unimodal.
    """
    if t < 0:
        raise InvalidParameterError(f"t must be nonnegative, got {t}")
    if t == 0:
        return 0.0
    log_t = mpmath.log(to_mpf(t) if not isinstance(t, float) else mpmath.mpf(t))
    best = mpmath.mpf(0)
    prev = mpmath.mpf(0)
    drops = 0
    p = 0
    while drops < 3:
        p += 1
        current = p * log_t - seq.log_value(p)
        best = max(best, current)
        drops = drops + 1 if current < prev else 0
        prev = current
    return float(best)


@dataclass(frozen=True)
class GrowthFunction:
    sequence: StronglyRegularSequence

    def __call__(self, t) -> float:
        return growth_function_M(self.sequence, t)


def omega_estimate(seq, P: int) -> float:
    """Finite-``P`` estimate ``log(M_{P+1}/M_P) / log P`` of the growth index."""
    if P < 10:
        raise InvalidParameterError(f"P must be at least 10, got {P}")
    return float((seq.log_value(P + 1) - seq.log_value(P)) / mpmath.log(P))
