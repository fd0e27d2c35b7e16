"""Scalar helpers shared by the exact and high-precision code paths.

Coefficients are either exact (``int``/``Fraction``) or ``mpmath.mpf``.
Mixed arithmetic already promotes to ``mpf``; comparisons and conversions
do not, which is what these helpers are for.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

import mpmath

#: Working precision (decimal digits) for every Gamma-valued table.
DIGITS = 50
if mpmath.mp.dps < DIGITS:
    mpmath.mp.dps = DIGITS


def is_exact(x) -> bool:
    return isinstance(x, Rational)


def as_rational(x) -> Fraction:
    """Exact rational from an int, Fraction, decimal string or float.

    Floats go through their shortest repr so that ``0.1`` becomes ``1/10``.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as a rational number")


def to_mpf(x) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, (mpmath.mpf, mpmath.mpc)):
        return x
    return mpmath.mpf(x)


def to_mpc(x) -> mpmath.mpc:
    if isinstance(x, complex):
        return mpmath.mpc(x)
    return mpmath.mpc(to_mpf(x)) if not isinstance(x, mpmath.mpc) else x


def to_float(x) -> float:
    if isinstance(x, Fraction):
        try:
            return x.numerator / x.denominator
        except OverflowError:
            return float(to_mpf(x))
    return float(x)


def to_complex(x) -> complex:
    if isinstance(x, (complex, mpmath.mpc)):
        return complex(x)
    return complex(to_float(x))


def is_zero(x) -> bool:
    return x == 0


def log_abs(x) -> float:
    """``log|x|`` without overflowing for huge exact values."""
    if isinstance(x, Fraction):
        x = abs(x)
        if x == 0:
            return -math.inf
        return math.log(x.numerator) - math.log(x.denominator)
    if isinstance(x, int):
        return math.log(abs(x)) if x else -math.inf
    x = abs(x)
    return float(mpmath.log(x)) if x else -math.inf


def div(a, b):
    """``a / b``; mpmath does not accept a ``Fraction`` numerator."""
    if isinstance(a, Fraction) and isinstance(b, (mpmath.mpf, mpmath.mpc)):
        return to_mpf(a) / b
    return a / b


def less_equal(a, b) -> bool:
    if is_exact(a) and is_exact(b):
        return a <= b
    return to_mpf(a) <= to_mpf(b)


def format_number(x) -> str:
    """Serialize a coefficient: exact values as ``num/den``, others as decimals."""
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, mpmath.mpc):
        return f"{mpmath.nstr(x.real, 30)}+{mpmath.nstr(x.imag, 30)}j"
    if isinstance(x, mpmath.mpf):
        return mpmath.nstr(x, 30)
    return repr(x)


def parse_number(text: str):
    if "e" in text.lower() or ("." in text and "/" not in text):
        return mpmath.mpf(text)
    return Fraction(text)
