import json
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momentsum.errors import InvalidParameterError
from momentsum.sequences import (
    check_lc,
    check_mg,
    check_order,
    check_power_inequality,
    check_snq,
    check_superadditive,
    custom_moments,
    custom_sequence,
    gevrey_moments,
    gevrey_sequence,
    growth_function_M,
    omega_estimate,
    power_sequence,
    product_moments,
    q_factorial_moments,
)

SEQUENCES = [
    gevrey_sequence(1),
    gevrey_sequence(Fraction(1, 2)),
    gevrey_sequence(Fraction(3, 2)),
    power_sequence(gevrey_sequence(1), 2),
]


def test_gevrey_integer_values_exact():
    m = gevrey_moments(1)
    assert [m(p) for p in range(6)] == [1, 1, 2, 6, 24, 120]
    assert all(isinstance(m(p), Fraction) for p in range(6))
    assert gevrey_moments(2)(3) == math.factorial(6)


def test_gevrey_half_value():
    m = gevrey_moments(Fraction(1, 2))
    assert float(m(1)) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-15)
    assert m(2) == 1


def test_q_factorial():
    m = q_factorial_moments(Fraction(1, 2))
    assert m(0) == 1
    assert m(3) == Fraction(1) * Fraction(3, 2) * Fraction(7, 4)


def test_product_is_square():
    for m in (gevrey_moments(1), q_factorial_moments(Fraction(1, 3)), gevrey_moments(Fraction(1, 2))):
        sq = product_moments(m, m)
        for p in range(61):
            assert sq(p) == m(p) * m(p)


def test_invalid_parameters():
    with pytest.raises(InvalidParameterError):
        gevrey_moments(0)
    with pytest.raises(InvalidParameterError):
        gevrey_moments(-1)
    with pytest.raises(InvalidParameterError):
        custom_sequence([2, 3])
    with pytest.raises(InvalidParameterError):
        custom_sequence([1, -1])


@pytest.mark.parametrize("seq", SEQUENCES, ids=str)
def test_strong_regularity_on_prefix(seq):
    assert check_lc(seq, 60).holds
    assert check_mg(seq, 60).holds
    assert check_snq(seq, 60).holds
    assert check_superadditive(seq, 60).holds
    assert check_power_inequality(seq, 60).holds


def test_lc_detects_violation():
    bad = custom_sequence([1, 4, 5, 100])
    report = check_lc(bad, 2)
    assert not report.holds
    assert report.violation_index == 1
    data = json.loads(report.dumps())
    assert set(data) >= {"property", "prefix", "holds", "witness", "violation_index"}


def test_mg_bound_violation():
    report = check_mg(gevrey_sequence(1), 30, bound=1.5)
    assert not report.holds
    assert check_mg(gevrey_sequence(1), 30, bound=2).holds


def test_gevrey_order_claim():
    for alpha in (Fraction(1, 2), Fraction(1), Fraction(3, 2)):
        report = check_order(gevrey_moments(alpha), 40)
        assert report.holds
        assert 0 < report.a3 <= report.a4 < 10


def test_custom_moments_without_order():
    m = custom_moments([1, 2, 4, 8])
    with pytest.raises(InvalidParameterError):
        check_order(m, 3)


def test_growth_function_values():
    g = gevrey_sequence(1)
    assert growth_function_M(g, 0) == 0
    assert growth_function_M(g, 1) == 0
    expected = max(p * math.log(10) - math.lgamma(p + 1) for p in range(101))
    assert growth_function_M(g, 10) == pytest.approx(expected, rel=1e-12)
    assert growth_function_M(g, 10) == pytest.approx(7.9215, abs=1e-4)
    with pytest.raises(InvalidParameterError):
        growth_function_M(g, -1)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(min_value=0, max_value=30), min_size=100, max_size=100))
def test_growth_function_monotone(ts):
    g = gevrey_sequence(1)
    values = [growth_function_M(g, t) for t in sorted(ts)]
    assert all(a <= b + 1e-12 for a, b in zip(values, values[1:]))


def test_omega_estimates():
    assert omega_estimate(gevrey_sequence(1), 10_000) == pytest.approx(1.0, abs=1e-3)
    assert omega_estimate(gevrey_sequence(Fraction(1, 2)), 10_000) == pytest.approx(0.5, abs=1e-3)
    assert omega_estimate(power_sequence(gevrey_sequence(1), 2), 10_000) == pytest.approx(2.0, abs=2e-3)


def test_memo_consistent_under_random_access():
    m = q_factorial_moments(Fraction(1, 3))
    idx = list(range(80))
    random.Random(3).shuffle(idx)
    values = {p: m(p) for p in idx}
    fresh = q_factorial_moments(Fraction(1, 3))
    assert all(fresh(p) == values[p] for p in range(80))
