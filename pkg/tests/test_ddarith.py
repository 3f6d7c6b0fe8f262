import math
from dataclasses import astuple
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from psi_extrema.ddarith import (
    DD,
    HARMONIC,
    MERTENS,
    PSI,
    THETA,
    PrecisionSum,
    dd_add,
    dd_div,
    dd_exp,
    dd_log,
    dd_log_int,
    dd_mul,
    dd_sqrt_int,
    format_real,
    loglog_bound,
    prime_term,
    segment_sum,
    two_prod,
    two_sum,
)

finite = st.floats(min_value=-1e150, max_value=1e150, allow_nan=False, allow_infinity=False)
positive = st.floats(min_value=1e-100, max_value=1e100)


def exact(h, l=0.0):
    return Fraction(h) + Fraction(l)


def rel_err(dd, ref):
    with mpmath.workprec(400):
        return float(abs((mpmath.mpf(dd[0]) + mpmath.mpf(dd[1]) - ref) / ref))


@given(finite, finite)
def test_two_sum_is_exact(a, b):
    s, e = two_sum(a, b)
    assert exact(s, e) == Fraction(a) + Fraction(b)
    assert s == a + b


@given(st.floats(min_value=-1e100, max_value=1e100, allow_nan=False))
def test_two_prod_is_exact(a):
    b = 0.7390851332151607
    p, e = two_prod(a, b)
    if abs(a) > 1e-200:
        assert exact(p, e) == Fraction(a) * Fraction(b)


def _dd(x):
    with mpmath.workprec(200):
        return DD.from_mpf(x)


@given(positive, positive)
def test_dd_arithmetic_matches_mpmath(x, y):
    with mpmath.workprec(200):
        a = _dd(mpmath.mpf(x) / 3)
        b = _dd(mpmath.mpf(y) / 7)
        ra = mpmath.mpf(a.hi) + a.lo
        rb = mpmath.mpf(b.hi) + b.lo
        assert rel_err(dd_add(a.hi, a.lo, b.hi, b.lo), ra + rb) < 1e-30
        assert rel_err(dd_mul(a.hi, a.lo, b.hi, b.lo), ra * rb) < 1e-30
        assert rel_err(dd_div(a.hi, a.lo, b.hi, b.lo), ra / rb) < 1e-30


@given(st.floats(min_value=-600, max_value=600))
def test_dd_exp(x):
    with mpmath.workprec(300):
        a = _dd(mpmath.mpf(x) / 3)
        ref = mpmath.exp(mpmath.mpf(a.hi) + a.lo)
        assert rel_err(dd_exp(a.hi, a.lo), ref) < 4e-30


@given(st.floats(min_value=1e-300, max_value=1e300))
def test_dd_log(x):
    with mpmath.workprec(300):
        a = _dd(mpmath.mpf(x) * 1.1)
        ref = mpmath.log(mpmath.mpf(a.hi) + a.lo)
        if abs(ref) > 1e-3:
            assert rel_err(dd_log(a.hi, a.lo), ref) < 4e-30


def test_exp_log_special_values():
    assert dd_exp(0.0, 0.0) == (1.0, 0.0)
    assert dd_log(1.0, 0.0) == (0.0, 0.0)
    assert math.isinf(dd_exp(1000.0, 0.0)[0])
    assert dd_exp(-1000.0, 0.0)[0] == 0.0


@pytest.mark.parametrize("p", [2, 3, 5, 7, 31, 37, 101, 65537, 999983, 2147483647, 1000000000039])
@pytest.mark.parametrize("kind", [HARMONIC, THETA, MERTENS, PSI])
def test_prime_term_accuracy(p, kind):
    with mpmath.workprec(300):
        q = mpmath.mpf(p)
        ref = {
            HARMONIC: 1 / q,
            THETA: mpmath.log(q),
            MERTENS: -mpmath.log(1 - 1 / q),
            PSI: mpmath.log(1 + 1 / q),
        }[kind]
    assert rel_err(prime_term(p, kind), ref) < 2e-30


def test_segment_sum_queries_are_running_sums():
    primes = np.array([2, 3, 5, 7, 11, 13], dtype=np.int64)
    idx = np.array([-1, 0, 2, 5], dtype=np.int64)
    sh, sl, qh, ql = segment_sum(primes, HARMONIC, True, idx)
    assert qh[0] == 0.0
    for j, i in enumerate(idx.tolist()):
        if i < 0:
            continue
        s = Fraction(0)
        for p in primes[: i + 1].tolist():
            s += Fraction(1, p)
        assert abs(exact(qh[j], ql[j]) - s) / s < Fraction(1, 10**30)
    assert (qh[-1], ql[-1]) == (sh, sl)


def test_uncompensated_sum_has_zero_tail():
    primes = np.array([2, 3, 5, 7], dtype=np.int64)
    sh, sl, _, _ = segment_sum(primes, HARMONIC, False, np.zeros(0, dtype=np.int64))
    assert sl == 0.0
    assert sh == pytest.approx(247 / 210, rel=1e-15)


def test_loglog_bound_verdicts():
    one = np.array([1.0])
    zero = np.array([0.0])
    # log N <= 1 is degenerate
    rh, rl, mh, ml, v = loglog_bound(one, zero, np.array([0.5]), zero, 1.0, 0.0, 1e-15)
    assert v[0] == 2 and rh[0] == -math.inf and mh[0] == math.inf
    # lhs = 2 against 1 * log(log N) with log N = e^3 -> rhs = 3
    ln = math.exp(3.0)
    _, _, mh, _, v = loglog_bound(np.array([2.0]), zero, np.array([ln]), zero, 1.0, 0.0, 1e-15)
    assert v[0] == -1 and mh[0] == pytest.approx(-1.0)
    _, _, mh, _, v = loglog_bound(np.array([4.0]), zero, np.array([ln]), zero, 1.0, 0.0, 1e-15)
    assert v[0] == 1
    # within the guard band
    _, _, _, _, v = loglog_bound(np.array([3.0]), zero, np.array([ln]), zero, 1.0, 0.0, 1e-15)
    assert v[0] == 0


def test_dd_value_type():
    a = DD.from_fraction(Fraction(1, 3))
    assert exact(a.hi, a.lo) - Fraction(1, 3) < Fraction(1, 10**32)
    assert DD.fromhex(a.hex()) == a
    assert abs(exact(*astuple((a + 1) - 1)) - Fraction(1, 3)) < Fraction(1, 10**31)
    assert float(a * 3) == 1.0
    assert DD(2.0) > a > DD(0.0)
    assert -a < DD(0.0) < abs(-a)
    assert DD.coerce(2**60 + 1).to_mpf() == 2**60 + 1


def test_sqrt_and_log_of_big_integers():
    n = 10**30 + 57
    with mpmath.workprec(300):
        assert rel_err((dd_log_int(n).hi, dd_log_int(n).lo), mpmath.log(n)) < 1e-31
        assert rel_err((dd_sqrt_int(n).hi, dd_sqrt_int(n).lo), mpmath.sqrt(n)) < 1e-31


def test_format_real():
    assert format_real(DD(0.0)) == "0"
    assert format_real(float("inf")) == "inf"
    assert format_real(DD(-math.inf)) == "-inf"
    assert format_real(float("nan")) == "nan"
    assert format_real(1.5) == "1.500000000000000000000000e+0"
    assert format_real(7) == "7.000000000000000000000000e+0"
    third = DD.from_fraction(Fraction(1, 3))
    assert format_real(third) == "3.333333333333333333333333e-1"
    with mpmath.workprec(200):
        assert format_real(mpmath.pi) == "3.141592653589793238462643e+0"
    mantissa = format_real(DD(1 / 7, 1e-40)).split("e")[0].replace(".", "").lstrip("-")
    assert len(mantissa) == 25


def test_precision_sum_state_round_trip():
    s = PrecisionSum()
    for k in range(1, 200):
        s.add(DD.from_fraction(Fraction(1, k)))
    t = PrecisionSum.from_state(s.to_state())
    assert t == s and t.value == s.value and t.count == 199
    with mpmath.workprec(300):
        ref = mpmath.fsum(mpmath.mpf(1) / k for k in range(1, 200))
    assert rel_err((s.hi, s.lo), ref) < 1e-30


@given(st.lists(st.integers(min_value=1, max_value=10**6), min_size=2, max_size=40), st.data())
def test_combine_is_deterministic(ks, data):
    cut = data.draw(st.integers(min_value=1, max_value=len(ks) - 1))
    terms = [DD.from_fraction(Fraction(1, k)) for k in ks]
    left, right = PrecisionSum(), PrecisionSum()
    for t in terms[:cut]:
        left.add(t)
    for t in terms[cut:]:
        right.add(t)
    a = PrecisionSum.from_state(left.to_state()).combine(right)
    b = PrecisionSum.from_state(left.to_state()).combine(right)
    assert a == b and a.count == len(ks)
    ref = sum(Fraction(1, k) for k in ks)
    assert abs(exact(a.hi, a.lo) - ref) / ref < Fraction(1, 10**29)
