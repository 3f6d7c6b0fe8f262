from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from psi_extrema.ddarith import DD, HARMONIC, MERTENS, PrecisionSum
from psi_extrema.products import (
    Quantity,
    asymptote,
    envelope_forms,
    iter_prefix_sums,
    mertens_product,
    prefix_sums,
    prime_harmonic_sum,
    psi_product,
    reference_values,
    residual_record,
    residual_scan,
)


def exact_values(x):
    h, m, s = Fraction(0), Fraction(1), Fraction(1)
    for p in sympy.primerange(2, x + 1):
        h += Fraction(1, p)
        m *= Fraction(p, p - 1)
        s *= Fraction(p + 1, p)
    return h, m, s


def rel(dd, ref):
    with mpmath.workprec(300):
        ref = mpmath.mpf(ref.numerator) / ref.denominator if isinstance(ref, Fraction) else ref
        return float(abs(dd.to_mpf() - ref) / abs(ref))


def test_hand_values_at_ten():
    assert rel(prime_harmonic_sum(10), Fraction(247, 210)) < 1e-31
    assert rel(mertens_product(10), Fraction(35, 8)) < 1e-30
    assert rel(psi_product(10), Fraction(96, 35)) < 1e-30


@pytest.mark.parametrize("x", [2, 3, 30, 97, 1000, 4001])
def test_against_exact_rationals(x):
    h, m, s = exact_values(x)
    assert rel(prime_harmonic_sum(x), h) < 1e-30
    assert rel(mertens_product(x), m) < 1e-29
    assert rel(psi_product(x), s) < 1e-29


def test_native_precision_path():
    h, m, s = exact_values(5000)
    v = mertens_product(5000, precision_bits=53)
    assert v.lo == 0.0 and rel(v, m) < 1e-12
    assert rel(prime_harmonic_sum(5000, precision_bits=53), h) < 1e-13


def test_high_precision_path_is_mpmath():
    v = psi_product(1000, precision_bits=300)
    assert isinstance(v, mpmath.mpf)
    _, _, s = exact_values(1000)
    with mpmath.workprec(300):
        assert abs(v - mpmath.mpf(s.numerator) / s.denominator) < mpmath.mpf(2) ** -290


@pytest.mark.parametrize("x", [10**5, 10**6])
def test_two_routes_agree(x):
    for q, fn in ((Quantity.MERTENS_PRODUCT, mertens_product), (Quantity.PSI_PRODUCT, psi_product)):
        ref = reference_values([x], q, 256)[0]
        assert rel(fn(x), ref) < 1e-28


def test_grid_matches_individual_calls_bitwise():
    grid = [3, 100, 4095, 4096, 4097, 10**4, 54321]
    for q in Quantity:
        recs = residual_scan(grid, q, segment_size=4096)
        for x, r in zip(grid, recs):
            one = residual_record(x, q, segment_size=4096)
            assert r == one


def test_prefix_sums_independent_of_workers():
    grid = list(range(1000, 200001, 7919))
    ref = prefix_sums(grid, MERTENS, segment_size=4096)
    for w in (2, 4, 16):
        assert prefix_sums(grid, MERTENS, segment_size=4096, workers=w) == ref


@given(st.lists(st.integers(min_value=2, max_value=50000), min_size=1, max_size=20, unique=True))
def test_prefix_sums_are_monotone(points):
    grid = sorted(points)
    sums = prefix_sums(grid, HARMONIC, segment_size=1024)
    assert all(a <= b for a, b in zip(sums, sums[1:]))


def test_resumed_prefix_stream_matches():
    grid = list(range(500, 60000, 997))
    first, resumed = [], []
    saved = None
    for u, vals, running in iter_prefix_sums(grid, MERTENS, segment_size=4096):
        first.extend(vals)
        if u <= 4:
            resumed.extend(vals)
        if u == 4:
            saved = running.to_state()
    stream = iter_prefix_sums(
        grid, MERTENS, segment_size=4096, start_unit=5, running=PrecisionSum.from_state(saved)
    )
    for _, vals, _ in stream:
        resumed.extend(vals)
    assert resumed == first


def test_residual_anchor():
    rec = residual_record(10, "mertens")
    with mpmath.workprec(200):
        ref = mpmath.mpf(35) / 8 - mpmath.exp(mpmath.euler) * mpmath.log(10)
        assert abs(rec.residual.to_mpf() - ref) < mpmath.mpf(10) ** -29
        assert abs(rec.scaled_residual.to_mpf() - mpmath.sqrt(10) * ref) < mpmath.mpf(10) ** -29
    assert rec.quantity is Quantity.MERTENS_PRODUCT


def test_asymptotes():
    with mpmath.workprec(200):
        lx = mpmath.log(12345)
        eg = mpmath.exp(mpmath.euler)
        expect = {
            Quantity.HARMONIC_SUM: mpmath.log(lx) + mpmath.mertens,
            Quantity.MERTENS_PRODUCT: eg * lx,
            Quantity.PSI_PRODUCT: 6 * eg / mpmath.pi**2 * lx,
        }
        for q, ref in expect.items():
            assert abs(asymptote(12345, q).to_mpf() - ref) / ref < 1e-30
            assert abs(asymptote(12345, q, 200) - ref) / ref < mpmath.mpf(2) ** -195


def test_residuals_shrink():
    recs = residual_scan([10**3, 10**5, 10**7], "psi")
    r = [abs(rec.residual.hi) for rec in recs]
    assert r[0] > r[1] > r[2]
    assert all(0.01 < abs(rec.scaled_residual.hi) < 10 for rec in recs)


def test_high_precision_residuals():
    recs = residual_scan([1000, 5000], "harmonic", precision_bits=200)
    dd = residual_scan([1000, 5000], "harmonic")
    for a, b in zip(recs, dd):
        with mpmath.workprec(200):
            assert abs(a.residual - b.residual.to_mpf()) < 1e-29


def test_envelope_forms():
    assert envelope_forms(15) == {"log_x_form": None, "loglog_x_form": None}
    e = envelope_forms(10**8)
    assert 0 < e["log_x_form"] < e["loglog_x_form"]


def test_quantity_parse():
    assert Quantity.parse("psi") is Quantity.PSI_PRODUCT
    assert Quantity.parse("mertens-product") is Quantity.MERTENS_PRODUCT
    with pytest.raises(ValueError):
        Quantity.parse("zeta")


def test_bad_input():
    with pytest.raises(ValueError):
        prefix_sums([10, 5], HARMONIC)
    with pytest.raises(ValueError):
        prefix_sums([1, 5], HARMONIC)
    with pytest.raises(ValueError):
        residual_record(2, "psi")
    with pytest.raises(ValueError):
        mertens_product(1)
    with pytest.raises(ValueError):
        psi_product(100, precision_bits=80)
    assert prefix_sums([], HARMONIC) == []
    assert isinstance(prime_harmonic_sum(2), DD)
