"""Double-double arithmetic.

A double-double value is an unevaluated sum ``hi + lo`` of two IEEE doubles
with ``|lo| <= ulp(hi)/2``, giving about 106 significand bits.  The
error-free transformations follow Dekker and Knuth; ``exp``/``log`` follow
the QD library's argument reduction.  Python 3.10 has no ``math.fma`` so
products use Dekker splitting everywhere.

Numba-compiled scalar kernels operate on ``(hi, lo)`` float pairs; the
:class:`DD` value type and the :class:`PrecisionSum` accumulator wrap them
for use from Python.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext

import mpmath
import numpy as np
from numba import njit

_SPLITTER = 134217729.0  # 2**27 + 1

with mpmath.workprec(256):
    _ln2 = mpmath.log(2)
    LN2_HI = float(_ln2)
    LN2_LO = float(_ln2 - LN2_HI)
    del _ln2

_INV_512 = 1.0 / 512.0
_SERIES_MIN_PRIME = 32

# term kinds for prime sums
HARMONIC = 0  # 1/p
THETA = 1  # log p
MERTENS = 2  # -log(1 - 1/p)
PSI = 3  # log(1 + 1/p)


# ---------------------------------------------------------------------------
# error-free transformations
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def two_sum(a, b):
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


@njit(cache=True, nogil=True)
def quick_two_sum(a, b):
    # requires |a| >= |b|
    s = a + b
    e = b - (s - a)
    return s, e


@njit(cache=True, nogil=True)
def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


@njit(cache=True, nogil=True)
def two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


# ---------------------------------------------------------------------------
# double-double operations on (hi, lo) pairs
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def dd_add(ah, al, bh, bl):
    s, e = two_sum(ah, bh)
    t, f = two_sum(al, bl)
    e += t
    s, e = quick_two_sum(s, e)
    e += f
    return quick_two_sum(s, e)


@njit(cache=True, nogil=True)
def dd_sub(ah, al, bh, bl):
    return dd_add(ah, al, -bh, -bl)


@njit(cache=True, nogil=True)
def dd_mul(ah, al, bh, bl):
    p, e = two_prod(ah, bh)
    e += ah * bl + al * bh
    return quick_two_sum(p, e)


@njit(cache=True, nogil=True)
def dd_mul_d(ah, al, b):
    p, e = two_prod(ah, b)
    e += al * b
    return quick_two_sum(p, e)


@njit(cache=True, nogil=True)
def dd_div(ah, al, bh, bl):
    q1 = ah / bh
    th, tl = dd_mul_d(bh, bl, q1)
    rh, rl = dd_sub(ah, al, th, tl)
    q2 = rh / bh
    th, tl = dd_mul_d(bh, bl, q2)
    rh, rl = dd_sub(rh, rl, th, tl)
    q3 = rh / bh
    q1, q2 = quick_two_sum(q1, q2)
    return dd_add(q1, q2, q3, 0.0)


@njit(cache=True, nogil=True)
def dd_div_d(ah, al, b):
    return dd_div(ah, al, b, 0.0)


@njit(cache=True, nogil=True)
def dd_recip_int(n):
    """1/n for an integer n < 2**53, to double-double accuracy."""
    d = float(n)
    hi = 1.0 / d
    ph, pl = two_prod(hi, d)
    r = (1.0 - ph) - pl
    return quick_two_sum(hi, r / d)


@njit(cache=True, nogil=True)
def dd_exp(ah, al):
    if ah > 709.0:
        return math.inf, 0.0
    if ah < -745.0:
        return 0.0, 0.0
    if ah == 0.0 and al == 0.0:
        return 1.0, 0.0
    k = math.floor(ah / LN2_HI + 0.5)
    th, tl = dd_mul_d(LN2_HI, LN2_LO, k)
    rh, rl = dd_sub(ah, al, th, tl)
    rh *= _INV_512
    rl *= _INV_512
    # expm1(r) by Taylor series, |r| <= 7e-4
    sh, sl = rh, rl
    th, tl = rh, rl
    tiny = abs(rh) * 1e-34
    n = 1
    while True:
        n += 1
        th, tl = dd_mul(th, tl, rh, rl)
        th, tl = dd_div_d(th, tl, float(n))
        sh, sl = dd_add(sh, sl, th, tl)
        if abs(th) <= tiny or n > 40:
            break
    # undo the 1/512 scaling: expm1(2r) = 2 expm1(r) + expm1(r)**2
    for _ in range(9):
        qh, ql = dd_mul(sh, sl, sh, sl)
        sh, sl = dd_add(2.0 * sh, 2.0 * sl, qh, ql)
    sh, sl = dd_add(sh, sl, 1.0, 0.0)
    scale = 2.0 ** k
    return sh * scale, sl * scale


@njit(cache=True, nogil=True)
def dd_log(ah, al):
    if ah <= 0.0:
        return math.nan, math.nan
    if ah == 1.0 and al == 0.0:
        return 0.0, 0.0
    m, e = math.frexp(ah)
    if e > 500 or e < -500:
        # keep exp(-y) clear of the subnormal range
        lh, ll = dd_log(m, math.ldexp(al, -e))
        th, tl = dd_mul_d(LN2_HI, LN2_LO, float(e))
        return dd_add(lh, ll, th, tl)
    y = math.log(ah)
    # one Newton step: y + a*exp(-y) - 1
    eh, el = dd_exp(-y, 0.0)
    th, tl = dd_mul(ah, al, eh, el)
    th, tl = dd_add(th, tl, -1.0, 0.0)
    return dd_add(y, 0.0, th, tl)


@njit(cache=True, nogil=True)
def _log1p_series(uh, ul, alternating):
    # sum_{n>=1} (+-1)^{n+1} u^n / n for small positive u
    sh, sl = uh, ul
    th, tl = uh, ul
    tiny = uh * 1e-34
    n = 1
    while True:
        n += 1
        th, tl = dd_mul(th, tl, uh, ul)
        qh, ql = dd_div_d(th, tl, float(n))
        if alternating and n % 2 == 0:
            sh, sl = dd_sub(sh, sl, qh, ql)
        else:
            sh, sl = dd_add(sh, sl, qh, ql)
        if qh <= tiny:
            break
    return sh, sl


@njit(cache=True, nogil=True)
def prime_term(p, kind):
    """Double-double value of the per-prime summand selected by ``kind``."""
    if kind == HARMONIC:
        return dd_recip_int(p)
    if kind == THETA:
        return dd_log(float(p), 0.0)
    if p >= _SERIES_MIN_PRIME:
        uh, ul = dd_recip_int(p)
        return _log1p_series(uh, ul, kind == PSI)
    lh, ll = dd_log(float(p), 0.0)
    if kind == MERTENS:
        mh, ml = dd_log(float(p - 1), 0.0)
        return dd_sub(lh, ll, mh, ml)
    mh, ml = dd_log(float(p + 1), 0.0)
    return dd_sub(mh, ml, lh, ll)


# ---------------------------------------------------------------------------
# array kernels
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def segment_sum(primes, kind, compensated, query_idx):
    """Sequential sum of ``prime_term`` over ``primes``.

    Returns the total and the running sum right after each index in the
    ascending array ``query_idx``.
    """
    nq = query_idx.size
    q_hi = np.zeros(nq)
    q_lo = np.zeros(nq)
    sh = 0.0
    sl = 0.0
    q = 0
    while q < nq and query_idx[q] < 0:
        q += 1
    for i in range(primes.size):
        th, tl = prime_term(primes[i], kind)
        if compensated:
            sh, sl = dd_add(sh, sl, th, tl)
        else:
            sh = sh + th
        while q < nq and query_idx[q] == i:
            q_hi[q] = sh
            q_lo[q] = sl
            q += 1
    return sh, sl, q_hi, q_lo


@njit(cache=True, nogil=True)
def primorial_segment(primes, state, compensated):
    """Advance primorial accumulators over ``primes``.

    ``state`` holds ``[logN_hi, logN_lo, psi_hi, psi_lo, phi_hi, phi_lo]``
    on entry and is updated in place.  Row ``i`` of the result holds the
    same six values after absorbing ``primes[i]``.
    """
    n = primes.size
    out = np.empty((n, 6))
    lh, ll, ph, pl, fh, fl = state[0], state[1], state[2], state[3], state[4], state[5]
    for i in range(n):
        p = primes[i]
        th, tl = dd_log(float(p), 0.0)
        if compensated:
            lh, ll = dd_add(lh, ll, th, tl)
            rh, rl = dd_recip_int(p)
            rh, rl = dd_add(1.0, 0.0, rh, rl)
            ph, pl = dd_mul(ph, pl, rh, rl)
            rh, rl = dd_recip_int(p - 1)
            rh, rl = dd_add(1.0, 0.0, rh, rl)
            fh, fl = dd_mul(fh, fl, rh, rl)
        else:
            lh = lh + th
            ph = ph * (1.0 + 1.0 / p)
            fh = fh * (1.0 + 1.0 / (p - 1))
        out[i, 0] = lh
        out[i, 1] = ll
        out[i, 2] = ph
        out[i, 3] = pl
        out[i, 4] = fh
        out[i, 5] = fl
    state[0], state[1], state[2], state[3], state[4], state[5] = lh, ll, ph, pl, fh, fl
    return out


@njit(cache=True, nogil=True)
def loglog_bound(lhs_hi, lhs_lo, logn_hi, logn_lo, ch, cl, guard_rel):
    """Compare ``lhs`` against ``c * log(logN)`` element-wise.

    Returns arrays ``rhs_hi, rhs_lo, margin_hi, margin_lo, verdict`` with
    verdict 1 = holds, -1 = fails, 0 = indeterminate, 2 = degenerate
    (``logN <= 1``; rhs and margin set to -inf/+inf).
    """
    n = lhs_hi.size
    rhs_hi = np.empty(n)
    rhs_lo = np.empty(n)
    m_hi = np.empty(n)
    m_lo = np.empty(n)
    verdict = np.empty(n, dtype=np.int8)
    for i in range(n):
        if logn_hi[i] <= 1.0:
            rhs_hi[i] = -math.inf
            rhs_lo[i] = 0.0
            m_hi[i] = math.inf
            m_lo[i] = 0.0
            verdict[i] = 2
            continue
        gh, gl = dd_log(logn_hi[i], logn_lo[i])
        rh, rl = dd_mul(ch, cl, gh, gl)
        mh, ml = dd_sub(lhs_hi[i], lhs_lo[i], rh, rl)
        rhs_hi[i] = rh
        rhs_lo[i] = rl
        m_hi[i] = mh
        m_lo[i] = ml
        guard = guard_rel * max(abs(lhs_hi[i]), abs(rh), 1.0)
        if mh > guard:
            verdict[i] = 1
        elif mh < -guard:
            verdict[i] = -1
        else:
            verdict[i] = 0
    return rhs_hi, rhs_lo, m_hi, m_lo, verdict


# ---------------------------------------------------------------------------
# Python-facing value types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True, slots=True)
class DD:
    """A double-double real ``hi + lo``.

    Ordering compares ``(hi, lo)`` lexicographically, which is exact for
    normalized values.
    """

    hi: float
    lo: float = 0.0

    @classmethod
    def coerce(cls, v) -> "DD":
        if isinstance(v, DD):
            return v
        if isinstance(v, int) and abs(v) > 2**53:
            hi = float(v)
            return cls(*quick_two_sum(hi, float(v - int(hi))))
        if isinstance(v, (int, float)):
            return cls(float(v), 0.0)
        if isinstance(v, mpmath.mpf):
            return cls.from_mpf(v)
        return cls.from_fraction(v)

    @classmethod
    def from_mpf(cls, v) -> "DD":
        with mpmath.workprec(max(mpmath.mp.prec, 160)):
            v = mpmath.mpf(v)
            hi = float(v)
            if not math.isfinite(hi):
                return cls(hi, 0.0)
            lo = float(v - hi)
        return cls(*quick_two_sum(hi, lo))

    @classmethod
    def from_fraction(cls, fr) -> "DD":
        from fractions import Fraction

        fr = Fraction(fr)
        hi = float(fr)
        lo = float(fr - Fraction(hi))
        return cls(*quick_two_sum(hi, lo))

    def to_mpf(self):
        with mpmath.workprec(1200):
            v = mpmath.mpf(self.hi) + mpmath.mpf(self.lo)
        return v

    def __float__(self) -> float:
        return self.hi

    def __neg__(self) -> "DD":
        return DD(-self.hi, -self.lo)

    def __abs__(self) -> "DD":
        return -self if self.hi < 0 else self

    def __add__(self, other) -> "DD":
        o = DD.coerce(other)
        return DD(*dd_add(self.hi, self.lo, o.hi, o.lo))

    __radd__ = __add__

    def __sub__(self, other) -> "DD":
        o = DD.coerce(other)
        return DD(*dd_sub(self.hi, self.lo, o.hi, o.lo))

    def __rsub__(self, other) -> "DD":
        return DD.coerce(other) - self

    def __mul__(self, other) -> "DD":
        o = DD.coerce(other)
        return DD(*dd_mul(self.hi, self.lo, o.hi, o.lo))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "DD":
        o = DD.coerce(other)
        return DD(*dd_div(self.hi, self.lo, o.hi, o.lo))

    def __rtruediv__(self, other) -> "DD":
        return DD.coerce(other) / self

    def exp(self) -> "DD":
        return DD(*dd_exp(self.hi, self.lo))

    def log(self) -> "DD":
        return DD(*dd_log(self.hi, self.lo))

    def is_finite(self) -> bool:
        return math.isfinite(self.hi)

    def hex(self) -> str:
        return f"{self.hi.hex()}:{self.lo.hex()}"

    @classmethod
    def fromhex(cls, s: str) -> "DD":
        hi, lo = s.split(":")
        return cls(float.fromhex(hi), float.fromhex(lo))

    def __str__(self) -> str:
        return format_real(self)


def dd_sqrt_int(n: int) -> DD:
    """Correctly rounded double-double square root of an integer."""
    with mpmath.workprec(200):
        return DD.from_mpf(mpmath.sqrt(n))


def dd_log_int(n: int) -> DD:
    """Double-double natural log of an arbitrary positive integer."""
    if n < 2**53:
        return DD(*dd_log(float(n), 0.0))
    with mpmath.workprec(200):
        return DD.from_mpf(mpmath.log(n))


def format_real(v, digits: int = 25) -> str:
    """Render a real with ``digits`` significant digits.

    Accepts :class:`DD`, ``mpmath.mpf``, ``float`` or ``int``; a DD is
    rendered from the exact sum ``hi + lo``.
    """
    if not isinstance(v, (DD, mpmath.mpf, float, int)) and hasattr(v, "_mpf_"):
        v = +v  # mpmath constants such as mpmath.pi
    if isinstance(v, DD):
        if not math.isfinite(v.hi):
            return _format_nonfinite(v.hi)
        with localcontext() as ctx:
            ctx.prec = 800
            exact = Decimal(v.hi) + Decimal(v.lo)
    elif isinstance(v, mpmath.mpf):
        if not mpmath.isfinite(v):
            return _format_nonfinite(float(v))
        exact = Decimal(mpmath.nstr(v, digits + 10, strip_zeros=False, min_fixed=1, max_fixed=0))
    elif isinstance(v, float):
        if not math.isfinite(v):
            return _format_nonfinite(v)
        exact = Decimal(v)
    else:
        exact = Decimal(v)
    if exact == 0:
        return "0"
    return f"{exact:.{digits - 1}e}"


def _format_nonfinite(x: float) -> str:
    if math.isnan(x):
        return "nan"
    return "inf" if x > 0 else "-inf"


class PrecisionSum:
    """Deterministic compensated accumulator.

    Holds ``hi + lo`` and the number of absorbed terms.  With
    ``compensated=False`` it degrades to a plain float sum (``lo`` stays 0),
    which is only meant for speed comparisons.
    """

    __slots__ = ("hi", "lo", "count", "compensated")

    def __init__(self, hi: float = 0.0, lo: float = 0.0, count: int = 0, compensated: bool = True):
        self.hi = hi
        self.lo = lo
        self.count = count
        self.compensated = compensated

    def add(self, value) -> "PrecisionSum":
        v = DD.coerce(value)
        if self.compensated:
            self.hi, self.lo = dd_add(self.hi, self.lo, v.hi, v.lo)
        else:
            self.hi += v.hi
        self.count += 1
        return self

    def combine(self, other: "PrecisionSum") -> "PrecisionSum":
        """Fold a partial sum into this one (``self`` is the left operand)."""
        if self.compensated:
            self.hi, self.lo = dd_add(self.hi, self.lo, other.hi, other.lo)
        else:
            self.hi += other.hi
        self.count += other.count
        return self

    @property
    def value(self) -> DD:
        return DD(self.hi, self.lo)

    def to_state(self) -> dict:
        return {
            "hi": self.hi.hex(),
            "lo": self.lo.hex(),
            "count": self.count,
            "compensated": self.compensated,
        }

    @classmethod
    def from_state(cls, state: dict) -> "PrecisionSum":
        return cls(
            float.fromhex(state["hi"]),
            float.fromhex(state["lo"]),
            int(state["count"]),
            bool(state["compensated"]),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, PrecisionSum):
            return NotImplemented
        return (self.hi, self.lo, self.count, self.compensated) == (
            other.hi,
            other.lo,
            other.count,
            other.compensated,
        )

    def __repr__(self) -> str:
        return f"PrecisionSum(hi={self.hi!r}, lo={self.lo!r}, count={self.count})"
