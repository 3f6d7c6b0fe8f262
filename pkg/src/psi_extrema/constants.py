"""Constants of the prime-product asymptotics, computed at chosen precision.

Nothing here is a stored digit string.  Euler's constant comes from the
Brent-McMillan Bessel-function scheme in fixed-point integer arithmetic;
Mertens' constant from an explicit prime sum plus a prime-zeta tail; pi and
zeta(m) from mpmath.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath

from .ddarith import DD
from .errors import PrecisionInfeasibleError

MIN_BITS = 24
MAX_BITS = 4096
WORKING_BITS = 106
MIN_PRIME_CUTOFF = 100
DEFAULT_PRIME_CUTOFF = 10**4
MAX_TAIL_TERMS = 256


def _check_bits(precision_bits: int) -> None:
    if not MIN_BITS <= precision_bits <= MAX_BITS:
        raise ValueError(f"precision_bits must be in [{MIN_BITS}, {MAX_BITS}], got {precision_bits}")


def _round(fixed: int, frac_bits: int, precision_bits: int):
    with mpmath.workprec(precision_bits):
        return mpmath.ldexp(mpmath.mpf(fixed), -frac_bits)


def _fixed(x, frac_bits: int) -> int:
    with mpmath.workprec(frac_bits + 64):
        return int(mpmath.floor(mpmath.ldexp(x, frac_bits)))


def _gamma_fixed(frac_bits: int) -> int:
    """floor(gamma * 2**frac_bits) up to a few units, by Brent-McMillan.

    gamma = U/V - O(exp(-4n)) with U, V the Bessel-type sums below; n is
    chosen so the truncation is below 2**-(frac_bits + 8).
    """
    n = math.ceil((frac_bits + 8) * math.log(2) / 4) + 1
    one = 1 << frac_bits
    n2 = n * n
    with mpmath.workprec(frac_bits + 64):
        a = -_fixed(mpmath.log(n), frac_bits)
    b = one
    u, v = a, b
    k = 1
    while True:
        b = b * n2 // (k * k)
        a = (a * n2 // k + b) // k
        if a == 0 and b == 0:
            break
        u += a
        v += b
        k += 1
    return (u << frac_bits) // v


@lru_cache(maxsize=32)
def euler_gamma(precision_bits: int = 53):
    """Euler's constant rounded to ``precision_bits`` bits."""
    _check_bits(precision_bits)
    w = precision_bits + 32
    return _round(_gamma_fixed(w), w, precision_bits)


def _squarefree_moebius(m: int) -> int:
    mu = 1
    d = 2
    while d * d <= m:
        if m % d == 0:
            m //= d
            if m % d == 0:
                return 0
            mu = -mu
        d += 1
    return -mu if m > 1 else mu


def mertens_tail_bound(prime_cutoff: int):
    """Bound on sum_{p > x} sum_{n >= 2} 1/(n p^n), namely 2/x.

    The double sum is below sum_{m > x} 1/m**2 <= 1/x; the factor 2 is slack.
    """
    return mpmath.mpf(2) / prime_cutoff


@lru_cache(maxsize=32)
def mertens_constant(
    precision_bits: int = 53,
    prime_cutoff: int = DEFAULT_PRIME_CUTOFF,
    tail_correction: bool = True,
):
    """Mertens' constant B1 = gamma - sum_p sum_{n>=2} 1/(n p^n).

    The double sum is taken explicitly over p <= prime_cutoff.  With
    ``tail_correction`` the remainder over p > prime_cutoff is added back
    exactly via

        sum_{p > x} sum_{n >= 2} p^-n / n = -sum_{m >= 2} mu(m)/m * log zeta_x(m),

    where zeta_x(m) = zeta(m) * prod_{p <= x} (1 - p^-m); the m-series
    converges like x^(1-m).  Without it the result is the plain truncation,
    which overshoots B1 by less than :func:`mertens_tail_bound`.
    """
    from .sieve import primes_up_to

    _check_bits(precision_bits)
    if prime_cutoff < MIN_PRIME_CUTOFF:
        raise PrecisionInfeasibleError(
            f"prime_cutoff must be >= {MIN_PRIME_CUTOFF}, got {prime_cutoff}",
            minimal_cutoff=MIN_PRIME_CUTOFF,
        )
    w = precision_bits + 64
    m_max = math.ceil(w * math.log(2) / math.log(prime_cutoff)) + 1
    if tail_correction and m_max > MAX_TAIL_TERMS:
        minimal = math.ceil(2.0 ** (w / (MAX_TAIL_TERMS - 2)))
        raise PrecisionInfeasibleError(
            f"prime_cutoff {prime_cutoff} needs {m_max} tail terms at {precision_bits} bits; "
            f"use prime_cutoff >= {minimal}",
            minimal_cutoff=minimal,
        )
    one = 1 << w
    primes = [int(p) for p in primes_up_to(prime_cutoff)]

    head = 0
    for p in primes:
        pw = one // (p * p)
        n = 2
        while pw:
            head += pw // n
            pw //= p
            n += 1

    total = _gamma_fixed(w) - head
    if tail_correction:
        with mpmath.workprec(w + 64):
            for m in range(2, m_max + 1):
                mu = _squarefree_moebius(m)
                if mu == 0:
                    continue
                log_zeta_x = _fixed(mpmath.log(mpmath.zeta(m)), w)
                for p in primes:
                    pm = p**m
                    if pm > one:
                        break
                    # log(1 - p^-m) = -sum_j p^(-m j) / j
                    pw = one // pm
                    j = 1
                    while pw:
                        log_zeta_x -= pw // j
                        pw //= pm
                        j += 1
                total += mu * log_zeta_x // m
    return _round(total, w, precision_bits)


@lru_cache(maxsize=32)
def basel_inverse(precision_bits: int = WORKING_BITS):
    """6/pi^2 = prod_p (1 - p^-2)."""
    _check_bits(precision_bits)
    with mpmath.workprec(precision_bits + 32):
        v = 6 / mpmath.pi**2
    with mpmath.workprec(precision_bits):
        return +v


@lru_cache(maxsize=32)
def asymptote_coefficients(precision_bits: int = WORKING_BITS) -> dict:
    """Leading coefficients of the three log-law asymptotes.

    ``exp_gamma`` for the Mertens product, ``psi`` = 6 e^gamma / pi^2 for
    prod(1 + 1/p), and ``nonsquarefree`` = exp_gamma - psi.  The last is
    formed by one subtraction in the working precision so that the three
    satisfy the identity exactly.
    """
    _check_bits(precision_bits)
    with mpmath.workprec(precision_bits + 32):
        eg = mpmath.exp(euler_gamma(min(precision_bits + 32, MAX_BITS)))
    with mpmath.workprec(precision_bits):
        eg = +eg
        psi = eg * basel_inverse(precision_bits)
        ns = eg - psi
    return {"exp_gamma": eg, "psi": psi, "nonsquarefree": ns}


@dataclass(frozen=True)
class NamedConstant:
    name: str
    value: object
    precision_bits: int
    method: str

    @property
    def digits(self) -> int:
        # decimal digits that survive a round trip through precision_bits
        return mpmath.libmp.prec_to_dps(self.precision_bits)

    def __str__(self) -> str:
        return mpmath.nstr(self.value, self.digits, strip_zeros=False)


def named_constants(precision_bits: int = WORKING_BITS, prime_cutoff: int = DEFAULT_PRIME_CUTOFF):
    coeffs = asymptote_coefficients(precision_bits)
    return [
        NamedConstant("euler_gamma", euler_gamma(precision_bits), precision_bits, "Brent-McMillan, fixed point"),
        NamedConstant("exp_gamma", coeffs["exp_gamma"], precision_bits, "exp(euler_gamma)"),
        NamedConstant(
            "mertens_B1",
            mertens_constant(precision_bits, prime_cutoff),
            precision_bits,
            f"gamma - prime sum to {prime_cutoff} + prime-zeta tail",
        ),
        NamedConstant("basel_inverse", basel_inverse(precision_bits), precision_bits, "6/pi^2"),
        NamedConstant("psi_coefficient", coeffs["psi"], precision_bits, "exp_gamma * 6/pi^2"),
        NamedConstant(
            "nonsquarefree_coefficient",
            coeffs["nonsquarefree"],
            precision_bits,
            "exp_gamma - psi_coefficient",
        ),
    ]


@dataclass(frozen=True)
class WorkingConstants:
    """Double-double copies used by the streaming kernels."""

    gamma: DD
    exp_gamma: DD
    mertens_b1: DD
    basel_inverse: DD
    psi_coefficient: DD
    nonsquarefree_coefficient: DD


@lru_cache(maxsize=1)
def working_constants() -> WorkingConstants:
    bits = 160
    coeffs = asymptote_coefficients(bits)
    return WorkingConstants(
        gamma=DD.from_mpf(euler_gamma(bits)),
        exp_gamma=DD.from_mpf(coeffs["exp_gamma"]),
        mertens_b1=DD.from_mpf(mertens_constant(bits)),
        basel_inverse=DD.from_mpf(basel_inverse(bits)),
        psi_coefficient=DD.from_mpf(coeffs["psi"]),
        nonsquarefree_coefficient=DD.from_mpf(coeffs["nonsquarefree"]),
    )
