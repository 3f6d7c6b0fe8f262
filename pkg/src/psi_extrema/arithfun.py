"""Exact multiplicative functions on factored integers.

Ratios are :class:`fractions.Fraction` values; nothing in this module rounds.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

import mpmath
import numpy as np

from .errors import ResourceLimitError

MAX_FACTOR_INPUT = 1 << 63
TRIAL_LIMIT = 10**6
MAX_DIVISORS = 10**7
MAX_RAMANUJAN_Q = 10**7

ExactRatio = Fraction

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
# the first 13 prime bases are a deterministic Miller-Rabin test below this
_MR_DETERMINISTIC = 3317044064679887385961981


def is_prime(n: int) -> bool:
    """Miller-Rabin; deterministic for n < 3.3e24, otherwise 40 extra bases."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    bases = list(_MR_BASES)
    if n >= _MR_DETERMINISTIC:
        rng = random.Random(n)
        bases += [rng.randrange(2, n - 1) for _ in range(40)]
    for a in bases:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FactoredInteger:
    """An integer as ascending ``(prime, exponent)`` pairs; ``()`` is 1."""

    factors: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        factors = tuple((int(p), int(e)) for p, e in self.factors)
        object.__setattr__(self, "factors", factors)
        last = 1
        for p, e in factors:
            if p <= last:
                raise ValueError("primes must be strictly increasing")
            if e < 1:
                raise ValueError(f"exponent of {p} must be >= 1")
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
            last = p

    @classmethod
    def of(cls, n: int) -> "FactoredInteger":
        return factorize(n)

    @property
    def value(self) -> int:
        v = 1
        for p, e in self.factors:
            v *= p**e
        return v

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    @property
    def exponents(self) -> tuple[int, ...]:
        return tuple(e for _, e in self.factors)

    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    def divisor_count(self) -> int:
        return math.prod(e + 1 for _, e in self.factors)

    def times_prime(self, p: int) -> "FactoredInteger":
        """The factorization of ``value * p`` for a prime ``p``."""
        fs = dict(self.factors)
        fs[p] = fs.get(p, 0) + 1
        return FactoredInteger(tuple(sorted(fs.items())))

    def __int__(self) -> int:
        return self.value

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return "*".join(f"{p}^{e}" if e > 1 else str(p) for p, e in self.factors)


@lru_cache(maxsize=1)
def _trial_primes() -> tuple[int, ...]:
    from .sieve import primes_up_to

    return tuple(int(p) for p in primes_up_to(TRIAL_LIMIT))


def _pollard_brent(n: int) -> int:
    """A non-trivial factor of the odd composite ``n``."""
    rng = random.Random(n)
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def _split_large(n: int, out: dict) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    r = math.isqrt(n)
    if r * r == n:
        _split_large(r, out)
        _split_large(r, out)
        return
    d = _pollard_brent(n)
    _split_large(d, out)
    _split_large(n // d, out)


def factorize(n: int) -> FactoredInteger:
    """Trial division by primes up to 10**6, then Pollard-Brent rho."""
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise TypeError("n must be an integer")
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n > MAX_FACTOR_INPUT:
        raise ValueError(f"n must be <= 2**63, got {n}")
    found: dict[int, int] = {}
    for p in _trial_primes():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            found[p] = e
    if n > 1:
        _split_large(n, found)
    return FactoredInteger(tuple(sorted(found.items())))


def _as_factored(f) -> FactoredInteger:
    return f if isinstance(f, FactoredInteger) else factorize(f)


def psi_ratio(f) -> Fraction:
    """psi(N)/N = prod_{p | N} (1 + 1/p)."""
    f = _as_factored(f)
    num = den = 1
    for p, _ in f.factors:
        num *= p + 1
        den *= p
    return Fraction(num, den)


def sigma_ratio(f) -> Fraction:
    """sigma(N)/N = prod_p (p^(v+1) - 1) / (p^v (p - 1))."""
    f = _as_factored(f)
    num = den = 1
    for p, v in f.factors:
        num *= p ** (v + 1) - 1
        den *= p**v * (p - 1)
    return Fraction(num, den)


def phi_inverse_ratio(f) -> Fraction:
    """N/phi(N) = prod_{p | N} p/(p - 1)."""
    f = _as_factored(f)
    num = den = 1
    for p, _ in f.factors:
        num *= p
        den *= p - 1
    return Fraction(num, den)


def moebius(f) -> int:
    f = _as_factored(f)
    if not f.is_squarefree():
        return 0
    return -1 if len(f.factors) % 2 else 1


def divisor_sum_decomposition(f) -> tuple[Fraction, Fraction]:
    """Split sigma(N)/N = sum_{d | N} 1/d by whether d is squarefree.

    The squarefree part uses the identity
    sum_{d | N, mu(d) != 0} 1/d = prod_{p | N} (1 + 1/p).
    """
    f = _as_factored(f)
    if f.divisor_count() > MAX_DIVISORS:
        raise ResourceLimitError(f"N has {f.divisor_count()} divisors, above the {MAX_DIVISORS} guard")
    squarefree = psi_ratio(f)
    return squarefree, sigma_ratio(f) - squarefree


def divisors(f) -> list[int]:
    f = _as_factored(f)
    if f.divisor_count() > MAX_DIVISORS:
        raise ResourceLimitError(f"N has {f.divisor_count()} divisors, above the {MAX_DIVISORS} guard")
    out = [1]
    for p, e in f.factors:
        out = [d * p**k for d in out for k in range(e + 1)]
    return sorted(out)


def ramanujan_sum(q: int, n: int) -> int:
    """c_q(n) = sum_{d | gcd(q, n)} d * mu(q/d)."""
    if q < 1 or n < 1:
        raise ValueError("q and n must be >= 1")
    if q > MAX_RAMANUJAN_Q:
        raise ResourceLimitError(f"q {q} exceeds {MAX_RAMANUJAN_Q}")
    fq = dict(factorize(q).factors)
    g = math.gcd(q, n)
    # mu(q/d) != 0 needs v_p(d) >= v_p(q) - 1 for every p | q
    total = 0
    choices = []
    for p, v in fq.items():
        vg = 0
        gg = g
        while gg % p == 0:
            gg //= p
            vg += 1
        choices.append([(p, k) for k in range(max(0, v - 1), vg + 1)])
    for combo in product(*choices):
        d = 1
        sign = 1
        for p, k in combo:
            d *= p**k
            if fq[p] - k == 1:
                sign = -sign
        total += sign * d
    return total


def moebius_table(limit: int) -> np.ndarray:
    """mu(0..limit) by a linear-time sieve (mu[0] = 0)."""
    mu = np.ones(limit + 1, dtype=np.int8)
    mu[0] = 0
    if limit < 2:
        return mu
    from .sieve import primes_up_to

    for p in primes_up_to(limit):
        p = int(p)
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    return mu


def ramanujan_coefficients(n: int, Q: int) -> np.ndarray:
    """c_q(n) for q = 0..Q (entry 0 is unused and zero)."""
    if n < 1 or Q < 1:
        raise ValueError("n and Q must be >= 1")
    if Q > MAX_RAMANUJAN_Q:
        raise ResourceLimitError(f"Q {Q} exceeds {MAX_RAMANUJAN_Q}")
    mu = moebius_table(Q)
    # c_q(n) = sum over d | n, d | q of d * mu(q/d)
    c = np.zeros(Q + 1, dtype=np.int64)
    for d in divisors(n):
        if d > Q:
            break
        c[d::d] += d * mu[1 : Q // d + 1].astype(np.int64)
    return c


def ramanujan_partial_table(n: int, Q: int, precision_bits: int = 106):
    """Iterator of ``(q, c_q(n), (pi^2/6) * sum_{j <= q} c_j(n) / j^2)`` for q = 1..Q."""
    return _partial_rows(ramanujan_coefficients(n, Q).tolist(), Q, precision_bits)


def _partial_rows(c: list, Q: int, precision_bits: int):
    # no yield inside a workprec block: it would leak into the consumer
    w = precision_bits + 32
    with mpmath.workprec(w):
        scale = mpmath.pi**2 / 6
        s = mpmath.mpf(0)
    for q in range(1, Q + 1):
        with mpmath.workprec(w):
            if c[q]:
                s += mpmath.mpf(c[q]) / (q * q)
            v = scale * s
        with mpmath.workprec(precision_bits):
            v = +v
        yield q, c[q], v


def ramanujan_partial_sigma(n: int, Q: int, precision_bits: int = 106):
    """(pi^2/6) * sum_{q <= Q} c_q(n) / q^2, the truncated expansion of sigma(n)/n."""
    c = ramanujan_coefficients(n, Q)
    with mpmath.workprec(precision_bits + 32):
        s = mpmath.mpf(0)
        for q in np.flatnonzero(c).tolist():
            s += mpmath.mpf(int(c[q])) / (q * q)
        v = mpmath.pi**2 / 6 * s
    with mpmath.workprec(precision_bits):
        return +v
