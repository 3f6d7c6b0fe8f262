"""Segmented sieve of Eratosthenes and the functions pi(x), theta(x).

Segments are aligned to absolute multiples of the segment size, so the
tiling of ``[lo, hi)`` depends only on ``lo``, ``hi`` and the size, never on
how many workers sieve it.  Only odd numbers are stored; 2 is special-cased.
"""

from __future__ import annotations

import math
import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Iterator, TypeVar

import numpy as np
from numba import njit

from .ddarith import DD, THETA, PrecisionSum, segment_sum
from .errors import ResourceLimitError

DEFAULT_SEGMENT_SIZE = 1 << 22
HARD_CAP = 1 << 40
SEGMENT_SIZE_ENV = "PSI_EXTREMA_SEGMENT_SIZE"

T = TypeVar("T")
R = TypeVar("R")


def default_segment_size() -> int:
    raw = os.environ.get(SEGMENT_SIZE_ENV)
    if not raw:
        return DEFAULT_SEGMENT_SIZE
    return _check_segment_size(int(raw))


def _check_segment_size(size: int) -> int:
    if size < 64 or size % 2:
        raise ValueError(f"segment size must be an even integer >= 64, got {size}")
    return size


def check_cap(x: int, cap: int = HARD_CAP) -> None:
    if x > cap:
        raise ResourceLimitError(f"bound {x} exceeds the sieve cap {cap}")


@dataclass(frozen=True)
class SieveSegment:
    """Odd-number bitmap for the half-open range ``[lo, hi)``.

    Bit ``i`` of ``bits`` (little-endian within each byte) refers to the odd
    number ``first_odd + 2*i``; a clear bit means prime.
    """

    lo: int
    hi: int
    bits: np.ndarray = field(repr=False, compare=False)
    _primes: np.ndarray = field(repr=False, compare=False)

    @property
    def first_odd(self) -> int:
        return self.lo | 1 if self.lo > 2 else 3

    def primes(self) -> np.ndarray:
        return self._primes

    def is_composite(self, n: int) -> bool:
        if not self.lo <= n < self.hi:
            raise ValueError(f"{n} outside segment [{self.lo}, {self.hi})")
        if n == 2:
            return False
        if n % 2 == 0:
            return True
        i = (n - self.first_odd) // 2
        return bool((self.bits[i >> 3] >> (i & 7)) & 1)


@lru_cache(maxsize=8)
def _base_primes(limit: int) -> np.ndarray:
    """Odd primes <= limit by a plain sieve (limit is at most ~2**20)."""
    if limit < 3:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags)[1:].astype(np.int64)


@njit(cache=True, nogil=True)
def _mark_odds(first_odd, n_odds, base_primes):
    comp = np.zeros(n_odds, dtype=np.uint8)
    if n_odds == 0:
        return comp
    last = first_odd + 2 * (n_odds - 1)
    for p in base_primes:
        if p * p > last:
            break
        start = p * p
        if start < first_odd:
            start = ((first_odd + p - 1) // p) * p
            if start % 2 == 0:
                start += p
        for j in range((start - first_odd) // 2, n_odds, p):
            comp[j] = 1
    if first_odd == 1:
        comp[0] = 1
    return comp


def sieve_segment(lo: int, hi: int) -> SieveSegment:
    """Sieve a single range ``[lo, hi)`` with ``2 <= lo < hi``."""
    first_odd = lo | 1 if lo > 2 else 3
    n_odds = max(0, (hi - first_odd + 1) // 2)
    base = _base_primes(_base_limit(hi))
    comp = _mark_odds(first_odd, n_odds, base)
    primes = np.flatnonzero(comp == 0).astype(np.int64) * 2 + first_odd
    if lo <= 2 < hi:
        primes = np.concatenate((np.array([2], dtype=np.int64), primes))
    bits = np.packbits(comp, bitorder="little")
    return SieveSegment(lo, hi, bits, primes)


def _base_limit(hi: int) -> int:
    # round up so that nearby segments share the cached base-prime table
    r = math.isqrt(max(hi - 1, 4))
    return 1 << max(8, r.bit_length())


def segment_bounds(lo: int, hi: int, segment_size: int | None = None) -> list[tuple[int, int]]:
    """Boundaries of the segments tiling ``[lo, hi)``."""
    if not (isinstance(lo, (int, np.integer)) and isinstance(hi, (int, np.integer))):
        raise TypeError("segment bounds must be integers")
    lo, hi = int(lo), int(hi)
    if lo < 2 or hi <= lo:
        raise ValueError(f"invalid segment range [{lo}, {hi})")
    size = _check_segment_size(segment_size) if segment_size else default_segment_size()
    out = []
    a = lo
    while a < hi:
        b = min(hi, (a // size + 1) * size)
        out.append((a, b))
        a = b
    return out


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> Iterator[R]:
    """Map ``fn`` over ``items`` yielding results in input order.

    With ``workers > 1`` a thread pool keeps at most ``2 * workers`` tasks in
    flight.  The numba kernels release the GIL.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if workers == 1:
        for item in items:
            yield fn(item)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        pending: deque = deque()
        for item in items:
            pending.append(pool.submit(fn, item))
            if len(pending) >= 2 * workers:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()


def segment_iter(
    lo: int,
    hi: int,
    segment_size: int | None = None,
    workers: int = 1,
    cap: int = HARD_CAP,
) -> Iterator[SieveSegment]:
    """Stream sieved segments covering ``[lo, hi)`` in ascending order."""
    bounds = segment_bounds(lo, hi, segment_size)
    check_cap(hi - 1, cap)
    return ordered_map(lambda b: sieve_segment(*b), bounds, workers)


def primes_up_to(
    x: int, segment_size: int | None = None, workers: int = 1, cap: int = HARD_CAP
) -> np.ndarray:
    """All primes ``<= x`` as an ascending int64 array."""
    if x < 0:
        raise ValueError("x must be non-negative")
    check_cap(x, cap)
    if x < 2:
        return np.zeros(0, dtype=np.int64)
    chunks = [seg.primes() for seg in segment_iter(2, x + 1, segment_size, workers, cap)]
    return np.concatenate(chunks)


@dataclass(frozen=True)
class PrimeStats:
    x: int
    pi_x: int
    theta_x: DD


def prime_stats(
    x: int,
    segment_size: int | None = None,
    workers: int = 1,
    compensated: bool = True,
    cap: int = HARD_CAP,
) -> PrimeStats:
    """pi(x) and theta(x) = sum of log p over p <= x.

    theta is summed per segment in double-double and the partials are folded
    in ascending segment order, so the result does not depend on ``workers``.
    """
    if x < 0:
        raise ValueError("x must be non-negative")
    check_cap(x, cap)
    if x < 2:
        return PrimeStats(x, 0, DD(0.0))
    empty = np.zeros(0, dtype=np.int64)

    def work(bounds):
        seg = sieve_segment(*bounds)
        ps = seg.primes()
        hi_, lo_, _, _ = segment_sum(ps, THETA, compensated, empty)
        return PrecisionSum(hi_, lo_, ps.size, compensated)

    total = PrecisionSum(compensated=compensated)
    for part in ordered_map(work, segment_bounds(2, x + 1, segment_size), workers):
        total.combine(part)
    return PrimeStats(x, total.count, total.value)


def nth_prime(k: int, segment_size: int | None = None, cap: int = HARD_CAP) -> int:
    """The k-th prime, with p_1 = 2."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k < 6:
        return (2, 3, 5, 7, 11)[k - 1]
    lk = math.log(k)
    bound = int(k * (lk + math.log(lk))) + 1  # Rosser's bound, valid for k >= 6
    check_cap(bound, cap)
    count = 0
    for seg in segment_iter(2, bound + 1, segment_size, cap=cap):
        ps = seg.primes()
        if count + ps.size >= k:
            return int(ps[k - count - 1])
        count += ps.size
    raise AssertionError("prime bound too small")  # unreachable for k >= 6
