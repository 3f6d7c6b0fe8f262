"""Prime harmonic sum, Mertens product and prod(1 + 1/p) with residuals.

Each quantity is a compensated sum over p <= x: 1/p for the harmonic sum,
-log(1 - 1/p) and log(1 + 1/p) for the two products, which are then
exponentiated once.  Sums are built per sieve segment and folded in
ascending order, so results are bit-identical for any worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import mpmath
import numpy as np

from . import constants
from .ddarith import (
    DD,
    HARMONIC,
    MERTENS,
    PSI,
    PrecisionSum,
    dd_add,
    dd_log_int,
    dd_sqrt_int,
    segment_sum,
)
from .sieve import HARD_CAP, check_cap, ordered_map, primes_up_to, segment_bounds, sieve_segment

WORKING_BITS = 106
NATIVE_BITS = 53


class Quantity(str, Enum):
    HARMONIC_SUM = "harmonic_sum"
    MERTENS_PRODUCT = "mertens_product"
    PSI_PRODUCT = "psi_product"

    @classmethod
    def parse(cls, name) -> "Quantity":
        if isinstance(name, cls):
            return name
        aliases = {"harmonic": cls.HARMONIC_SUM, "mertens": cls.MERTENS_PRODUCT, "psi": cls.PSI_PRODUCT}
        key = str(name).lower().replace("-", "_")
        if key in aliases:
            return aliases[key]
        return cls(key)


_KIND = {
    Quantity.HARMONIC_SUM: HARMONIC,
    Quantity.MERTENS_PRODUCT: MERTENS,
    Quantity.PSI_PRODUCT: PSI,
}


@dataclass(frozen=True)
class ResidualRecord:
    x: int
    quantity: Quantity
    computed: object
    asymptote: object
    residual: object
    scaled_residual: object


def _check_bits(precision_bits: int) -> None:
    if precision_bits not in (NATIVE_BITS, WORKING_BITS) and not WORKING_BITS < precision_bits <= 4096:
        raise ValueError(f"precision_bits must be 53, 106 or in (106, 4096], got {precision_bits}")


def iter_prefix_sums(
    grid,
    kind: int,
    segment_size: int | None = None,
    workers: int = 1,
    compensated: bool = True,
    start_unit: int = 0,
    running: PrecisionSum | None = None,
    cap: int = HARD_CAP,
):
    """Stream ``(unit, [(grid_index, sum)], running)`` per sieve segment.

    ``sum`` is the sum over p <= grid[grid_index] of the per-prime term
    ``kind``; ``running`` is the total over all segments so far and, with
    ``unit + 1``, is what a resumed stream needs.  It is the same object
    on every step, so snapshot it with ``to_state()``.  One sieve pass over
    [2, max(grid)]; ``grid`` must be strictly ascending.
    """
    grid = [int(g) for g in grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly ascending")
    if not grid:
        return
    if grid[0] < 2:
        raise ValueError("grid points must be >= 2")
    check_cap(grid[-1], cap)
    garr = np.array(grid, dtype=np.int64)
    bounds = segment_bounds(2, grid[-1] + 1, segment_size)

    def work(b):
        lo, hi = b
        ps = sieve_segment(lo, hi).primes()
        first, last = np.searchsorted(garr, [lo, hi], side="left")
        idx = np.searchsorted(ps, garr[first:last], side="right").astype(np.int64) - 1
        sh, sl, qh, ql = segment_sum(ps, kind, compensated, idx)
        return PrecisionSum(sh, sl, ps.size, compensated), int(first), idx.tolist(), qh.tolist(), ql.tolist()

    running = running if running is not None else PrecisionSum(compensated=compensated)
    parts = ordered_map(work, bounds[start_unit:], workers)
    for unit, (part, first, idx, qh, ql) in enumerate(parts, start=start_unit):
        values = []
        for j, (i, h, l) in enumerate(zip(idx, qh, ql)):
            if i < 0:
                v = running.value
            elif compensated:
                v = DD(*dd_add(running.hi, running.lo, h, l))
            else:
                v = DD(running.hi + h)
            values.append((first + j, v))
        running.combine(part)
        yield unit, values, running


def prefix_sums(
    grid,
    kind: int,
    segment_size: int | None = None,
    workers: int = 1,
    compensated: bool = True,
    cap: int = HARD_CAP,
) -> list[DD]:
    """sum over p <= g of the per-prime term ``kind``, for each g in ``grid``."""
    out: list[DD] = []
    for _, values, _ in iter_prefix_sums(grid, kind, segment_size, workers, compensated, cap=cap):
        out.extend(v for _, v in values)
    return out


def _finish(kind: int, s: DD, compensated: bool) -> DD:
    if kind == HARMONIC:
        return s
    if not compensated:
        return DD(math.exp(s.hi))
    return s.exp()


def _values(grid, quantity: Quantity, precision_bits: int, segment_size, workers):
    _check_bits(precision_bits)
    if precision_bits > WORKING_BITS:
        return reference_values(grid, quantity, precision_bits)
    kind = _KIND[quantity]
    compensated = precision_bits == WORKING_BITS
    sums = prefix_sums(grid, kind, segment_size, workers, compensated)
    return [_finish(kind, s, compensated) for s in sums]


def prime_harmonic_sum(x: int, precision_bits: int = WORKING_BITS, segment_size=None, workers: int = 1):
    """sum_{p <= x} 1/p."""
    if x < 2:
        raise ValueError("x must be >= 2")
    return _values([x], Quantity.HARMONIC_SUM, precision_bits, segment_size, workers)[0]


def mertens_product(x: int, precision_bits: int = WORKING_BITS, segment_size=None, workers: int = 1):
    """prod_{p <= x} (1 - 1/p)^-1, evaluated as exp(-sum log(1 - 1/p))."""
    if x < 2:
        raise ValueError("x must be >= 2")
    return _values([x], Quantity.MERTENS_PRODUCT, precision_bits, segment_size, workers)[0]


def psi_product(x: int, precision_bits: int = WORKING_BITS, segment_size=None, workers: int = 1):
    """prod_{p <= x} (1 + 1/p), evaluated as exp(sum log(1 + 1/p))."""
    if x < 2:
        raise ValueError("x must be >= 2")
    return _values([x], Quantity.PSI_PRODUCT, precision_bits, segment_size, workers)[0]


def reference_values(grid, quantity, precision_bits: int = 256) -> list:
    """Direct mpmath evaluation at ``precision_bits``.

    Products are formed by straight multiplication of (p -+ 1)/p, a different
    route from the log-space double-double path.
    """
    quantity = Quantity.parse(quantity)
    grid = [int(g) for g in grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly ascending")
    if not grid:
        return []
    primes = primes_up_to(grid[-1])
    cuts = np.searchsorted(primes, grid, side="right")
    out = []
    with mpmath.workprec(precision_bits + 32):
        acc = mpmath.mpf(0) if quantity is Quantity.HARMONIC_SUM else mpmath.mpf(1)
        start = 0
        for cut in cuts:
            for p in primes[start:cut].tolist():
                if quantity is Quantity.HARMONIC_SUM:
                    acc += mpmath.mpf(1) / p
                elif quantity is Quantity.MERTENS_PRODUCT:
                    acc = acc * p / (p - 1)
                else:
                    acc = acc * (p + 1) / p
            start = cut
            out.append(acc)
    with mpmath.workprec(precision_bits):
        return [+v for v in out]


def asymptote(x: int, quantity, precision_bits: int = WORKING_BITS):
    """log log x + B1, e^gamma log x, or (6 e^gamma / pi^2) log x."""
    quantity = Quantity.parse(quantity)
    if precision_bits > WORKING_BITS:
        with mpmath.workprec(precision_bits + 32):
            lx = mpmath.log(x)
            if quantity is Quantity.HARMONIC_SUM:
                v = mpmath.log(lx) + constants.mertens_constant(min(precision_bits + 32, 4096))
            else:
                coeffs = constants.asymptote_coefficients(min(precision_bits + 32, 4096))
                key = "exp_gamma" if quantity is Quantity.MERTENS_PRODUCT else "psi"
                v = coeffs[key] * lx
        with mpmath.workprec(precision_bits):
            return +v
    wc = constants.working_constants()
    lx = dd_log_int(x)
    if quantity is Quantity.HARMONIC_SUM:
        return lx.log() + wc.mertens_b1
    if quantity is Quantity.MERTENS_PRODUCT:
        return wc.exp_gamma * lx
    return wc.psi_coefficient * lx


def _record(x: int, quantity: Quantity, computed, precision_bits: int) -> ResidualRecord:
    asym = asymptote(x, quantity, precision_bits)
    if isinstance(computed, DD):
        residual = computed - asym
        scaled = dd_sqrt_int(x) * residual
    else:
        with mpmath.workprec(precision_bits):
            residual = computed - asym
            scaled = mpmath.sqrt(x) * residual
    return ResidualRecord(x, quantity, computed, asym, residual, scaled)


def residual_record(x: int, quantity, precision_bits: int = WORKING_BITS, segment_size=None, workers: int = 1):
    quantity = Quantity.parse(quantity)
    if x < 3:
        raise ValueError("x must be >= 3")
    return residual_scan([x], quantity, precision_bits, segment_size, workers)[0]


def residual_scan(
    x_grid, quantity, precision_bits: int = WORKING_BITS, segment_size=None, workers: int = 1
) -> list[ResidualRecord]:
    """Residual records along an ascending grid, from one sieve pass."""
    quantity = Quantity.parse(quantity)
    x_grid = [int(x) for x in x_grid]
    if any(x < 3 for x in x_grid):
        raise ValueError("grid points must be >= 3")
    values = _values(x_grid, quantity, precision_bits, segment_size, workers)
    return [_record(x, quantity, v, precision_bits) for x, v in zip(x_grid, values)]


def envelope_forms(x: int) -> dict:
    """The two oscillation envelope shapes printed for prod(1 + 1/p).

    ``log_x_form`` is x^-1/2 logloglog x / log x and ``loglog_x_form`` is
    logloglog x / (x^1/2 loglog x).  Both are None while logloglog x <= 0.
    """
    lx = math.log(x)
    llx = math.log(lx)
    if llx <= 1.0:
        return {"log_x_form": None, "loglog_x_form": None}
    lllx = math.log(llx)
    return {
        "log_x_form": lllx / (math.sqrt(x) * lx),
        "loglog_x_form": lllx / (math.sqrt(x) * llx),
    }
