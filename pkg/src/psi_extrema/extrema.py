"""Primorial stream, extreme-value inequalities and a colossally abundant chain.

Inequalities checked:

* ``psi_theorem1``: psi(N_k)/N_k > (6 e^gamma / pi^2) log log N_k on primorials,
* ``nicolas``: N_k/phi(N_k) > e^gamma log log N_k on primorials,
* ``robin``: sigma(N)/N < e^gamma log log N.

log log N_k is always formed as log(theta(p_k)); N_k itself is never built.
Every report carries ``margin = lhs - rhs``; a verdict inside the guard band
is re-evaluated at 256 bits before it is reported.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterator

import mpmath
import numpy as np
from numba import njit

from . import arithfun, constants
from .arithfun import FactoredInteger
from .ddarith import DD, dd_div, dd_log, dd_log_int, loglog_bound, primorial_segment
from .errors import ResourceLimitError
from .sieve import HARD_CAP, check_cap, nth_prime, ordered_map, primes_up_to, segment_bounds, sieve_segment

GUARD_REL = 1e-15
HIGH_PRECISION_BITS = 256
WORKING_BITS = 106
ROBIN_N_CAP = 3 * 10**7
CA_COUNT_CAP = 10**4
ROBIN_SLACK_C = 0.6483  # Robin's unconditional constant for n >= 3
ROBIN_UNIT = 1 << 16
CA_UNIT = 256


class Inequality(str, Enum):
    PSI_THEOREM1 = "psi_theorem1"
    NICOLAS = "nicolas"
    ROBIN = "robin"

    @classmethod
    def parse(cls, name) -> "Inequality":
        if isinstance(name, cls):
            return name
        return cls(str(name).lower().replace("-", "_"))


class Verdict(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class PrimorialRecord:
    k: int
    p_k: int
    log_N: object
    psi_ratio: object
    phi_inverse_ratio: object

    @property
    def sigma_ratio(self):
        # N_k is squarefree
        return self.psi_ratio


@dataclass(frozen=True)
class InequalityReport:
    subject: object
    inequality: Inequality
    lhs: object
    rhs: object
    margin: object
    verdict: Verdict
    k: int
    p_k: int
    log_N: object
    precision_bits: int = WORKING_BITS
    degenerate: bool = False
    aux: object = None


# ---------------------------------------------------------------------------
# primorial stream
# ---------------------------------------------------------------------------

_STATE0 = (0.0, 0.0, 1.0, 0.0, 1.0, 0.0)


@dataclass
class PrimorialBlock:
    """Records k0+1 .. k0+len(primes) as column arrays."""

    k0: int
    primes: np.ndarray
    cols: np.ndarray  # (n, 6): logN hi/lo, psi hi/lo, phi hi/lo

    def __len__(self) -> int:
        return self.primes.size

    def record(self, i: int) -> PrimorialRecord:
        c = self.cols[i].tolist()
        return PrimorialRecord(
            self.k0 + i + 1,
            int(self.primes[i]),
            DD(c[0], c[1]),
            DD(c[2], c[3]),
            DD(c[4], c[5]),
        )


def primorial_blocks(
    p_max: int,
    segment_size: int | None = None,
    workers: int = 1,
    compensated: bool = True,
    start_unit: int = 0,
    state: tuple | None = None,
    k0: int = 0,
    cap: int = HARD_CAP,
) -> Iterator[tuple[int, PrimorialBlock, tuple]]:
    """Yield ``(unit, block, state_after)`` per sieve segment of [2, p_max].

    Resuming passes the ``state``/``k0`` saved after ``start_unit - 1``.
    """
    if p_max < 2:
        raise ValueError("p_max must be >= 2")
    check_cap(p_max, cap)
    bounds = segment_bounds(2, p_max + 1, segment_size)[start_unit:]
    st = np.array(state if state is not None else _STATE0, dtype=np.float64)
    k = k0
    segs = ordered_map(lambda b: sieve_segment(*b).primes(), bounds, workers)
    for unit, ps in enumerate(segs, start=start_unit):
        cols = primorial_segment(ps, st, compensated)
        block = PrimorialBlock(k, ps, cols)
        k += ps.size
        yield unit, block, tuple(float(v) for v in st)


def primorial_stream(
    p_max: int,
    precision_bits: int = WORKING_BITS,
    segment_size: int | None = None,
    workers: int = 1,
) -> Iterator[PrimorialRecord]:
    """One record per prime p_k <= p_max, updated incrementally."""
    if precision_bits > WORKING_BITS:
        primes = primes_up_to(p_max)
        yield from reference_primorials(range(1, primes.size + 1), precision_bits, primes=primes)
        return
    compensated = precision_bits == WORKING_BITS
    for _, block, _ in primorial_blocks(p_max, segment_size, workers, compensated):
        for i in range(len(block)):
            yield block.record(i)


def reference_primorials(ks, precision_bits: int = HIGH_PRECISION_BITS, primes=None) -> list[PrimorialRecord]:
    """Records for the given indices, recomputed from scratch in mpmath."""
    ks = sorted(set(int(k) for k in ks))
    if not ks:
        return []
    if ks[0] < 1:
        raise ValueError("k must be >= 1")
    if primes is None:
        primes = primes_up_to(nth_prime(ks[-1]))
    wanted = set(ks)
    out = []
    with mpmath.workprec(precision_bits + 32):
        log_n = mpmath.mpf(0)
        psi = mpmath.mpf(1)
        phi = mpmath.mpf(1)
        for k, p in enumerate(primes[: ks[-1]].tolist(), start=1):
            log_n += mpmath.log(p)
            psi = psi * (p + 1) / p
            phi = phi * p / (p - 1)
            if k in wanted:
                out.append((k, p, log_n, psi, phi))
    with mpmath.workprec(precision_bits):
        return [PrimorialRecord(k, p, +a, +b, +c) for k, p, a, b, c in out]


# ---------------------------------------------------------------------------
# inequality checks
# ---------------------------------------------------------------------------

def _coefficient(inequality: Inequality, bits: int):
    if bits > WORKING_BITS:
        coeffs = constants.asymptote_coefficients(min(bits, constants.MAX_BITS))
    else:
        wc = constants.working_constants()
        coeffs = {"psi": wc.psi_coefficient, "exp_gamma": wc.exp_gamma}
    return coeffs["psi"] if inequality is Inequality.PSI_THEOREM1 else coeffs["exp_gamma"]


def _verdict_code(code: int, reverse: bool = False) -> Verdict:
    if code == 0:
        return Verdict.INDETERMINATE
    holds = (code > 0) != reverse
    return Verdict.HOLDS if holds else Verdict.FAILS


def _check_mp(rec: PrimorialRecord, inequality: Inequality, bits: int) -> InequalityReport:
    with mpmath.workprec(bits):
        lhs = rec.psi_ratio if inequality is Inequality.PSI_THEOREM1 else rec.phi_inverse_ratio
        log_n = mpmath.mpf(rec.log_N)
        if log_n <= 1:
            return InequalityReport(
                rec.k, inequality, lhs, mpmath.ninf, mpmath.inf, Verdict.HOLDS, rec.k, rec.p_k, log_n, bits, True
            )
        rhs = _coefficient(inequality, bits) * mpmath.log(log_n)
        margin = lhs - rhs
        guard = mpmath.mpf(2) ** (32 - bits) * max(abs(lhs), abs(rhs), 1)
        code = 1 if margin > guard else (-1 if margin < -guard else 0)
    return InequalityReport(rec.k, inequality, lhs, rhs, margin, _verdict_code(code), rec.k, rec.p_k, log_n, bits)


def _block_reports(block: PrimorialBlock, inequality: Inequality) -> list[InequalityReport]:
    c = block.cols
    if inequality is Inequality.PSI_THEOREM1:
        lhs_h, lhs_l = c[:, 2], c[:, 3]
    else:
        lhs_h, lhs_l = c[:, 4], c[:, 5]
    coef = _coefficient(inequality, WORKING_BITS)
    rh, rl, mh, ml, codes = loglog_bound(
        np.ascontiguousarray(lhs_h),
        np.ascontiguousarray(lhs_l),
        np.ascontiguousarray(c[:, 0]),
        np.ascontiguousarray(c[:, 1]),
        coef.hi,
        coef.lo,
        GUARD_REL,
    )
    lhs_h, lhs_l, rh, rl, mh, ml = (a.tolist() for a in (lhs_h, lhs_l, rh, rl, mh, ml))
    ln_h, ln_l = c[:, 0].tolist(), c[:, 1].tolist()
    primes = block.primes.tolist()
    codes = codes.tolist()
    out = []
    for i in range(len(block)):
        k = block.k0 + i + 1
        p = primes[i]
        code = codes[i]
        if code == 0:
            # inside the guard band: settle at high precision
            (ref,) = reference_primorials([k], HIGH_PRECISION_BITS)
            out.append(_check_mp(ref, inequality, HIGH_PRECISION_BITS))
            continue
        out.append(
            InequalityReport(
                k,
                inequality,
                DD(lhs_h[i], lhs_l[i]),
                DD(rh[i], rl[i]),
                DD(mh[i], ml[i]),
                Verdict.HOLDS if code == 2 else _verdict_code(code),
                k,
                p,
                DD(ln_h[i], ln_l[i]),
                WORKING_BITS,
                code == 2,
            )
        )
    return out


def _check_record(rec: PrimorialRecord, inequality: Inequality) -> InequalityReport:
    if not isinstance(rec.log_N, DD):
        return _check_mp(rec, inequality, HIGH_PRECISION_BITS)
    cols = np.array(
        [[rec.log_N.hi, rec.log_N.lo, rec.psi_ratio.hi, rec.psi_ratio.lo, rec.phi_inverse_ratio.hi, rec.phi_inverse_ratio.lo]]
    )
    block = PrimorialBlock(rec.k - 1, np.array([rec.p_k], dtype=np.int64), cols)
    return _block_reports(block, inequality)[0]


def check_psi_theorem1(rec: PrimorialRecord) -> InequalityReport:
    """psi(N_k)/N_k against (6 e^gamma / pi^2) log log N_k."""
    return _check_record(rec, Inequality.PSI_THEOREM1)


def check_nicolas(rec: PrimorialRecord) -> InequalityReport:
    """N_k/phi(N_k) against e^gamma log log N_k."""
    return _check_record(rec, Inequality.NICOLAS)


def primorial_record(k: int, precision_bits: int = WORKING_BITS) -> PrimorialRecord:
    """The k-th record of the primorial stream."""
    p_k = nth_prime(k)
    if precision_bits > WORKING_BITS:
        return reference_primorials([k], precision_bits)[0]
    last = None
    for last in primorial_stream(p_k, precision_bits):
        pass
    return last


def _log_int(n: int):
    return dd_log_int(n)


def check_robin(f, slack_c: float = ROBIN_SLACK_C) -> InequalityReport:
    """sigma(N)/N against e^gamma log log N (strict Robin form).

    ``margin = lhs - rhs``, so the inequality holds when the margin is below
    minus the guard.  ``aux`` carries slack_c / log log N, the size of the
    unconditional error term, as a diagnostic only.
    """
    if not isinstance(f, FactoredInteger):
        f = arithfun.factorize(f)
    n = f.value
    if n < 3:
        raise ValueError("Robin's inequality needs N >= 3")
    exact = arithfun.sigma_ratio(f)
    lhs = DD.from_fraction(exact)
    log_n = _log_int(n)
    ll = log_n.log()
    rhs = constants.working_constants().exp_gamma * ll
    margin = lhs - rhs
    guard = GUARD_REL * max(abs(lhs.hi), abs(rhs.hi), 1.0)
    bits = WORKING_BITS
    if abs(margin.hi) <= guard:
        bits = HIGH_PRECISION_BITS
        with mpmath.workprec(bits):
            lhs = mpmath.mpf(exact.numerator) / exact.denominator
            log_n = mpmath.log(n)
            rhs = constants.asymptote_coefficients(bits)["exp_gamma"] * mpmath.log(log_n)
            margin = lhs - rhs
            g = mpmath.mpf(2) ** (32 - bits) * max(abs(lhs), abs(rhs), 1)
            code = 1 if margin > g else (-1 if margin < -g else 0)
    else:
        code = 1 if margin.hi > guard else -1
    p_max = f.primes[-1] if f.factors else 1
    return InequalityReport(
        f,
        Inequality.ROBIN,
        lhs,
        rhs,
        margin,
        _verdict_code(code, reverse=True),
        n,
        p_max,
        log_n,
        bits,
        False,
        slack_c / float(ll),
    )


@njit(cache=True)
def _sigma_table(n_max):
    # divisor sums and largest prime factors of 0..n_max
    s = np.zeros(n_max + 1, dtype=np.int64)
    lpf = np.zeros(n_max + 1, dtype=np.int64)
    for d in range(1, n_max + 1):
        prime = d > 1 and lpf[d] == 0
        for m in range(d, n_max + 1, d):
            s[m] += d
            if prime:
                lpf[m] = d
    return s, lpf


@njit(cache=True)
def _robin_columns(lo, hi, sigma):
    n = hi - lo
    lhs_h = np.empty(n)
    lhs_l = np.empty(n)
    ln_h = np.empty(n)
    ln_l = np.empty(n)
    for i in range(n):
        lhs_h[i], lhs_l[i] = dd_div(float(sigma[lo + i]), 0.0, float(lo + i), 0.0)
        ln_h[i], ln_l[i] = dd_log(float(lo + i), 0.0)
    return lhs_h, lhs_l, ln_h, ln_l


def _robin_block(lo: int, hi: int, sigma: np.ndarray, lpf: np.ndarray) -> list[InequalityReport]:
    """Robin reports for lo <= n < hi from a divisor-sum table."""
    lhs_h, lhs_l, ln_h, ln_l = _robin_columns(lo, hi, sigma)
    eg = constants.working_constants().exp_gamma
    cols = loglog_bound(lhs_h, lhs_l, ln_h, ln_l, eg.hi, eg.lo, GUARD_REL)
    lhs_h, lhs_l, ln_h, ln_l = (a.tolist() for a in (lhs_h, lhs_l, ln_h, ln_l))
    rh, rl, mh, ml, codes = (a.tolist() for a in cols)
    lpf = lpf[lo:hi].tolist()
    out = []
    for i, n in enumerate(range(lo, hi)):
        if codes[i] == 0:
            out.append(check_robin(n))
            continue
        out.append(
            InequalityReport(
                n,
                Inequality.ROBIN,
                DD(lhs_h[i], lhs_l[i]),
                DD(rh[i], rl[i]),
                DD(mh[i], ml[i]),
                _verdict_code(codes[i], reverse=True),
                n,
                lpf[i],
                DD(ln_h[i], ln_l[i]),
                WORKING_BITS,
                False,
                ROBIN_SLACK_C / math.log(ln_h[i]),
            )
        )
    return out


# ---------------------------------------------------------------------------
# Corollary-5 style residual rows
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DivisorSumResiduals:
    """Residuals of sigma/N, its squarefree and non-squarefree parts.

    Main terms use e^gamma, 6 e^gamma/pi^2 and (1 - 6/pi^2) e^gamma times
    log log N.  ``nonsquarefree_is_zero`` flags squarefree N, whose third
    component is minus its main term.
    """

    subject: object
    loglog_N: DD
    sigma: DD
    squarefree: DD
    nonsquarefree: DD
    nonsquarefree_is_zero: bool


def corollary5_residuals(subject) -> DivisorSumResiduals:
    wc = constants.working_constants()
    if isinstance(subject, PrimorialRecord):
        log_n = DD.coerce(subject.log_N)
        if log_n.hi <= math.e:
            raise ValueError("needs log N > e")
        sigma = sq = DD.coerce(subject.psi_ratio)
        ns = DD(0.0)
        zero = True
    else:
        f = subject if isinstance(subject, FactoredInteger) else arithfun.factorize(subject)
        log_n = _log_int(f.value)
        if log_n.hi <= math.e:
            raise ValueError("needs log N > e")
        sq_exact, ns_exact = arithfun.divisor_sum_decomposition(f)
        sigma = DD.from_fraction(sq_exact + ns_exact)
        sq = DD.from_fraction(sq_exact)
        ns = DD.from_fraction(ns_exact)
        zero = ns_exact == 0
    ll = log_n.log()
    return DivisorSumResiduals(
        subject,
        ll,
        sigma - wc.exp_gamma * ll,
        sq - wc.psi_coefficient * ll,
        ns - wc.nonsquarefree_coefficient * ll,
        zero,
    )


# ---------------------------------------------------------------------------
# colossally abundant chain
# ---------------------------------------------------------------------------

def _benefit(p: int, v: int):
    # log(sigma(p^(v+1)) / sigma(p^v)) / log p
    return mpmath.log(mpmath.mpf(p ** (v + 2) - 1) / (p ** (v + 1) - 1)) / mpmath.log(p)


def _trusted(factors: dict) -> FactoredInteger:
    f = object.__new__(FactoredInteger)
    object.__setattr__(f, "factors", tuple(sorted(factors.items())))
    return f


def ca_stream(count: int) -> Iterator[FactoredInteger]:
    """Greedy chain: repeatedly multiply by the prime with the largest
    log(sigma(Np)/sigma(N)) / log p.  Exponents stay non-increasing."""
    if count < 0:
        raise ValueError("count must be >= 0")
    if count > CA_COUNT_CAP:
        raise ResourceLimitError(f"count {count} exceeds {CA_COUNT_CAP}")
    return _ca_chain(count)


def _ca_chain(count: int) -> Iterator[FactoredInteger]:
    if count == 0:
        return
    from .sieve import primes_up_to as _pu

    exps: dict[int, int] = {}
    order: list[int] = []
    new_primes = iter(_pu(max(1000, 40 * count)).tolist())
    with mpmath.workprec(160):
        heap = [(-_benefit(2, 0), 2)]
    next(new_primes)
    for _ in range(count):
        with mpmath.workprec(160):
            _, p = heapq.heappop(heap)
            v = exps.get(p, 0)
            exps[p] = v + 1
            if v == 0:
                order.append(p)
                q = next(new_primes)
                heapq.heappush(heap, (-_benefit(q, 0), q))
            heapq.heappush(heap, (-_benefit(p, v + 1), p))
        i = order.index(p)
        if i > 0 and exps[order[i - 1]] < exps[p]:
            raise AssertionError(f"exponent pattern broke at prime {p}")
        yield _trusted(exps)


# ---------------------------------------------------------------------------
# scans
# ---------------------------------------------------------------------------

@dataclass
class ScanState:
    """Everything needed to resume a scan after a completed unit."""

    next_unit: int = 0
    k: int = 0
    accumulators: tuple = _STATE0
    checked: int = 0
    degenerate: int = 0
    resolved_high_precision: int = 0
    failures: list = field(default_factory=list)
    first_hold: int | None = None
    envelope: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "next_unit": self.next_unit,
            "k": self.k,
            "accumulators": [float(v).hex() for v in self.accumulators],
            "checked": self.checked,
            "degenerate": self.degenerate,
            "resolved_high_precision": self.resolved_high_precision,
            "failures": self.failures,
            "first_hold": self.first_hold,
            "envelope": self.envelope,
        }

    @classmethod
    def from_json(cls, d: dict) -> "ScanState":
        return cls(
            next_unit=int(d["next_unit"]),
            k=int(d["k"]),
            accumulators=tuple(float.fromhex(v) for v in d["accumulators"]),
            checked=int(d["checked"]),
            degenerate=int(d["degenerate"]),
            resolved_high_precision=int(d["resolved_high_precision"]),
            failures=list(d["failures"]),
            first_hold=d["first_hold"],
            envelope=list(d["envelope"]),
        )


@dataclass(frozen=True)
class ScanSummary:
    inequality: Inequality
    bound: int
    checked: int
    failures: list
    first_hold_k: int | None
    degenerate: int
    resolved_high_precision: int
    envelope: list


def _failure_entry(r: InequalityReport) -> dict:
    from .ddarith import format_real

    return {"k": r.k, "p_k": r.p_k, "margin": format_real(r.margin), "verdict": r.verdict.value}


def _update_envelope(state: ScanState, reports: list[InequalityReport]) -> None:
    # per decade of k: extreme margins and margin * sqrt(log N)
    for r in reports:
        if r.degenerate:
            continue
        decade = int(math.log10(r.k)) if r.k > 0 else 0
        m = float(DD.coerce(r.margin).hi) if isinstance(r.margin, DD) else float(r.margin)
        scaled = m * math.sqrt(float(r.log_N.hi if isinstance(r.log_N, DD) else r.log_N))
        env = state.envelope
        if not env or env[-1]["decade"] != decade:
            env.append(
                {"decade": decade, "k_first": r.k, "k_last": r.k, "max_margin": m, "min_margin": m,
                 "max_scaled": scaled, "min_scaled": scaled}
            )
            continue
        e = env[-1]
        e["k_last"] = r.k
        e["max_margin"] = max(e["max_margin"], m)
        e["min_margin"] = min(e["min_margin"], m)
        e["max_scaled"] = max(e["max_scaled"], scaled)
        e["min_scaled"] = min(e["min_scaled"], scaled)


def _absorb(state: ScanState, reports: list[InequalityReport], envelope: bool) -> None:
    # first_hold: first subject after the latest failing or degenerate one
    for r in reports:
        state.checked += 1
        if r.precision_bits > WORKING_BITS:
            state.resolved_high_precision += 1
        if r.degenerate:
            state.degenerate += 1
            state.first_hold = None
        elif r.verdict is not Verdict.HOLDS:
            state.failures.append(_failure_entry(r))
            state.first_hold = None
        elif state.first_hold is None:
            state.first_hold = r.k
    if envelope:
        _update_envelope(state, reports)


def scan(
    inequality,
    bound: int,
    *,
    domain: str = "primorials",
    segment_size: int | None = None,
    workers: int = 1,
    state: ScanState | None = None,
    on_unit: Callable[[list[InequalityReport], ScanState], None] | None = None,
) -> ScanSummary:
    """Check every subject up to ``bound`` and summarize.

    ``domain`` is ``primorials`` (bound = p_max) for psi_theorem1/nicolas;
    for robin it is ``integers`` (3 <= n <= bound) or ``ca`` (first ``bound``
    chain members, N < 3 skipped).  After each unit of work ``on_unit`` gets
    the unit's reports and the resumable state.
    """
    inequality = Inequality.parse(inequality)
    state = state or ScanState()
    if inequality is Inequality.ROBIN:
        if domain == "primorials":
            domain = "integers"
        units = _robin_units(bound, domain, state)
    else:
        if domain != "primorials":
            raise ValueError(f"{inequality.value} is checked on primorials only")
        units = _primorial_units(inequality, bound, segment_size, workers, state)
    for reports, advance in units:
        _absorb(state, reports, envelope=inequality is not Inequality.ROBIN)
        advance(state)
        if on_unit is not None:
            on_unit(reports, state)
    return ScanSummary(
        inequality,
        bound,
        state.checked,
        list(state.failures),
        state.first_hold,
        state.degenerate,
        state.resolved_high_precision,
        list(state.envelope),
    )


def _primorial_units(inequality, p_max, segment_size, workers, state: ScanState):
    blocks = primorial_blocks(
        p_max, segment_size, workers, True, state.next_unit, state.accumulators, state.k
    )
    for unit, block, st in blocks:
        reports = _block_reports(block, inequality)

        def advance(s: ScanState, unit=unit, st=st, n=len(block)):
            s.next_unit = unit + 1
            s.accumulators = st
            s.k += n

        yield reports, advance


def _robin_units(bound: int, domain: str, state: ScanState):
    if domain == "integers":
        if bound > ROBIN_N_CAP:
            raise ResourceLimitError(f"n_max {bound} exceeds {ROBIN_N_CAP}")
        if bound < 3:
            return
        sigma, lpf = _sigma_table(bound)
        starts = list(range(3, bound + 1, ROBIN_UNIT))
        for unit in range(state.next_unit, len(starts)):
            lo = starts[unit]
            hi = min(bound + 1, lo + ROBIN_UNIT)
            reports = _robin_block(lo, hi, sigma, lpf)

            def advance(s: ScanState, unit=unit):
                s.next_unit = unit + 1

            yield reports, advance
    elif domain == "ca":
        if bound > CA_COUNT_CAP:
            raise ResourceLimitError(f"count {bound} exceeds {CA_COUNT_CAP}")
        chain = list(ca_stream(bound))
        for unit in range(state.next_unit, (len(chain) + CA_UNIT - 1) // CA_UNIT):
            reports = []
            for idx in range(unit * CA_UNIT, min(len(chain), (unit + 1) * CA_UNIT)):
                f = chain[idx]
                if f.value < 3:
                    continue
                reports.append(check_robin(f))

            def advance(s: ScanState, unit=unit):
                s.next_unit = unit + 1

            yield reports, advance
    else:
        raise ValueError(f"unknown domain {domain!r}")
