"""Command-line front end: ``psi-extrema <command> [flags]``.

Commands: constants, residuals, scan, check, ramanujan, ca.

Exit status is 0 on success, 2 when an inequality check found a failing
subject, 1 on a runtime error and 64 on a usage error.  Row output is CSV or
JSONL with fixed columns; a given configuration always produces the same
bytes, whatever ``--workers`` is and however often the run was interrupted
and resumed from ``--checkpoint``.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import logging
import os
import sys
from dataclasses import dataclass, fields
from enum import Enum
from fractions import Fraction
from typing import Callable, Sequence

import mpmath

from . import arithfun, constants, extrema, products
from .ddarith import DD, PrecisionSum, format_real
from .errors import CheckpointError, PrecisionInfeasibleError, ResourceLimitError
from .sieve import default_segment_size

log = logging.getLogger("psi_extrema")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_COUNTEREXAMPLE = 2
EXIT_USAGE = 64

SCHEMA_VERSION = 1
ABORT_ENV = "PSI_EXTREMA_ABORT_AFTER_UNITS"  # fault injection for resume tests

COMMANDS = ("constants", "residuals", "scan", "check", "ramanujan", "ca")
FORMATS = ("csv", "jsonl")
INEQUALITIES = ("psi-theorem1", "nicolas", "robin")
QUANTITIES = ("harmonic", "mertens", "psi")

REPORT_COLUMNS = ("k", "p_k", "log_N", "lhs", "rhs", "margin", "verdict", "precision_bits")
ROBIN_COLUMNS = REPORT_COLUMNS + ("robin_slack",)
RESIDUAL_COLUMNS = ("x", "quantity", "computed", "asymptote", "residual", "scaled_residual")
CONSTANT_COLUMNS = ("name", "value", "precision_bits", "method")
RAMANUJAN_COLUMNS = ("q", "c_q", "partial_sum", "sigma_ratio", "error")
CA_COLUMNS = ("index", "N", "factorization", "sigma_ratio")

# flags each command accepts beyond the common ones
_COMMON = ("precision_bits", "workers", "out", "format")
_ALLOWED = {
    "constants": _COMMON + ("prime_cutoff",),
    "residuals": _COMMON + ("quantity", "grid", "pmax", "checkpoint", "resume"),
    "scan": _COMMON + ("inequality", "pmax", "nmax", "count", "checkpoint", "resume"),
    "check": _COMMON + ("inequality", "primorial_k", "n"),
    "ramanujan": _COMMON + ("n", "Q"),
    "ca": _COMMON + ("count",),
}
# not part of the run's identity: never echoed, never fingerprinted
_PLUMBING = ("workers", "out", "checkpoint", "resume")


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    command: str
    quantity: str | None = None
    inequality: str | None = None
    pmax: int | None = None
    nmax: int | None = None
    grid: str | None = None
    primorial_k: int | None = None
    n: int | None = None
    Q: int | None = None
    count: int | None = None
    prime_cutoff: int | None = None
    precision_bits: int = 106
    workers: int = 1
    format: str = "csv"
    out: str | None = None
    checkpoint: str | None = None
    resume: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.workers < 1:
            raise UsageError("--workers must be >= 1")
        if self.format not in FORMATS:
            raise UsageError(f"--format must be one of {', '.join(FORMATS)}")
        allowed = _ALLOWED[self.command]
        for f in fields(self):
            if f.name == "command" or f.name in allowed:
                continue
            if getattr(self, f.name) != f.default:
                raise UsageError(f"--{_flag(f.name)} does not apply to {self.command}")
        for name in ("pmax", "nmax", "primorial_k", "n", "Q", "count", "prime_cutoff"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise UsageError(f"--{_flag(name)} must be >= 1")
        if self.grid is not None:
            parse_grid(self.grid)
        if self.resume and not self.checkpoint:
            raise UsageError("--resume needs --checkpoint")
        if self.checkpoint and not self.out:
            raise UsageError("--checkpoint needs --out")
        getattr(self, f"_validate_{self.command}")()

    def _validate_constants(self):
        if not constants.MIN_BITS <= self.precision_bits <= constants.MAX_BITS:
            raise UsageError(f"--precision-bits must be in [{constants.MIN_BITS}, {constants.MAX_BITS}]")

    def _validate_residuals(self):
        if self.quantity not in QUANTITIES:
            raise UsageError(f"residuals needs --quantity {{{','.join(QUANTITIES)}}}")
        if (self.grid is None) == (self.pmax is None):
            raise UsageError("residuals needs exactly one of --grid, --pmax")
        if self.pmax is not None and self.pmax < 3:
            raise UsageError("--pmax must be >= 3")
        if self.grid is not None and parse_grid(self.grid)[0] < 3:
            raise UsageError("grid points must be >= 3")
        bits = self.precision_bits
        if bits not in (53, 106) and not 106 < bits <= constants.MAX_BITS:
            raise UsageError("--precision-bits must be 53, 106 or in (106, 4096]")
        if bits > 106 and self.checkpoint:
            raise UsageError("checkpointing needs --precision-bits 53 or 106")

    def _validate_scan(self):
        if self.inequality not in INEQUALITIES:
            raise UsageError(f"scan needs --inequality {{{','.join(INEQUALITIES)}}}")
        if self.precision_bits != 106:
            raise UsageError("scan runs at --precision-bits 106 (close calls are redone at 256)")
        given = [name for name in ("pmax", "nmax", "count") if getattr(self, name) is not None]
        need = ("nmax", "count") if self.inequality == "robin" else ("pmax",)
        if len(given) != 1 or given[0] not in need:
            raise UsageError(f"scan --inequality {self.inequality} needs exactly one of "
                             + ", ".join("--" + _flag(x) for x in need))
        if self.pmax is not None and self.pmax < 2:
            raise UsageError("--pmax must be >= 2")

    def _validate_check(self):
        if self.inequality not in INEQUALITIES:
            raise UsageError(f"check needs --inequality {{{','.join(INEQUALITIES)}}}")
        if self.inequality == "robin":
            if self.n is None or self.primorial_k is not None:
                raise UsageError("check --inequality robin needs --n")
            if self.n < 3:
                raise UsageError("--n must be >= 3")
            if self.precision_bits != 106:
                raise UsageError("robin checks run at --precision-bits 106")
        else:
            if self.primorial_k is None or self.n is not None:
                raise UsageError(f"check --inequality {self.inequality} needs --primorial-k")
            if self.precision_bits < 106 or self.precision_bits > constants.MAX_BITS:
                raise UsageError("--precision-bits must be in [106, 4096]")

    def _validate_ramanujan(self):
        if self.n is None or self.Q is None:
            raise UsageError("ramanujan needs --n and --Q")
        if not constants.MIN_BITS <= self.precision_bits <= constants.MAX_BITS:
            raise UsageError(f"--precision-bits must be in [{constants.MIN_BITS}, {constants.MAX_BITS}]")

    def _validate_ca(self):
        if self.count is None:
            raise UsageError("ca needs --count")
        if self.precision_bits != 106:
            raise UsageError("ca has no --precision-bits setting")

    def to_argv(self, plumbing: bool = True) -> list[str]:
        """Canonical argument list; ``parse(to_argv())`` reproduces the config."""
        argv = [self.command]
        for f in fields(self):
            if f.name == "command" or (not plumbing and f.name in _PLUMBING):
                continue
            v = getattr(self, f.name)
            if v == f.default:
                continue
            if v is True:
                argv.append(f"--{_flag(f.name)}")
            else:
                argv += [f"--{_flag(f.name)}", str(v)]
        return argv

    def fingerprint(self) -> str:
        ident = {"argv": self.to_argv(plumbing=False), "segment_size": default_segment_size()}
        return hashlib.sha256(json.dumps(ident, sort_keys=True).encode()).hexdigest()


def _flag(name: str) -> str:
    return name.replace("_", "-")


def _int_arg(text: str) -> int:
    # accepts 1000000, 1e6, 10**6
    t = text.strip()
    try:
        if "**" in t:
            a, b = t.split("**")
            return int(a) ** int(b)
        if any(c in t for c in ".eE"):
            v = Fraction(t)
            if v.denominator != 1:
                raise ValueError
            return int(v)
        return int(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def parse_grid(text: str) -> list[int]:
    """``lin:lo:hi:points`` or ``log:lo:hi:points`` to ascending integers."""
    parts = text.split(":")
    if len(parts) != 4 or parts[0] not in ("lin", "log"):
        raise UsageError(f"grid must look like lin|log:lo:hi:points, got {text!r}")
    try:
        lo, hi, points = (_int_arg(p) for p in parts[1:])
    except argparse.ArgumentTypeError as exc:
        raise UsageError(f"bad grid {text!r}: {exc}") from None
    if points < 1:
        raise UsageError("grid needs at least one point")
    if points == 1:
        if lo != hi:
            raise UsageError("a one-point grid needs lo == hi")
        return [lo]
    if not 1 <= lo < hi:
        raise UsageError("grid needs 1 <= lo < hi")
    m = points - 1
    if parts[0] == "lin":
        out = [lo + (i * (hi - lo) + m // 2) // m for i in range(points)]
    else:
        with mpmath.workprec(96):
            ratio = mpmath.mpf(hi) / lo
            out = [lo] + [int(mpmath.nint(lo * ratio ** (mpmath.mpf(i) / m))) for i in range(1, m)] + [hi]
    if any(b <= a for a, b in zip(out, out[1:])):
        raise UsageError(f"grid {text!r} has repeated points after rounding")
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--precision-bits", type=int, default=106)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--format", choices=FORMATS, default="csv")
    common.add_argument("--quantity", choices=QUANTITIES)
    common.add_argument("--inequality", choices=INEQUALITIES)
    common.add_argument("--pmax", type=_int_arg, help="largest prime p_k / largest x")
    common.add_argument("--nmax", type=_int_arg, help="largest integer N (robin)")
    common.add_argument("--grid", help="lin|log:lo:hi:points")
    common.add_argument("--primorial-k", type=_int_arg)
    common.add_argument("--n", type=_int_arg)
    common.add_argument("--Q", type=_int_arg, help="Ramanujan cutoff")
    common.add_argument("--count", type=_int_arg, help="number of CA terms")
    common.add_argument("--prime-cutoff", type=_int_arg, help="explicit prime range for B1")
    common.add_argument("--checkpoint", default=None)
    common.add_argument("--resume", action="store_true")

    parser = _Parser(prog="psi-extrema", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    helps = {
        "constants": "print the named constants",
        "residuals": "residuals of a prime sum/product against its asymptote",
        "scan": "check an inequality on every subject up to a bound",
        "check": "check an inequality on one subject",
        "ramanujan": "partial sums of the Ramanujan expansion of sigma(n)/n",
        "ca": "list the colossally abundant chain",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def parse(argv: Sequence[str]) -> RunConfig:
    """argv to a validated RunConfig; usage problems exit with status 64."""
    parser = build_parser()
    ns = parser.parse_args(list(argv))
    kwargs = {f.name: getattr(ns, f.name) for f in fields(RunConfig)}
    for f in fields(RunConfig):
        if kwargs[f.name] is None and f.default is not None:
            kwargs[f.name] = f.default
    try:
        return RunConfig(**kwargs)
    except UsageError as exc:
        parser.error(str(exc))


# ---------------------------------------------------------------------------
# row writers
# ---------------------------------------------------------------------------

def _cell(v) -> tuple[str, bool]:
    """Text of one value and whether it is a finite number."""
    if v is None:
        return "", False
    if isinstance(v, Enum):
        return str(v.value), False
    if isinstance(v, bool):
        return ("true" if v else "false"), False
    if isinstance(v, int):
        return str(v), True
    if isinstance(v, Fraction):
        with mpmath.workprec(160):
            v = mpmath.mpf(v.numerator) / v.denominator
    if isinstance(v, (DD, mpmath.mpf, float)):
        s = format_real(v)
        return s, s not in ("inf", "-inf", "nan")
    return str(v), False


def _encode_rows(rows, columns: Sequence[str], fmt: str) -> bytes:
    buf = io.StringIO()
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        for row in rows:
            w.writerow([_cell(row.get(c))[0] for c in columns])
    else:
        for row in rows:
            items = []
            for c in columns:
                text, numeric = _cell(row.get(c))
                items.append(f"{json.dumps(c)}:{text if numeric else json.dumps(text)}")
            buf.write("{" + ",".join(items) + "}\n")
    return buf.getvalue().encode()


def _preamble(columns: Sequence[str], fmt: str, comment: str | None) -> bytes:
    if fmt != "csv":
        return b""
    buf = io.StringIO()
    if comment:
        buf.write(f"# {comment}\n")
    csv.writer(buf, lineterminator="\n").writerow(columns)
    return buf.getvalue().encode()


class RowWriter:
    """Appends encoded rows to a file (or stdout) and reports byte offsets."""

    def __init__(self, path: str | None, columns, fmt: str, comment: str | None = None, offset: int | None = None):
        self.path = path
        self.columns = tuple(columns)
        self.fmt = fmt
        self.rows = 0
        try:
            if path is None:
                self._fh = sys.stdout.buffer
                self._owned = False
            elif offset is None:
                self._fh = open(path, "wb")
                self._owned = True
            else:
                self._fh = open(path, "r+b")
                self._owned = True
                size = self._fh.seek(0, os.SEEK_END)
                if size < offset:
                    raise CheckpointError(f"{path}: output has {size} bytes, checkpoint expects {offset}")
                self._fh.truncate(offset)
                self._fh.seek(offset)
        except OSError as exc:
            raise OSError(f"{path}: {exc.strerror or exc}") from exc
        if offset is None:
            self._write(_preamble(self.columns, fmt, comment))

    def _write(self, data: bytes) -> None:
        try:
            self._fh.write(data)
        except OSError as exc:
            raise OSError(f"{self.path or '<stdout>'}: {exc.strerror or exc}") from exc

    def write(self, rows) -> None:
        rows = list(rows)
        self._write(_encode_rows(rows, self.columns, self.fmt))
        self.rows += len(rows)

    def sync(self) -> int:
        """Flush to disk; return the byte offset of the end of the output."""
        self._fh.flush()
        if not self._owned:
            return 0
        os.fsync(self._fh.fileno())
        return self._fh.tell()

    def close(self) -> None:
        self._fh.flush()
        if self._owned:
            self._fh.close()


def write_rows(rows, columns: Sequence[str], fmt: str = "csv", path: str | None = None, comment: str | None = None) -> None:
    """Write a complete table; an empty row set gives just the CSV header."""
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    w = RowWriter(path, columns, fmt, comment)
    w.write(rows)
    w.close()


# ---------------------------------------------------------------------------
# checkpoints
# ---------------------------------------------------------------------------

@dataclass
class Checkpoint:
    fingerprint: str
    units_done: int
    rows_emitted: int
    output_bytes: int
    state: dict
    schema_version: int = SCHEMA_VERSION


def _digest(body: dict) -> str:
    return hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()


def checkpoint_save(path: str, ckpt: Checkpoint) -> None:
    """Atomic write: a crash leaves either the old or the new checkpoint."""
    body = dataclasses.asdict(ckpt)
    doc = {"body": body, "sha256": _digest(body)}
    tmp = f"{path}.tmp"
    try:
        with open(tmp, "w") as fh:
            json.dump(doc, fh, sort_keys=True)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc


def checkpoint_resume(path: str, fingerprint: str) -> Checkpoint | None:
    """Load a checkpoint for this run; None if there is no file."""
    if not os.path.exists(path):
        return None
    try:
        with open(path) as fh:
            doc = json.load(fh)
        body = doc["body"]
        if doc["sha256"] != _digest(body):
            raise CheckpointError(f"{path}: checksum mismatch, file is corrupt")
        ckpt = Checkpoint(**body)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise CheckpointError(f"{path}: unreadable checkpoint ({exc})") from exc
    if ckpt.schema_version != SCHEMA_VERSION:
        raise CheckpointError(f"{path}: schema version {ckpt.schema_version}, expected {SCHEMA_VERSION}")
    if ckpt.fingerprint != fingerprint:
        raise CheckpointError(f"{path}: checkpoint belongs to a different run configuration; refusing to resume")
    return ckpt


class _UnitSink:
    """Writes each completed unit's rows, then records a checkpoint."""

    def __init__(self, cfg: RunConfig, columns, comment: str | None):
        self.cfg = cfg
        self.ckpt = None
        self.fp = cfg.fingerprint()
        if cfg.resume:
            self.ckpt = checkpoint_resume(cfg.checkpoint, self.fp)
            if self.ckpt is None:
                log.info("no checkpoint at %s; starting a fresh run", cfg.checkpoint)
            else:
                log.info("resuming after %d units, %d rows", self.ckpt.units_done, self.ckpt.rows_emitted)
        elif cfg.checkpoint and os.path.exists(cfg.checkpoint):
            log.info("overwriting checkpoint %s (no --resume)", cfg.checkpoint)
        offset = self.ckpt.output_bytes if self.ckpt else None
        self.writer = RowWriter(cfg.out, columns, cfg.format, comment, offset)
        self.units = self.ckpt.units_done if self.ckpt else 0
        self.rows = self.ckpt.rows_emitted if self.ckpt else 0
        self._abort_after = int(os.environ.get(ABORT_ENV, "0") or 0)
        self._this_run = 0

    @property
    def state(self) -> dict | None:
        return self.ckpt.state if self.ckpt else None

    def emit(self, rows, state: dict) -> None:
        rows = list(rows)
        self.writer.write(rows)
        offset = self.writer.sync()
        self.units += 1
        self.rows += len(rows)
        if self.cfg.checkpoint:
            checkpoint_save(self.cfg.checkpoint, Checkpoint(self.fp, self.units, self.rows, offset, state))
        self._this_run += 1
        if self._abort_after and self._this_run >= self._abort_after:
            self.writer.close()
            os._exit(75)

    def close(self) -> None:
        self.writer.close()
        if self.cfg.checkpoint and os.path.exists(self.cfg.checkpoint):
            os.remove(self.cfg.checkpoint)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _echo(cfg: RunConfig) -> str:
    return "psi-extrema " + " ".join(cfg.to_argv(plumbing=False))


def report_row(r: extrema.InequalityReport) -> dict:
    row = {
        "k": r.k,
        "p_k": r.p_k,
        "log_N": r.log_N,
        "lhs": r.lhs,
        "rhs": r.rhs,
        "margin": r.margin,
        "verdict": r.verdict,
        "precision_bits": r.precision_bits,
    }
    if r.inequality is extrema.Inequality.ROBIN:
        row["robin_slack"] = r.aux
    return row


def residual_row(rec: products.ResidualRecord) -> dict:
    return {
        "x": rec.x,
        "quantity": rec.quantity,
        "computed": rec.computed,
        "asymptote": rec.asymptote,
        "residual": rec.residual,
        "scaled_residual": rec.scaled_residual,
    }


def _cmd_constants(cfg: RunConfig) -> int:
    cutoff = cfg.prime_cutoff or constants.DEFAULT_PRIME_CUTOFF
    rows = [
        {"name": c.name, "value": str(c), "precision_bits": c.precision_bits, "method": c.method}
        for c in constants.named_constants(cfg.precision_bits, cutoff)
    ]
    write_rows(rows, CONSTANT_COLUMNS, cfg.format, cfg.out, _echo(cfg))
    return EXIT_OK


def _cmd_residuals(cfg: RunConfig) -> int:
    grid = parse_grid(cfg.grid) if cfg.grid else [cfg.pmax]
    quantity = products.Quantity.parse(cfg.quantity)
    bits = cfg.precision_bits
    sink = _UnitSink(cfg, RESIDUAL_COLUMNS, _echo(cfg))
    if bits > products.WORKING_BITS:
        recs = products.residual_scan(grid, quantity, bits, workers=cfg.workers)
        sink.emit([residual_row(r) for r in recs], {})
        sink.close()
        return EXIT_OK
    kind = products._KIND[quantity]
    compensated = bits == products.WORKING_BITS
    st = sink.state
    start = st["next_unit"] if st else 0
    running = PrecisionSum.from_state(st["running"]) if st else None
    stream = products.iter_prefix_sums(
        grid, kind, workers=cfg.workers, compensated=compensated, start_unit=start, running=running
    )
    for unit, values, acc in stream:
        rows = [
            residual_row(products._record(grid[i], quantity, products._finish(kind, v, compensated), bits))
            for i, v in values
        ]
        sink.emit(rows, {"next_unit": unit + 1, "running": acc.to_state()})
    sink.close()
    return EXIT_OK


def _summary_doc(summary: extrema.ScanSummary) -> dict:
    return {
        "inequality": summary.inequality.value,
        "bound": summary.bound,
        "checked": summary.checked,
        "failures": summary.failures,
        "failure_count": len(summary.failures),
        "first_hold_k": summary.first_hold_k,
        "degenerate": summary.degenerate,
        "resolved_high_precision": summary.resolved_high_precision,
        "envelope": summary.envelope,
    }


def _cmd_scan(cfg: RunConfig) -> int:
    robin = cfg.inequality == "robin"
    columns = ROBIN_COLUMNS if robin else REPORT_COLUMNS
    sink = _UnitSink(cfg, columns, _echo(cfg))
    state = extrema.ScanState.from_json(sink.state) if sink.state else None
    if robin:
        domain = "ca" if cfg.count is not None else "integers"
        bound = cfg.count if cfg.count is not None else cfg.nmax
    else:
        domain, bound = "primorials", cfg.pmax

    def on_unit(reports, st):
        sink.emit((report_row(r) for r in reports), st.to_json())

    summary = extrema.scan(
        cfg.inequality, bound, domain=domain, workers=cfg.workers, state=state, on_unit=on_unit
    )
    sink.close()
    doc = _summary_doc(summary)
    text = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    if cfg.out:
        with open(cfg.out + ".summary.json", "w") as fh:
            fh.write(text)
    else:
        sys.stderr.write(text)
    log.info(
        "%s: %d checked, %d failures, first_hold_k=%s, %d degenerate, %d redone at 256 bits",
        doc["inequality"], doc["checked"], doc["failure_count"], doc["first_hold_k"],
        doc["degenerate"], doc["resolved_high_precision"],
    )
    return EXIT_COUNTEREXAMPLE if summary.failures else EXIT_OK


def _cmd_check(cfg: RunConfig) -> int:
    ineq = extrema.Inequality.parse(cfg.inequality)
    if ineq is extrema.Inequality.ROBIN:
        report = extrema.check_robin(cfg.n)
        columns = ROBIN_COLUMNS
    else:
        columns = REPORT_COLUMNS
        if cfg.precision_bits > products.WORKING_BITS:
            rec = extrema.reference_primorials([cfg.primorial_k], cfg.precision_bits)[0]
            report = extrema._check_mp(rec, ineq, cfg.precision_bits)
        else:
            rec = extrema.primorial_record(cfg.primorial_k)
            report = extrema._check_record(rec, ineq)
    write_rows([report_row(report)], columns, cfg.format, cfg.out, _echo(cfg))
    return EXIT_COUNTEREXAMPLE if report.verdict is not extrema.Verdict.HOLDS else EXIT_OK


def _cmd_ramanujan(cfg: RunConfig) -> int:
    exact = arithfun.sigma_ratio(cfg.n)
    bits = cfg.precision_bits
    with mpmath.workprec(bits + 32):
        target = mpmath.mpf(exact.numerator) / exact.denominator

    table = arithfun.ramanujan_partial_table(cfg.n, cfg.Q, bits)

    def rows():
        for q, c, s in table:
            with mpmath.workprec(bits):
                err = s - target
            yield {"q": q, "c_q": c, "partial_sum": s, "sigma_ratio": exact, "error": err}

    write_rows(rows(), RAMANUJAN_COLUMNS, cfg.format, cfg.out, _echo(cfg))
    return EXIT_OK


def _cmd_ca(cfg: RunConfig) -> int:
    chain = extrema.ca_stream(cfg.count)

    def rows():
        for i, f in enumerate(chain, start=1):
            yield {"index": i, "N": f.value, "factorization": str(f), "sigma_ratio": arithfun.sigma_ratio(f)}

    write_rows(rows(), CA_COLUMNS, cfg.format, cfg.out, _echo(cfg))
    return EXIT_OK


_DISPATCH: dict[str, Callable[[RunConfig], int]] = {
    "constants": _cmd_constants,
    "residuals": _cmd_residuals,
    "scan": _cmd_scan,
    "check": _cmd_check,
    "ramanujan": _cmd_ramanujan,
    "ca": _cmd_ca,
}


def run(cfg: RunConfig) -> int:
    """Execute one command; returns the exit status."""
    try:
        return _DISPATCH[cfg.command](cfg)
    except (ResourceLimitError, CheckpointError, PrecisionInfeasibleError, OSError, ValueError) as exc:
        log.error("error: %s", exc)
        return EXIT_ERROR


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    cfg = parse(sys.argv[1:] if argv is None else argv)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
