"""Design-space exploration: stimuli, reference oracle, PSNR, sweeps, Pareto.

A sweep evaluates one function over a grid of hardware profiles
``(B, FW, N)`` at fixed ``M``.  Stimuli are generated once in double
precision, saturated into each profile's format, pushed through the
bit-accurate datapath with domain checks off, and scored by PSNR against
a high-precision reference evaluated at the unquantised points.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .cordic import EngineParams, theta_max
from .elemfns import DomainError, engine_for, exp_raw, ln_raw, pow_raw
from .fxnum import FxFormat, RoundingMode, quantize_raw
from .perf import FUNCTIONS, CostWeights, TimingModel, cycles, resource_proxy

log = logging.getLogger(__name__)

__all__ = [
    "CSV_HEADER",
    "DEFAULT_B",
    "DEFAULT_N",
    "TABLE_FORMATS",
    "CsvFormatError",
    "EvalRecord",
    "ParetoPoint",
    "StimulusSet",
    "StimulusSpec",
    "default_formats",
    "dominates",
    "evaluate_profile",
    "gen_stimuli",
    "mark_front",
    "maxval_for",
    "pareto_front",
    "psnr",
    "read_records",
    "reference",
    "reference_values",
    "select",
    "sweep",
    "write_records",
]

# FW paired with each B in the sweep grid
TABLE_FORMATS = {
    24: 8, 28: 8, 32: 12, 36: 16, 40: 20, 44: 24, 48: 28,
    52: 32, 56: 32, 60: 32, 64: 32, 68: 32, 72: 32, 76: 32,
}
DEFAULT_B = (24, 28, 32, 36, 40, 48, 52, 56, 60, 64, 68, 72, 76)
DEFAULT_N = (8, 12, 16, 20, 24, 28, 32, 36, 40)

CSV_HEADER = (
    "function", "B", "FW", "M", "N", "psnr_db", "cycles", "latency_ns", "cost",
    "register_bits", "adder_bits", "lut_bits", "multiplier_bits", "maxval", "samples",
)
_REAL_FIELDS = {"psnr_db", "latency_ns", "cost", "maxval"}

_REF_PREC = 113  # quad-precision significand
_POW_Y_MARGIN = 1e-6
_ONE_TOL = 1e-9


def default_formats(include_44: bool = False) -> list[FxFormat]:
    bs = sorted(set(DEFAULT_B) | ({44} if include_44 else set()))
    return [FxFormat(b, TABLE_FORMATS[b]) for b in bs]


# -- stimuli -----------------------------------------------------------------

SPEC_NAMES = ("exp-default", "ln-default", "pow-default", "pow-box", "custom")


@dataclass(frozen=True)
class StimulusSpec:
    """How to lay out test points.

    ``count`` is used by the one-argument grids; ``x_count`` x ``y_count``
    by the pow grids.  ``resolution`` is the lower end of the ln grid.
    """

    name: str
    count: int = 1000
    x_count: int = 150
    y_count: int = 10
    resolution: float = 2.0 ** -32
    points: tuple = ()

    def __post_init__(self):
        if self.name not in SPEC_NAMES:
            raise ValueError(f"unknown stimulus spec {self.name!r}; expected one of {SPEC_NAMES}")
        if self.name == "custom" and not self.points:
            raise ValueError("custom stimulus spec needs points")
        if min(self.count, self.x_count, self.y_count) < 1:
            raise ValueError("stimulus counts must be >= 1")
        if not self.resolution > 0:
            raise ValueError("resolution must be > 0")


DEFAULT_SPECS = {"exp": "exp-default", "ln": "ln-default", "pow": "pow-default"}
_SPEC_FN = {"exp-default": "exp", "ln-default": "ln", "pow-default": "pow", "pow-box": "pow"}


@dataclass(frozen=True)
class StimulusSet:
    function: str
    points: tuple  # of 1-tuples (exp, ln) or (x, y) pairs (pow)
    descriptor: str

    def __len__(self) -> int:
        return len(self.points)


def _inward(v: mpmath.mpf) -> float:
    """The double nearest ``v`` that is not farther from zero."""
    f = float(v)
    if abs(mpmath.mpf(f)) > abs(v):
        f = math.nextafter(f, 0.0)
    return f


def _outward_low(v: mpmath.mpf) -> float:
    """The double nearest a positive lower bound ``v`` that is not below it."""
    f = float(v)
    if mpmath.mpf(f) < v:
        f = math.nextafter(f, math.inf)
    return f


def _linspace(lo: float, hi: float, n: int) -> list[float]:
    pts = np.linspace(lo, hi, n).tolist()
    if n > 1:
        pts[0], pts[-1] = lo, hi
    return pts


def _nudge_ones(xs: list[float]) -> list[float]:
    step = (xs[-1] - xs[0]) / (len(xs) - 1) if len(xs) > 1 else 1e-6
    return [x + step if abs(x - 1.0) < _ONE_TOL else x for x in xs]


def _pow_grid(xs: list[float], y_count: int, bound_for) -> list[tuple[float, float]]:
    pts = []
    for x in _nudge_ones(xs):
        ymax = bound_for(x)
        pts.extend((x, y) for y in _linspace(-ymax, ymax, y_count))
    return pts


def gen_stimuli(fn: str, M: int, N: int, spec: StimulusSpec | str | None = None) -> StimulusSet:
    """Deterministic stimulus grid for ``fn`` with inclusive endpoints."""
    if fn not in FUNCTIONS:
        raise ValueError(f"unknown function {fn!r}")
    if spec is None:
        spec = DEFAULT_SPECS[fn]
    if isinstance(spec, str):
        spec = StimulusSpec(spec)
    if spec.name != "custom" and _SPEC_FN[spec.name] != fn:
        raise ValueError(f"stimulus spec {spec.name} does not apply to {fn}")
    with mpmath.workprec(200):
        t = theta_max(M, N)
        if spec.name == "custom":
            pts = tuple(tuple(float(c) for c in (p if isinstance(p, (tuple, list)) else (p,)))
                        for p in spec.points)
            width = 2 if fn == "pow" else 1
            if any(len(p) != width for p in pts):
                raise ValueError(f"custom {fn} points must have {width} coordinate(s)")
            return StimulusSet(fn, pts, f"custom[{len(pts)}]")
        if spec.name == "exp-default":
            b = _inward(t)
            pts = [(v,) for v in _linspace(-b, b, spec.count)]
            desc = f"exp-default {spec.count} points over [-theta_max, theta_max], M={M} N={N}"
        elif spec.name == "ln-default":
            top = _inward(mpmath.exp(2 * t))
            pts = [(v,) for v in _linspace(spec.resolution, top, spec.count)]
            desc = (f"ln-default {spec.count} points over [{spec.resolution:.9g}, "
                    f"e^(2 theta_max)], M={M} N={N}")
        else:
            half = spec.name == "pow-box"
            e = t / 2 if half else t
            xs = _linspace(_outward_low(mpmath.exp(-e)), _inward(mpmath.exp(e)), spec.x_count)
            if half:
                pts = _pow_grid(xs, spec.y_count, lambda x: 2.0)
                desc = f"pow-box {spec.x_count}x{spec.y_count}, x in [e^-theta/2, e^theta/2], |y| <= 2"
            else:
                tf = float(t)
                pts = _pow_grid(
                    xs, spec.y_count,
                    lambda x: tf / abs(math.log(x)) * (1.0 - _POW_Y_MARGIN),
                )
                desc = (f"pow-default {spec.x_count}x{spec.y_count}, x in [e^-theta, e^theta], "
                        f"|y ln x| <= theta_max, M={M} N={N}")
    return StimulusSet(fn, tuple(pts), desc)


# -- reference and accuracy ----------------------------------------------------

def _reference_mp(fn: str, point) -> mpmath.mpf:
    with mpmath.workprec(_REF_PREC):
        if fn == "exp":
            (a,) = point
            return mpmath.exp(mpmath.mpf(a))
        if fn == "ln":
            (a,) = point
            if a <= 0:
                raise DomainError(f"ln undefined at {a}")
            return mpmath.log(mpmath.mpf(a))
        if fn == "pow":
            x, y = point
            if x <= 0:
                raise DomainError(f"pow base {x} must be > 0")
            return mpmath.power(mpmath.mpf(x), mpmath.mpf(y))
    raise ValueError(f"unknown function {fn!r}")


def reference(fn: str, point) -> float:
    """e^x, ln x or x^y at quad precision, rounded to double."""
    if not isinstance(point, (tuple, list)):
        point = (point,)
    return float(_reference_mp(fn, tuple(point)))


@lru_cache(maxsize=32)
def reference_values(stimuli: StimulusSet) -> tuple[float, ...]:
    return tuple(reference(stimuli.function, p) for p in stimuli.points)


def psnr(outputs: Sequence[float], refs: Sequence[float], maxval: float) -> float:
    """``10 log10(maxval**2 / MSE)``; ``inf`` when the outputs are exact."""
    out = np.asarray(outputs, dtype=np.float64)
    ref = np.asarray(refs, dtype=np.float64)
    if out.shape != ref.shape:
        raise ValueError(f"length mismatch: {out.size} outputs vs {ref.size} references")
    if out.size == 0:
        raise ValueError("psnr needs at least one sample")
    if not maxval > 0:
        raise ValueError("maxval must be > 0")
    mse = float(np.mean((out - ref) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(maxval * maxval / mse)


def maxval_for(fn: str, stimuli, frac_bits: int, refs=None) -> float:
    """Largest value of the narrowest format holding every reference output."""
    if refs is None:
        refs = reference_values(stimuli) if isinstance(stimuli, StimulusSet) else [
            reference(fn, p) for p in stimuli]
    if len(refs) == 0:
        raise ValueError("maxval_for needs at least one stimulus")
    peak = max(abs(r) for r in refs)
    iw = 1
    while 2.0 ** (iw - 1) <= peak:
        iw += 1
    return 2.0 ** (iw - 1) - 2.0 ** -frac_bits


# -- sweep --------------------------------------------------------------------

@dataclass(frozen=True)
class EvalRecord:
    function: str
    B: int
    FW: int
    M: int
    N: int
    psnr_db: float
    cycles: int
    latency_ns: float
    cost: float
    register_bits: int
    adder_bits: int
    lut_bits: int
    multiplier_bits: int
    maxval: float
    samples: int

    @property
    def format(self) -> FxFormat:
        return FxFormat(self.B, self.FW)

    def label(self) -> str:
        return f"{self.function} [{self.B} {self.FW}] M={self.M} N={self.N}"


def _quantized(stimuli: StimulusSet, fmt: FxFormat):
    cols = list(zip(*stimuli.points))
    return [[quantize_raw(v, fmt, RoundingMode.TRUNCATE) for v in col] for col in cols]


def evaluate_profile(fn: str, params: EngineParams, stimuli: StimulusSet,
                     timing: TimingModel | None = None,
                     weights: CostWeights | None = None) -> EvalRecord:
    timing = timing or TimingModel()
    fmt = params.format
    engine = engine_for(params)
    cols = _quantized(stimuli, fmt)
    if fn == "exp":
        raws = exp_raw(engine, cols[0])
    elif fn == "ln":
        raws = ln_raw(engine, cols[0])
    else:
        raws = pow_raw(engine, cols[0], cols[1])
    scale = 1 << fmt.frac_bits
    outputs = [r / scale for r in raws]
    refs = reference_values(stimuli)
    maxval = maxval_for(fn, stimuli, fmt.frac_bits, refs)
    res = resource_proxy(params, fn, weights)
    return EvalRecord(
        function=fn, B=fmt.total_bits, FW=fmt.frac_bits, M=params.M, N=params.N,
        psnr_db=psnr(outputs, refs, maxval),
        cycles=cycles(fn, params.M, params.N),
        latency_ns=timing.latency_ns(fn, params.M, params.N),
        cost=res.cost, register_bits=res.register_bits, adder_bits=res.adder_bits,
        lut_bits=res.lut_table_bits, multiplier_bits=res.multiplier_bits,
        maxval=maxval, samples=len(stimuli),
    )


def sweep(fn: str, formats: Iterable[FxFormat | tuple[int, int]] | None = None,
          n_values: Iterable[int] | None = None, M: int = 5,
          spec: StimulusSpec | str | None = None, clock_hz: float = 125e6,
          weights: CostWeights | None = None, workers: int = 1,
          failures: list | None = None) -> list[EvalRecord]:
    """Evaluate every ``(format, N)`` profile; output ordered by (B, FW, N).

    Stimuli are generated at ``N = max(n_values)``, so every profile sees
    the same inputs.  A profile that cannot be built is logged, appended
    to ``failures`` as ``(B, FW, N, message)`` and skipped.
    """
    fmts = sorted(FxFormat(*f) if isinstance(f, tuple) else f
                  for f in (formats if formats is not None else default_formats()))
    ns = sorted(set(n_values if n_values is not None else DEFAULT_N))
    if not fmts or not ns:
        raise ValueError("sweep grid is empty")
    stimuli = gen_stimuli(fn, M, max(ns), spec)
    timing = TimingModel(clock_hz)
    reference_values(stimuli)  # warm the shared cache before fanning out
    jobs = [(f, n) for f in fmts for n in ns]

    def run(job):
        f, n = job
        try:
            return evaluate_profile(fn, EngineParams(f, M, n), stimuli, timing, weights)
        except (ValueError, ArithmeticError) as exc:
            return (f.total_bits, f.frac_bits, n, str(exc))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]
    records = []
    for r in results:
        if isinstance(r, EvalRecord):
            records.append(r)
        else:
            log.warning("profile [%d %d] N=%d failed: %s", *r)
            if failures is not None:
                failures.append(r)
    return records


# -- Pareto and selection --------------------------------------------------------

@dataclass(frozen=True)
class ParetoPoint:
    record: EvalRecord
    dominated: bool = False


def dominates(a: EvalRecord, b: EvalRecord) -> bool:
    """``a`` is no costlier and no less accurate than ``b``, and better in one."""
    return (a.cost <= b.cost and a.psnr_db >= b.psnr_db
            and (a.cost < b.cost or a.psnr_db > b.psnr_db))


def mark_front(records: Sequence[EvalRecord]) -> list[ParetoPoint]:
    """Every record with its dominance flag, in input order."""
    order = sorted(range(len(records)), key=lambda k: (records[k].cost, -records[k].psnr_db))
    dominated = [True] * len(records)
    best_cheaper = -math.inf
    pos = 0
    while pos < len(order):
        cost = records[order[pos]].cost
        group = []
        while pos < len(order) and records[order[pos]].cost == cost:
            group.append(order[pos])
            pos += 1
        top = records[group[0]].psnr_db
        if top > best_cheaper:
            for k in group:
                if records[k].psnr_db == top:
                    dominated[k] = False
            best_cheaper = top
    return [ParetoPoint(r, d) for r, d in zip(records, dominated)]


def pareto_front(records: Sequence[EvalRecord]) -> list[ParetoPoint]:
    """Non-dominated records (min cost, max PSNR), cheapest first."""
    if not records:
        raise ValueError("pareto_front needs at least one record")
    front = [p for p in mark_front(records) if not p.dominated]
    front.sort(key=lambda p: (p.record.cost, -p.record.psnr_db, p.record.B, p.record.N))
    return front


OBJECTIVES = ("max_psnr", "min_cost")


def select(records: Iterable[EvalRecord], min_psnr: float | None = None,
           max_cost: float | None = None, objective: str = "max_psnr") -> EvalRecord | None:
    """Best feasible record, or ``None``.

    Ties on the objective go to the better value of the other axis, then
    to the smaller B, then the smaller N.
    """
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}; expected one of {OBJECTIVES}")
    feasible = [r for r in records
                if (min_psnr is None or r.psnr_db >= min_psnr)
                and (max_cost is None or r.cost <= max_cost)]
    if not feasible:
        return None
    if objective == "max_psnr":
        key = lambda r: (-r.psnr_db, r.cost, r.B, r.N)  # noqa: E731
    else:
        key = lambda r: (r.cost, -r.psnr_db, r.B, r.N)  # noqa: E731
    return min(feasible, key=key)


# -- CSV -------------------------------------------------------------------------

class CsvFormatError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _fmt_real(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".9g")


def _row(rec: EvalRecord) -> list[str]:
    return [_fmt_real(getattr(rec, k)) if k in _REAL_FIELDS else str(getattr(rec, k))
            for k in CSV_HEADER]


def write_records(stream, records: Sequence[EvalRecord], weights: CostWeights | None = None,
                  on_front: Sequence[bool] | None = None) -> None:
    """Write sweep (or, with ``on_front``, Pareto) CSV to a text stream."""
    weights = weights or CostWeights()
    stream.write(f"# cost is a proxy model, not a synthesis result; weights: {weights.describe()}\n")
    w = csv.writer(stream, lineterminator="\n")
    header = list(CSV_HEADER) + (["on_front"] if on_front is not None else [])
    w.writerow(header)
    for k, rec in enumerate(records):
        row = _row(rec)
        if on_front is not None:
            row.append("1" if on_front[k] else "0")
        w.writerow(row)


def records_to_csv(records, weights=None, on_front=None) -> str:
    buf = io.StringIO()
    write_records(buf, records, weights, on_front)
    return buf.getvalue()


def _parse_field(name: str, text: str, line: int):
    try:
        if name == "function":
            if text not in FUNCTIONS:
                raise ValueError(f"unknown function {text!r}")
            return text
        if name in _REAL_FIELDS:
            return float(text)
        return int(text)
    except ValueError as exc:
        raise CsvFormatError(line, f"bad {name} value {text!r}: {exc}") from None


def read_records(stream) -> tuple[list[EvalRecord], list[bool] | None]:
    """Parse CSV written by :func:`write_records`; returns records and on_front flags."""
    header = None
    records: list[EvalRecord] = []
    flags: list[bool] = []
    for lineno, line in enumerate(stream, start=1):
        if not line.strip() or line.startswith("#"):
            continue
        cells = next(csv.reader([line]))
        if header is None:
            base = list(CSV_HEADER)
            if cells not in (base, base + ["on_front"]):
                raise CsvFormatError(lineno, f"unexpected header {','.join(cells)}")
            header = cells
            continue
        if len(cells) != len(header):
            raise CsvFormatError(lineno, f"expected {len(header)} fields, got {len(cells)}")
        values = {name: _parse_field(name, text, lineno)
                  for name, text in zip(CSV_HEADER, cells)}
        try:
            records.append(EvalRecord(**values))
        except (TypeError, ValueError) as exc:
            raise CsvFormatError(lineno, str(exc)) from None
        if len(header) > len(CSV_HEADER):
            flag = cells[-1]
            if flag not in ("0", "1"):
                raise CsvFormatError(lineno, f"bad on_front value {flag!r}")
            flags.append(flag == "1")
    if header is None:
        raise CsvFormatError(0, "no header found")
    return records, (flags if header and len(header) > len(CSV_HEADER) else None)
