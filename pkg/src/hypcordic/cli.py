"""Command-line front end.

Numeric inputs are decimal reals quantized (truncating, saturating) into
the selected ``[B FW]`` format; ``--raw`` takes two's-complement payload
integers instead.  Every command exits 0 on success and 1 on a domain,
input or file error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from contextlib import contextmanager

import mpmath

from . import __version__
from .config import ENV_VAR, Config, ConfigError, load_config
from .cordic import EngineParams, Mode, theta_max
from .dse import (
    CsvFormatError,
    mark_front,
    read_records,
    reference,
    select,
    sweep,
    write_records,
)
from .elemfns import DomainError, domain_bounds, engine_for, exp_fx, ln_fx, pow_fx
from .fxnum import (
    FxError, FxFormat, FxValue, RoundingMode, add, mul, quantize, quantize_raw, shift_left, sub,
    to_real,
)
from .perf import FUNCTIONS

log = logging.getLogger("hypcordic")


class CliError(Exception):
    pass


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


@contextmanager
def _input(path):
    if path in (None, "-"):
        yield sys.stdin
    else:
        with open(path, encoding="utf-8", newline="") as fh:
            yield fh


def _g(v: float) -> str:
    return format(v, ".9g")


def _profile(args, cfg: Config) -> EngineParams:
    b = args.b if args.b is not None else cfg.B
    fw = args.fw if args.fw is not None else cfg.FW
    m = args.m if args.m is not None else cfg.M
    n = args.n if args.n is not None else cfg.N
    try:
        return EngineParams(FxFormat(b, fw), m, n)
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _operand(text, fmt: FxFormat, raw: bool, name: str) -> FxValue:
    if text is None:
        raise CliError(f"--{name} is required")
    try:
        if raw:
            return FxValue(int(text, 0), fmt)
        return quantize(float(text), fmt, RoundingMode.TRUNCATE)
    except ValueError as exc:
        raise CliError(f"bad --{name} value {text!r}: {exc}") from None


def _operands(args, params):
    fmt = params.format
    x = _operand(args.x, fmt, args.raw, "x")
    y = _operand(args.y, fmt, args.raw, "y") if args.fn == "pow" else None
    if args.fn != "pow" and args.y is not None:
        raise CliError(f"--y is only used by pow, not {args.fn}")
    return x, y


def _evaluate(fn, x, y, params, checked):
    if fn == "exp":
        return exp_fx(x, params, checked)
    if fn == "ln":
        return ln_fx(x, params, checked)
    return pow_fx(x, y, params, checked)


def cmd_eval(args, cfg: Config) -> int:
    params = _profile(args, cfg)
    x, y = _operands(args, params)
    result, cyc = _evaluate(args.fn, x, y, params, not args.unchecked)
    point = (to_real(x),) if y is None else (to_real(x), to_real(y))
    try:
        ref = reference(args.fn, point)
    except DomainError:
        ref = float("nan")
    value = to_real(result)
    ns = cyc * 1e9 / cfg.clock_hz
    print(f"function:   {args.fn}  profile {params}")
    print(f"input:      x = {_g(point[0])} (raw {x.raw})"
          + ("" if y is None else f", y = {_g(point[1])} (raw {y.raw})"))
    print(f"result:     {_g(value)}")
    print(f"raw:        {result.raw} (0x{result.raw & ((1 << params.format.total_bits) - 1):x})")
    print(f"reference:  {_g(ref)}")
    print(f"abs error:  {_g(abs(value - ref))}")
    print(f"cycles:     {cyc}")
    print(f"latency:    {_g(ns)} ns @ {_g(cfg.clock_hz / 1e6)} MHz")
    if args.verbose:
        eng = engine_for(params)
        print(f"1/A_n:      {mpmath.nstr(eng.inv_scale, 12)} (raw {eng.inv_scale_raw})")
        print(f"theta_max:  {mpmath.nstr(theta_max(params.M, params.N), 8)}")
        for w in eng.warnings:
            print(f"warning:    {w}")
    return 0


_TRACE_HEADER = ("step", "i", "repeated", "x", "y", "z")


def _trace_passes(fn, x, y, params, checked):
    eng = engine_for(params)
    fmt = params.format
    _evaluate(fn, x, y, params, checked)  # domain check and error message
    inv = FxValue(eng.inv_scale_raw, fmt)
    if fn == "exp":
        return [eng.trace(Mode.ROTATION, inv, inv, x)]
    one = FxValue(quantize_raw(1, fmt, RoundingMode.NEAREST_AWAY), fmt)
    zero = FxValue(0, fmt)
    vec = eng.trace(Mode.VECTORING, add(x, one), sub(x, one), zero)
    if fn == "ln":
        return [vec]
    ln_x = shift_left(vec[-1].z, 1)
    arg = mul(ln_x, y)
    return [vec, eng.trace(Mode.ROTATION, inv, inv, arg)]


def cmd_trace(args, cfg: Config) -> int:
    params = _profile(args, cfg)
    x, y = _operands(args, params)
    passes = _trace_passes(args.fn, x, y, params, not args.unchecked)
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(_TRACE_HEADER)
        step = 0
        for states in passes:
            for s in states:
                w.writerow([step, "" if s.i is None else s.i, int(s.repeated),
                            _g(to_real(s.x)), _g(to_real(s.y)), _g(to_real(s.z))])
                step += 1
    return 0


def _m_range(text: str) -> range:
    try:
        lo, _, hi = text.partition("..")
        lo, hi = int(lo), int(hi or lo)
    except ValueError:
        raise CliError(f"bad --m-range {text!r}; expected a..b") from None
    if lo < 0 or hi < lo:
        raise CliError(f"bad --m-range {text!r}")
    return range(lo, hi + 1)


def cmd_bounds(args, cfg: Config) -> int:
    n = args.n if args.n is not None else cfg.N
    rows = ([None] if not args.no_original else []) + list(_m_range(args.m_range))
    print(f"{'M':>9}  {'theta_max':>10}  {'e^x domain':>24}  {'ln x domain':>18}")
    for m in rows:
        b = domain_bounds(m, n)
        t = mpmath.nstr(b.exp_bound, 7)
        label = "original" if m is None else str(m)
        ln_up = mpmath.nstr(b.ln_upper, 6, min_fixed=-1, max_fixed=3)
        print(f"{label:>9}  {t:>10}  {'[-' + t + ', ' + t + ']':>24}  {'(0, ' + ln_up + ']':>18}")
    return 0


def cmd_angles(args, cfg: Config) -> int:
    params = _profile(args, cfg)
    eng = engine_for(params)
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("i", "theta_real", "theta_raw"))
        for i, theta, raw in eng.angle_rows():
            w.writerow((i, _g(theta), raw))
    return 0


def cmd_sweep(args, cfg: Config) -> int:
    fmts = cfg.formats()
    if args.include_44:
        fmts = sorted(set(fmts) | {FxFormat(44, 24)})
    spec = args.spec or cfg.spec_for(args.fn)
    failures = []
    records = sweep(args.fn, fmts, cfg.n_list, cfg.M, spec, cfg.clock_hz, cfg.weights,
                    args.workers or cfg.workers, failures)
    for b, fw, n, msg in failures:
        print(f"warning: profile [{b} {fw}] N={n} skipped: {msg}", file=sys.stderr)
    with _output(args.out) as fh:
        write_records(fh, records, cfg.weights)
    return 0


def _read(path):
    try:
        with _input(path) as fh:
            return read_records(fh)
    except CsvFormatError as exc:
        raise CliError(f"{path}: {exc}") from None
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from None


def cmd_pareto(args, cfg: Config) -> int:
    records, _ = _read(args.input)
    if not records:
        raise CliError(f"{args.input}: no records")
    marked = mark_front(records)
    flags = [not p.dominated for p in marked]
    if args.front_only:
        keep = sorted((p.record for p in marked if not p.dominated),
                      key=lambda r: (r.cost, -r.psnr_db, r.B, r.N))
        records, flags = keep, [True] * len(keep)
    with _output(args.out) as fh:
        write_records(fh, records, cfg.weights, flags)
    return 0


def cmd_select(args, cfg: Config) -> int:
    records, _ = _read(args.input)
    best = select(records, args.min_psnr, args.max_cost, args.objective)
    if best is None:
        print("infeasible")
        return 0
    print(f"{best.label()}  psnr={_g(best.psnr_db)} dB  cost={_g(best.cost)}  "
          f"cycles={best.cycles}  latency={_g(best.latency_ns)} ns")
    return 0


def _add_profile_args(p):
    p.add_argument("--b", type=int, help="total bits B (default from config: 64)")
    p.add_argument("--fw", type=int, help="fraction bits FW (default from config: 32)")
    p.add_argument("--m", type=int, help="negative iterations minus one (default 5)")
    p.add_argument("--n", type=int, help="positive iterations (default 40)")


def _add_eval_args(p):
    p.add_argument("--fn", choices=FUNCTIONS, required=True)
    p.add_argument("--x", required=True, help="argument (base for pow)")
    p.add_argument("--y", help="exponent for pow")
    _add_profile_args(p)
    p.add_argument("--raw", action="store_true",
                   help="read --x/--y as raw two's-complement payload integers")
    p.add_argument("--unchecked", action="store_true",
                   help="skip convergence-domain checks (x <= 0 for pow is still rejected)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypcordic",
        description="Bit-accurate expanded hyperbolic CORDIC model for e^x, ln x, x^y "
                    "and a design-space-exploration harness.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help=f"key = value config file (or ${ENV_VAR})")
    parser.add_argument("-v", "--log-level", default="WARNING",
                        help="logging level (default WARNING)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate one function on one input")
    _add_eval_args(p)
    p.add_argument("--verbose", action="store_true", help="also print engine constants")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("trace", help="per-iteration x, y, z as CSV")
    _add_eval_args(p)
    p.add_argument("--out", help="output CSV (default stdout)")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("bounds", help="convergence bounds per M")
    p.add_argument("--m-range", default="0..10", help="inclusive M range a..b (default 0..10)")
    p.add_argument("--n", type=int, help="positive iterations (default 40)")
    p.add_argument("--no-original", action="store_true", help="omit the original-CORDIC row")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("angles", help="dump the quantized angle table as CSV")
    _add_profile_args(p)
    p.add_argument("--out", help="output CSV (default stdout)")
    p.set_defaults(func=cmd_angles)

    p = sub.add_parser("sweep", help="evaluate a function over the profile grid")
    p.add_argument("--fn", choices=FUNCTIONS, required=True)
    p.add_argument("--spec", choices=("exp-default", "ln-default", "pow-default", "pow-box"),
                   help="stimulus grid (default from config)")
    p.add_argument("--include-44", action="store_true", help="add the [44 24] format")
    p.add_argument("--workers", type=int, help="parallel profile evaluations")
    p.add_argument("--out", help="output CSV (default stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("pareto", help="mark the Pareto front of a sweep CSV")
    p.add_argument("--in", dest="input", required=True, help="sweep CSV ('-' for stdin)")
    p.add_argument("--out", help="output CSV (default stdout)")
    p.add_argument("--front-only", action="store_true", help="write only front members")
    p.set_defaults(func=cmd_pareto)

    p = sub.add_parser("select", help="pick one profile from a sweep CSV")
    p.add_argument("--in", dest="input", required=True, help="sweep CSV ('-' for stdin)")
    p.add_argument("--min-psnr", type=float, help="accuracy floor in dB")
    p.add_argument("--max-cost", type=float, help="proxy cost ceiling")
    p.add_argument("--objective", choices=("max_psnr", "min_cost"), default="max_psnr")
    p.set_defaults(func=cmd_select)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.getLevelName(args.log_level.upper())
    if not isinstance(level, int):
        parser.error(f"unknown log level {args.log_level!r}")
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except (CliError, ConfigError, DomainError, FxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
