"""e^x, ln x and x^y on the CORDIC engine, with convergence-domain checks.

``exp`` is one rotation pass from ``x = y = 1/A_n``; ``ln`` is one
vectoring pass from ``(a + 1, a - 1, 0)`` followed by a one-bit left
shift; ``pow`` chains vectoring, shift, a fixed-point multiply by ``y``
and a rotation pass through the same engine.

The ``*_raw`` functions work on batches of raw payloads and never check
domains; they are what the design-space sweeps use so that out-of-format
stimuli flow through the datapath exactly as in hardware.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import mpmath

from .cordic import CordicEngine, EngineParams, Mode, theta_max
from .fxnum import FxValue, RoundingMode, quantize_raw, wrap_raw

__all__ = [
    "DomainBounds",
    "DomainError",
    "domain_bounds",
    "engine_for",
    "exp_fx",
    "exp_raw",
    "in_pow_domain",
    "ln_fx",
    "ln_raw",
    "pow_cycles",
    "pow_fx",
    "pow_raw",
]

_PREC = 200


class DomainError(ValueError):
    """Argument outside the engine's convergence domain or the format range."""


@dataclass(frozen=True)
class DomainBounds:
    M: int | None
    N: int
    exp_bound: mpmath.mpf
    ln_upper: mpmath.mpf

    def pow_ok(self, x, y) -> bool:
        return in_pow_domain(x, y, self.M, self.N)


@lru_cache(maxsize=None)
def domain_bounds(M: int | None, N: int = 40) -> DomainBounds:
    t = theta_max(M, N)
    with mpmath.workprec(_PREC):
        return DomainBounds(M, N, t, mpmath.exp(2 * t))


def in_pow_domain(x, y, M: int | None, N: int = 40) -> bool:
    """True iff ``x > 0`` and ``|y ln x| <= theta_max(M, N)``."""
    with mpmath.workprec(_PREC):
        x = mpmath.mpf(x)
        if x <= 0:
            return False
        return abs(mpmath.mpf(y) * mpmath.log(x)) <= theta_max(M, N)


@lru_cache(maxsize=256)
def engine_for(params: EngineParams) -> CordicEngine:
    return CordicEngine(params)


def _engine(p) -> CordicEngine:
    return p if isinstance(p, CordicEngine) else engine_for(p)


def _mp(v: FxValue) -> mpmath.mpf:
    with mpmath.workprec(_PREC):
        return mpmath.ldexp(mpmath.mpf(v.raw), -v.format.frac_bits)


def _fmt_bound(v) -> str:
    return mpmath.nstr(v, 7, min_fixed=-4, max_fixed=7)


def _check_format(engine: CordicEngine, *values: FxValue) -> None:
    for v in values:
        if v.format != engine.format:
            raise ValueError(f"operand format {v.format} does not match engine {engine.format}")


def pow_cycles(engine: CordicEngine) -> int:
    # two engine passes plus the final output register
    return 2 * engine.cycles + 1


def exp_raw(engine: CordicEngine, alphas) -> list[int]:
    alphas = list(alphas)
    inv = [engine.inv_scale_raw] * len(alphas)
    x, _, _ = engine.run_raw(Mode.ROTATION, inv, inv, alphas)
    return x


def ln_raw(engine: CordicEngine, alphas) -> list[int]:
    fmt = engine.format
    bits = fmt.total_bits
    one = quantize_raw(1, fmt, RoundingMode.NEAREST_AWAY)
    alphas = list(alphas)
    xs = [wrap_raw(a + one, bits) for a in alphas]
    ys = [wrap_raw(a - one, bits) for a in alphas]
    _, _, z = engine.run_raw(Mode.VECTORING, xs, ys, [0] * len(alphas))
    return [wrap_raw(v << 1, bits) for v in z]


def pow_raw(engine: CordicEngine, xs, ys) -> list[int]:
    fmt = engine.format
    bits, fw = fmt.total_bits, fmt.frac_bits
    logs = ln_raw(engine, xs)
    prods = [wrap_raw((lg * y) >> fw, bits) for lg, y in zip(logs, ys)]
    return exp_raw(engine, prods)


def exp_fx(alpha: FxValue, params, checked: bool = True):
    """``(e**alpha, cycles)``; raises :class:`DomainError` beyond theta_max."""
    engine = _engine(params)
    _check_format(engine, alpha)
    if checked:
        bound = theta_max(engine.params.M, engine.params.N)
        a = _mp(alpha)
        if abs(a) > bound:
            raise DomainError(
                f"exp argument {_fmt_bound(a)} outside convergence bound "
                f"|x| <= {_fmt_bound(bound)} (M={engine.params.M}, N={engine.params.N})"
            )
    (raw,) = exp_raw(engine, [alpha.raw])
    return FxValue(raw, engine.format), engine.cycles


def _ln_limit(engine: CordicEngine):
    upper = domain_bounds(engine.params.M, engine.params.N).ln_upper
    with mpmath.workprec(_PREC):
        cap = mpmath.ldexp(mpmath.mpf(engine.format.raw_max), -engine.format.frac_bits) - 1
    return upper, cap


def _check_ln_arg(engine: CordicEngine, a: mpmath.mpf, what: str) -> None:
    upper, cap = _ln_limit(engine)
    if a <= 0:
        raise DomainError(f"{what} {_fmt_bound(a)} must be > 0")
    if a > upper:
        raise DomainError(
            f"{what} {_fmt_bound(a)} above convergence bound e^(2*theta_max) = "
            f"{_fmt_bound(upper)} (M={engine.params.M}, N={engine.params.N})"
        )
    if a > cap:
        raise DomainError(
            f"{what} {_fmt_bound(a)} above format bound {_fmt_bound(cap)} "
            f"(x + 1 must fit {engine.format})"
        )


def ln_fx(alpha: FxValue, params, checked: bool = True):
    """``(ln alpha, cycles)``; the argument must be positive and in range."""
    engine = _engine(params)
    _check_format(engine, alpha)
    if checked:
        _check_ln_arg(engine, _mp(alpha), "ln argument")
    (raw,) = ln_raw(engine, [alpha.raw])
    return FxValue(raw, engine.format), engine.cycles


def pow_fx(x: FxValue, y: FxValue, params, checked: bool = True):
    """``(x**y, cycles)`` computed as ``e**(y ln x)``; requires ``x > 0``."""
    engine = _engine(params)
    _check_format(engine, x, y)
    xm, ym = _mp(x), _mp(y)
    if xm <= 0:
        raise DomainError(f"pow base {_fmt_bound(xm)} must be > 0")
    if checked:
        _check_ln_arg(engine, xm, "pow base")
        bound = theta_max(engine.params.M, engine.params.N)
        with mpmath.workprec(_PREC):
            arg = ym * mpmath.log(xm)
        if abs(arg) > bound:
            raise DomainError(
                f"|y ln x| = {_fmt_bound(abs(arg))} outside convergence bound "
                f"{_fmt_bound(bound)} (M={engine.params.M}, N={engine.params.N})"
            )
    (raw,) = pow_raw(engine, [x.raw], [y.raw])
    return FxValue(raw, engine.format), pow_cycles(engine)
