"""Expanded hyperbolic CORDIC engine.

The engine runs ``M + 1`` negative-index iterations (``i = -M .. 0``,
factor ``1 - 2**(i-2)``) followed by ``N`` positive ones (factor
``2**-i``); indices 4, 13, 40, ... are executed twice, back to back.
Angles and the ``1/A_n`` constant are rounded to nearest once per
engine; everything else happens in the wrapping ``[B FW]`` datapath.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath

from . import kernel
from .fxnum import FxFormat, FxValue, RoundingMode, quantize_raw, to_real

__all__ = [
    "AngleEntry",
    "CordicEngine",
    "CordicState",
    "EngineParams",
    "Mode",
    "ProfileWarning",
    "angle_table",
    "repeat_schedule",
    "repeat_count",
    "scale_factor",
    "theta_max",
    "OUTPUT_REGISTER_CYCLES",
]

OUTPUT_REGISTER_CYCLES = 2
_PREC = 200


class ProfileWarning(UserWarning):
    """A hardware profile cannot hold one of its constants exactly in range."""


class Mode(enum.Enum):
    ROTATION = "rotation"
    VECTORING = "vectoring"


@dataclass(frozen=True)
class EngineParams:
    format: FxFormat
    M: int = 5
    N: int = 40

    def __post_init__(self):
        if self.M < 0:
            raise ValueError(f"M must be >= 0, got {self.M}")
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")

    def __str__(self) -> str:
        return f"{self.format} M={self.M} N={self.N}"


@dataclass(frozen=True)
class CordicState:
    x: FxValue
    y: FxValue
    z: FxValue
    i: int | None  # None for the initial (pre-iteration) state
    repeated: bool = False


@dataclass(frozen=True)
class AngleEntry:
    i: int
    theta: mpmath.mpf = field(repr=False)
    raw: int


def repeat_schedule(N: int) -> list[int]:
    """Positive indices executed twice: 4, 13, 40, ... (k -> 3k + 1), up to N."""
    out = []
    k = 4
    while k <= N:
        out.append(k)
        k = 3 * k + 1
    return out


def repeat_count(N: int) -> int:
    return len(repeat_schedule(N))


def _iteration_order(M: int | None, N: int) -> list[tuple[int, bool]]:
    order = [] if M is None else [(i, False) for i in range(-M, 1)]
    repeats = set(repeat_schedule(N))
    for i in range(1, N + 1):
        order.append((i, False))
        if i in repeats:
            order.append((i, True))
    return order


def _theta(i: int) -> mpmath.mpf:
    with mpmath.workprec(_PREC):
        if i <= 0:
            return mpmath.atanh(1 - mpmath.ldexp(1, i - 2))
        return mpmath.atanh(mpmath.ldexp(1, -i))


@lru_cache(maxsize=None)
def theta_max(M: int | None, N: int) -> mpmath.mpf:
    """Total angle budget; ``M=None`` is the original CORDIC (no negative stage)."""
    with mpmath.workprec(_PREC):
        return mpmath.fsum(_theta(i) for i, _ in _iteration_order(M, N))


@lru_cache(maxsize=None)
def scale_factor(M: int, N: int) -> mpmath.mpf:
    """A_n, counting each executed micro-rotation (repeats included)."""
    with mpmath.workprec(_PREC):
        a = mpmath.mpf(1)
        for i, _ in _iteration_order(M, N):
            f = 1 - mpmath.ldexp(1, i - 2) if i <= 0 else mpmath.ldexp(1, -i)
            a *= mpmath.sqrt(1 - f * f)
        return a


def angle_table(params: EngineParams) -> list[AngleEntry]:
    """Angles for ``i = -M .. N``, rounded to nearest (saturating) in the format."""
    fmt = params.format
    return [
        AngleEntry(i, theta, quantize_raw(theta, fmt, RoundingMode.NEAREST_AWAY))
        for i, theta in ((i, _theta(i)) for i in range(-params.M, params.N + 1))
    ]


def _exceeds(v: mpmath.mpf, fmt: FxFormat) -> bool:
    with mpmath.workprec(_PREC):
        return mpmath.ldexp(v, fmt.frac_bits) > fmt.raw_max


class CordicEngine:
    """An immutable engine instance for one hardware profile.

    >>> eng = CordicEngine(EngineParams(FxFormat(48, 28), M=5, N=40))
    >>> eng.cycles
    51
    """

    def __init__(self, params: EngineParams):
        self.params = params
        fmt = params.format
        self.format = fmt
        self.angles = angle_table(params)
        with mpmath.workprec(_PREC):
            inv_an = 1 / scale_factor(params.M, params.N)
        self.warnings = [
            f"angle theta_{e.i} = {mpmath.nstr(e.theta, 6)} saturates in {fmt}"
            for e in self.angles if _exceeds(e.theta, fmt)
        ]
        if _exceeds(inv_an, fmt):
            self.warnings.append(f"1/A_n = {mpmath.nstr(inv_an, 8)} saturates in {fmt}")
        for msg in self.warnings:
            warnings.warn(msg, ProfileWarning, stacklevel=2)
        self.inv_scale = inv_an
        self.inv_scale_raw = quantize_raw(inv_an, fmt, RoundingMode.NEAREST_AWAY)
        by_index = {e.i: e.raw for e in self.angles}
        self.order = _iteration_order(params.M, params.N)
        last = fmt.total_bits - 1
        # a B-bit operand shifted by >= B - 1 is already all sign bits
        self._shifts = tuple(min(2 - i if i <= 0 else i, last) for i, _ in self.order)
        self._negative = tuple(i <= 0 for i, _ in self.order)
        self._thetas = tuple(by_index[i] for i, _ in self.order)

    @property
    def iterations(self) -> int:
        return len(self.order)

    @property
    def cycles(self) -> int:
        return self.iterations + OUTPUT_REGISTER_CYCLES

    def _check(self, *values: FxValue) -> None:
        for v in values:
            if v.format != self.format:
                raise ValueError(f"operand format {v.format} does not match engine {self.format}")

    def run_raw(self, mode: Mode, xs, ys, zs, backend=None):
        """Batch run on raw payloads; returns three lists of raw ints."""
        run = backend or kernel.run_batch
        return run(xs, ys, zs, self._shifts, self._negative, self._thetas,
                   mode is Mode.VECTORING, self.format.total_bits)

    def run(self, mode: Mode, x_in: FxValue, y_in: FxValue, z_in: FxValue):
        """Returns ``(x_n, y_n, z_n, cycles)``."""
        self._check(x_in, y_in, z_in)
        (x,), (y,), (z,) = self.run_raw(mode, [x_in.raw], [y_in.raw], [z_in.raw])
        fmt = self.format
        return FxValue(x, fmt), FxValue(y, fmt), FxValue(z, fmt), self.cycles

    def trace(self, mode: Mode, x_in: FxValue, y_in: FxValue, z_in: FxValue) -> list[CordicState]:
        """Initial state followed by the state after every executed micro-rotation."""
        self._check(x_in, y_in, z_in)
        fmt = self.format
        bits = fmt.total_bits
        vec = mode is Mode.VECTORING
        x, y, z = x_in.raw, y_in.raw, z_in.raw
        states = [CordicState(x_in, y_in, z_in, None)]
        for (i, rep), s, neg, th in zip(self.order, self._shifts, self._negative, self._thetas):
            x, y, z = kernel.step(x, y, z, s, neg, th, vec, bits)
            states.append(CordicState(FxValue(x, fmt), FxValue(y, fmt), FxValue(z, fmt), i, rep))
        return states

    def angle_rows(self):
        """``(i, theta_real, theta_raw)`` rows for inspection dumps."""
        return [(e.i, float(e.theta), e.raw) for e in self.angles]

    def __repr__(self) -> str:
        return f"CordicEngine({self.params})"


def state_reals(state: CordicState) -> tuple[float, float, float]:
    return to_real(state.x), to_real(state.y), to_real(state.z)
