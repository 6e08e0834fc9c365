"""Two's-complement fixed-point formats and datapath arithmetic.

Values are carried as Python integers ("raw" payloads in units of 2**-FW),
so every width up to 128 bits is exact.  Adders, shifters and the
multiplier wrap modulo 2**B like plain RTL; only :func:`quantize`
saturates, modelling an out-of-range stimulus driven into a fixed-width
input port.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real

import mpmath

__all__ = [
    "FxError",
    "FxFormat",
    "FxValue",
    "RoundingMode",
    "quantize",
    "quantize_raw",
    "to_real",
    "add",
    "sub",
    "shift_right_arith",
    "shift_left",
    "mul",
    "wrap_raw",
]

MIN_BITS = 2
MAX_BITS = 128


class FxError(ValueError):
    """Invalid fixed-point format, operand mix or stimulus."""


class RoundingMode(enum.Enum):
    TRUNCATE = "truncate"  # toward -inf, what a barrel shifter does
    NEAREST_AWAY = "nearest"  # ties away from zero, used for constants


@dataclass(frozen=True, order=True)
class FxFormat:
    """A ``[B FW]`` format: ``total_bits`` wide with ``frac_bits`` fraction bits."""

    total_bits: int
    frac_bits: int

    def __post_init__(self):
        if not MIN_BITS <= self.total_bits <= MAX_BITS:
            raise FxError(f"total bits must be in [{MIN_BITS}, {MAX_BITS}], got {self.total_bits}")
        if not 0 <= self.frac_bits < self.total_bits:
            raise FxError(
                f"fraction bits must be in [0, {self.total_bits}), got {self.frac_bits}"
            )

    @property
    def int_bits(self) -> int:
        return self.total_bits - self.frac_bits

    @property
    def raw_min(self) -> int:
        return -(1 << (self.total_bits - 1))

    @property
    def raw_max(self) -> int:
        return (1 << (self.total_bits - 1)) - 1

    @property
    def resolution(self) -> Fraction:
        return Fraction(1, 1 << self.frac_bits)

    @property
    def min_value(self) -> Fraction:
        return Fraction(self.raw_min, 1 << self.frac_bits)

    @property
    def max_value(self) -> Fraction:
        return Fraction(self.raw_max, 1 << self.frac_bits)

    @property
    def dynamic_range_db(self) -> float:
        return 20.0 * (self.total_bits - 1) * math.log10(2.0)

    def __str__(self) -> str:
        return f"[{self.total_bits} {self.frac_bits}]"


@dataclass(frozen=True)
class FxValue:
    raw: int
    format: FxFormat

    def __post_init__(self):
        if not self.format.raw_min <= self.raw <= self.format.raw_max:
            raise FxError(f"raw {self.raw} does not fit {self.format}")

    @classmethod
    def from_real(cls, v, fmt: FxFormat, mode: RoundingMode = RoundingMode.TRUNCATE) -> "FxValue":
        return quantize(v, fmt, mode)

    def __float__(self) -> float:
        return to_real(self)

    def __repr__(self) -> str:
        return f"FxValue({to_real(self)!r}, raw={self.raw}, {self.format})"


def wrap_raw(raw: int, total_bits: int) -> int:
    """Reduce ``raw`` modulo ``2**total_bits`` into the signed range."""
    half = 1 << (total_bits - 1)
    return ((raw + half) & ((half << 1) - 1)) - half


def _exact(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, mpmath.mpf):
        if not mpmath.isfinite(v):
            raise FxError(f"non-finite stimulus {v}")
        man, exp = v.man_exp
        return Fraction(int(man)) * (Fraction(2) ** int(exp))
    if isinstance(v, Real):
        f = float(v)
        if not math.isfinite(f):
            raise FxError(f"non-finite stimulus {v}")
        return Fraction(f)
    raise FxError(f"cannot quantize {type(v).__name__}")


def quantize_raw(v, fmt: FxFormat, mode: RoundingMode = RoundingMode.TRUNCATE) -> int:
    """Raw payload of ``v`` in ``fmt``; saturates outside the format range."""
    scaled = _exact(v) * (1 << fmt.frac_bits)
    if mode is RoundingMode.TRUNCATE:
        raw = math.floor(scaled)
    elif mode is RoundingMode.NEAREST_AWAY:
        raw = math.floor(abs(scaled) + Fraction(1, 2))
        if scaled < 0:
            raw = -raw
    else:
        raise FxError(f"unknown rounding mode {mode!r}")
    return min(max(raw, fmt.raw_min), fmt.raw_max)


def quantize(v, fmt: FxFormat, mode: RoundingMode = RoundingMode.TRUNCATE) -> FxValue:
    return FxValue(quantize_raw(v, fmt, mode), fmt)


def to_real(a: FxValue) -> float:
    """Nearest double to ``raw * 2**-FW`` (exact whenever it fits 53 bits)."""
    return a.raw / (1 << a.format.frac_bits)


def _same_format(a: FxValue, b: FxValue) -> FxFormat:
    if a.format != b.format:
        raise FxError(f"format mismatch: {a.format} vs {b.format}")
    return a.format


def add(a: FxValue, b: FxValue) -> FxValue:
    fmt = _same_format(a, b)
    return FxValue(wrap_raw(a.raw + b.raw, fmt.total_bits), fmt)


def sub(a: FxValue, b: FxValue) -> FxValue:
    fmt = _same_format(a, b)
    return FxValue(wrap_raw(a.raw - b.raw, fmt.total_bits), fmt)


def _check_shift(a: FxValue, k: int) -> None:
    if not 0 <= k < a.format.total_bits:
        raise FxError(f"shift {k} outside [0, {a.format.total_bits})")


def shift_right_arith(a: FxValue, k: int) -> FxValue:
    _check_shift(a, k)
    return FxValue(a.raw >> k, a.format)


def shift_left(a: FxValue, k: int) -> FxValue:
    _check_shift(a, k)
    return FxValue(wrap_raw(a.raw << k, a.format.total_bits), a.format)


def mul(a: FxValue, b: FxValue) -> FxValue:
    """Full-width product, floored by FW bits, then wrapped to B bits."""
    fmt = _same_format(a, b)
    return FxValue(wrap_raw((a.raw * b.raw) >> fmt.frac_bits, fmt.total_bits), fmt)
