"""Cycle/latency model and a proxy resource-cost model.

The cost model is a stand-in for post-synthesis slice counts: it counts
datapath bits by kind and combines them with configurable weights.  It
is monotone in B and depends on N only through the angle table.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .cordic import EngineParams, repeat_count

__all__ = [
    "CONTROL_BITS",
    "FUNCTIONS",
    "CostWeights",
    "ResourceProxy",
    "TimingModel",
    "cycles",
    "latency_ns",
    "resource_proxy",
]

FUNCTIONS = ("exp", "ln", "pow")

# iteration counter + state machine; held fixed so only the LUT term tracks N
CONTROL_BITS = 10


def _check_fn(fn: str) -> None:
    if fn not in FUNCTIONS:
        raise ValueError(f"unknown function {fn!r}; expected one of {FUNCTIONS}")


def cycles(fn: str, M: int, N: int) -> int:
    _check_fn(fn)
    if N < 1:
        raise ValueError("N must be >= 1")
    v = repeat_count(N)
    if fn == "pow":
        return 2 * (M + 1) + 2 * N + 2 * v + 5
    return M + 1 + N + v + 2


@dataclass(frozen=True)
class TimingModel:
    clock_hz: float = 125e6

    def __post_init__(self):
        if not self.clock_hz > 0:
            raise ValueError(f"clock_hz must be > 0, got {self.clock_hz}")

    def latency_ns(self, fn: str, M: int, N: int) -> float:
        return cycles(fn, M, N) * 1e9 / self.clock_hz


def latency_ns(fn: str, M: int, N: int, clock_hz: float = 125e6) -> float:
    return TimingModel(clock_hz).latency_ns(fn, M, N)


@dataclass(frozen=True)
class CostWeights:
    register: float = 1.0
    adder: float = 1.0
    lut: float = 0.25
    multiplier: float = 0.5

    def __post_init__(self):
        for name, w in asdict(self).items():
            if w < 0:
                raise ValueError(f"cost weight {name} must be >= 0")

    def describe(self) -> str:
        return " ".join(f"{k}={v:g}" for k, v in asdict(self).items())


@dataclass(frozen=True)
class ResourceProxy:
    register_bits: int
    adder_bits: int
    lut_table_bits: int
    multiplier_bits: int
    cost: float


def resource_proxy(params: EngineParams, fn: str, weights: CostWeights | None = None) -> ResourceProxy:
    """Bit counts for the two-stage engine (+ multiplier for pow).

    Registers hold x, y, z for each stage; the negative stage has five
    adders and the positive stage three; the angle LUT stores M + 1 + N
    words.
    """
    _check_fn(fn)
    w = weights or CostWeights()
    b = params.format.total_bits
    regs = 6 * b + CONTROL_BITS
    adders = (5 + 3) * b
    lut = (params.M + 1 + params.N) * b
    mult = b * b if fn == "pow" else 0
    cost = w.register * regs + w.adder * adders + w.lut * lut + w.multiplier * mult
    return ResourceProxy(regs, adders, lut, mult, cost)
