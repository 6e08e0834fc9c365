"""Bit-accurate expanded hyperbolic CORDIC model for e^x, ln x and x^y."""

from .cordic import CordicEngine, EngineParams, Mode, repeat_schedule, scale_factor, theta_max
from .elemfns import DomainError, exp_fx, ln_fx, pow_fx
from .fxnum import FxFormat, FxValue, RoundingMode, quantize, to_real
from .kernel import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CordicEngine",
    "DomainError",
    "EngineParams",
    "FxFormat",
    "FxValue",
    "Mode",
    "RoundingMode",
    "exp_fx",
    "ln_fx",
    "pow_fx",
    "quantize",
    "repeat_schedule",
    "scale_factor",
    "theta_max",
    "to_real",
]
