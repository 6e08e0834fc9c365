"""Flat ``key = value`` configuration for the command-line tool.

Blank lines and ``#`` comments are ignored; every key is optional and
unknown keys are an error.  Lists are comma separated.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, replace

from .dse import DEFAULT_B, DEFAULT_N, SPEC_NAMES, TABLE_FORMATS
from .fxnum import FxFormat
from .perf import CostWeights

ENV_VAR = "HYPCORDIC_CONFIG"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Config:
    M: int = 5
    N: int = 40
    B: int = 64
    FW: int = 32
    clock_hz: float = 125e6
    w_register: float = 1.0
    w_adder: float = 1.0
    w_lut: float = 0.25
    w_multiplier: float = 0.5
    exp_spec: str = "exp-default"
    ln_spec: str = "ln-default"
    pow_spec: str = "pow-default"
    b_list: tuple = DEFAULT_B
    n_list: tuple = DEFAULT_N
    include_44: bool = False
    workers: int = 1
    out_dir: str = field(default=".")

    @property
    def weights(self) -> CostWeights:
        return CostWeights(self.w_register, self.w_adder, self.w_lut, self.w_multiplier)

    def spec_for(self, fn: str) -> str:
        return getattr(self, f"{fn}_spec")

    def formats(self) -> list[FxFormat]:
        bs = sorted(set(self.b_list) | ({44} if self.include_44 else set()))
        return [FxFormat(b, TABLE_FORMATS[b]) for b in bs]

    def validate(self) -> "Config":
        if self.M < 0:
            raise ConfigError("M must be >= 0")
        if self.N < 1:
            raise ConfigError("N must be >= 1")
        if not self.clock_hz > 0:
            raise ConfigError("clock_hz must be > 0")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        try:
            FxFormat(self.B, self.FW)
            self.weights
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        for fn, allowed in (("exp", ("exp-default",)), ("ln", ("ln-default",)),
                            ("pow", ("pow-default", "pow-box"))):
            if self.spec_for(fn) not in allowed:
                raise ConfigError(f"{fn}_spec must be one of {allowed}")
        missing = [b for b in self.b_list if b not in TABLE_FORMATS]
        if missing:
            raise ConfigError(f"b_list entries without a table format: {missing}")
        if not self.b_list or not self.n_list or min(self.n_list) < 1:
            raise ConfigError("b_list and n_list must be non-empty with N >= 1")
        return self


_TYPES = {f.name: f.type for f in fields(Config)}


def _convert(key: str, text: str, lineno: int):
    kind = _TYPES[key]
    try:
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        if kind == "bool":
            low = text.lower()
            if low not in ("1", "0", "true", "false", "yes", "no"):
                raise ValueError(f"not a boolean: {text!r}")
            return low in ("1", "true", "yes")
        if kind == "tuple":
            return tuple(int(v) for v in text.split(",") if v.strip())
        return text
    except ValueError as exc:
        raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None


def parse_config(text: str) -> Config:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _convert(key, value, lineno)
    return replace(Config(), **values).validate()


def load_config(path: str | None = None) -> Config:
    """Config from ``path``, else ``$HYPCORDIC_CONFIG``, else defaults."""
    path = path or os.environ.get(ENV_VAR)
    if not path:
        return Config()
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None


__all__ = ["Config", "ConfigError", "ENV_VAR", "SPEC_NAMES", "load_config", "parse_config"]
