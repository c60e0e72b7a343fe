"""Flat ``key = value`` experiment configuration.

Lines starting with ``#`` and blank lines are ignored.  Lists are comma
separated; ``inf`` is accepted wherever an exponent is expected.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import ReflectionConfig
from .errors import DomainError
from .presets import PRESETS


class ConfigError(ValueError):
    """Unreadable or invalid configuration (a usage error)."""


def _floats(text: str) -> tuple:
    out = []
    for item in text.split(","):
        item = item.strip()
        if item:
            out.append(math.inf if item.lower() in ("inf", "infinity") else float(item))
    return tuple(out)


@dataclass(frozen=True)
class ExperimentConfig:
    dimension: int = 1
    multiplicities: tuple = (1.0,)
    grid_n: int = 512
    # None means auto
    grid_L: float | None = None
    alpha: tuple = (0.5, 1.0)
    p: tuple = (1.0, 2.0, math.inf)
    q: tuple = (1.0, 2.0)
    t_min: float = 1.0
    t_max: float = 1000.0
    t_count: int = 31
    t_values: tuple | None = None
    u0_preset: str = "bump"
    nonlinear_alpha: float = 0.5
    nonlinear_p: float = 2.0
    nonlinear_dt: float = 1e-3
    nonlinear_dt_rel: float = 1e-3
    nonlinear_t_end: float = 1000.0
    nonlinear_preset: str = "gaussian"
    # t_end of the two short dt / dt/2 runs; 0 skips the order check
    nonlinear_order_check: float = 1.0
    output_dir: str = ""

    # key in the file -> (field, parser)
    _KEYS = {
        "dimension": ("dimension", int),
        "multiplicities": ("multiplicities", _floats),
        "grid.n": ("grid_n", int),
        "grid.l": ("grid_L", lambda v: None if v.lower() == "auto" else float(v)),
        "alpha": ("alpha", _floats),
        "p": ("p", _floats),
        "q": ("q", _floats),
        "t.min": ("t_min", float),
        "t.max": ("t_max", float),
        "t.count": ("t_count", int),
        "t.values": ("t_values", _floats),
        "u0.preset": ("u0_preset", str),
        "nonlinear.alpha": ("nonlinear_alpha", float),
        "nonlinear.p": ("nonlinear_p", float),
        "nonlinear.dt": ("nonlinear_dt", float),
        "nonlinear.dt_rel": ("nonlinear_dt_rel", float),
        "nonlinear.t_end": ("nonlinear_t_end", float),
        "nonlinear.preset": ("nonlinear_preset", str),
        "nonlinear.order_check": ("nonlinear_order_check", float),
        "output.dir": ("output_dir", str),
    }

    def __post_init__(self):
        if self.dimension < 1:
            raise ConfigError("dimension: must be a positive integer")
        ks = self.multiplicities
        if len(ks) == 1 and self.dimension > 1:
            ks = ks * self.dimension
            object.__setattr__(self, "multiplicities", ks)
        if len(ks) != self.dimension:
            raise ConfigError(f"multiplicities: expected {self.dimension} values, got {len(ks)}")
        if any(not (k >= 0) for k in ks):
            raise ConfigError(f"multiplicities: every k must be >= 0, got {list(ks)}")
        if self.grid_n <= 0 or self.grid_n % 32:
            raise ConfigError("grid.n: must be a positive multiple of 32")
        if self.grid_L is not None and not self.grid_L > 0:
            raise ConfigError("grid.L: must be positive or 'auto'")
        for name in ("alpha", "p", "q"):
            if not getattr(self, name):
                raise ConfigError(f"{name}: needs at least one value")
        if any(not (0 < a <= 1) for a in self.alpha):
            raise ConfigError("alpha: values must lie in (0, 1]")
        if any(not (e >= 1) for e in self.p):
            raise ConfigError("p: exponents must be >= 1 or inf")
        if any(not (1 <= e < math.inf) for e in self.q):
            raise ConfigError("q: exponents must lie in [1, inf)")
        if self.t_values is None:
            if not (0 < self.t_min < self.t_max) or self.t_count < 1:
                raise ConfigError("t.min/t.max/t.count: need 0 < t.min < t.max and t.count >= 1")
        elif any(not t > 0 for t in self.t_values):
            raise ConfigError("t.values: times must be positive")
        for key, name in (("u0.preset", self.u0_preset), ("nonlinear.preset", self.nonlinear_preset)):
            if name not in PRESETS:
                raise ConfigError(f"{key}: unknown preset {name!r}; choose from {', '.join(PRESETS)}")
        if not 0 < self.nonlinear_alpha <= 1:
            raise ConfigError("nonlinear.alpha: must lie in (0, 1]")
        if not (self.nonlinear_dt > 0 and self.nonlinear_t_end > 0 and self.nonlinear_dt_rel >= 0):
            raise ConfigError("nonlinear.dt / nonlinear.t_end must be positive, nonlinear.dt_rel >= 0")
        if self.nonlinear_order_check < 0:
            raise ConfigError("nonlinear.order_check: must be >= 0")

    @classmethod
    def parse(cls, text: str) -> "ExperimentConfig":
        values = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            spec = cls._KEYS.get(key.lower())
            if spec is None:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            name, conv = spec
            try:
                values[name] = conv(value)
            except ValueError as exc:
                raise ConfigError(f"{key}: cannot parse {value!r} ({exc})") from None
        return cls(**values)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
        return cls.parse(text)

    @property
    def reflection(self) -> ReflectionConfig:
        try:
            return ReflectionConfig(self.dimension, self.multiplicities)
        except DomainError as exc:
            raise ConfigError(f"multiplicities: {exc}") from None

    @property
    def times(self) -> np.ndarray:
        if self.t_values is not None:
            return np.array(sorted(self.t_values))
        return np.logspace(math.log10(self.t_min), math.log10(self.t_max), self.t_count)

    def resolved(self) -> dict:
        """Every setting, with lists as lists and inf as the string 'inf'."""
        def clean(v):
            if isinstance(v, tuple):
                return [clean(x) for x in v]
            if isinstance(v, float) and math.isinf(v):
                return "inf"
            return v
        out = {}
        for key, (name, _) in self._KEYS.items():
            value = getattr(self, name)
            if key == "grid.l":
                key, value = "grid.L", "auto" if value is None else value
            out[key] = clean(value)
        return out


def format_exponent(p: float) -> str:
    return "inf" if math.isinf(p) else repr(float(p))
